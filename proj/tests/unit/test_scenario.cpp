#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "aris/scenario.hpp"
#include "support.hpp"

using namespace aris;

namespace {

bool mentions(const std::vector<std::string>& problems, const std::string& text) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.find(text) != std::string::npos; });
}

}  // namespace

TEST_CASE("build_grid tiles the default region") {
  const Grid g = build_grid(SystemConfig{});
  CHECK(g.size() == 400);
  for (const Cell& c : g.cells()) CHECK(c.area == doctest::Approx(100.0));
  CHECK(g[0].center.x() == doctest::Approx(5.0));
  CHECK(g[0].center.y() == doctest::Approx(5.0));
  // Row-major: index = iy * nx + ix.
  CHECK(g[21].center.x() == doctest::Approx(15.0));
  CHECK(g[21].center.y() == doctest::Approx(15.0));
  const auto areas = g.areas();
  CHECK(std::accumulate(areas.begin(), areas.end(), 0.0) == doctest::Approx(40000.0).epsilon(1e-12));
}

TEST_CASE("build_grid degenerate and rectangular tilings") {
  SystemConfig c;
  c.region_size = {100.0, 100.0};
  c.grid_nx = c.grid_ny = 1;
  Grid g = build_grid(c);
  REQUIRE(g.size() == 1);
  CHECK(g[0].area == doctest::Approx(1e4));
  CHECK(g[0].center == Vec2(50.0, 50.0));

  c.region_size = {200.0, 100.0};
  c.grid_nx = 4;
  c.grid_ny = 2;
  g = build_grid(c);
  REQUIRE(g.size() == 8);
  for (const Cell& cell : g.cells()) {
    CHECK(cell.area == doctest::Approx(2500.0));
    CHECK(cell.center.x() > 0.0);
    CHECK(cell.center.x() < 200.0);
    CHECK(cell.center.y() < 100.0);
  }
  CHECK(g[1].center.x() - g[0].center.x() == doctest::Approx(50.0));
}

TEST_CASE("build_grid ignores the seed") {
  SystemConfig a, b;
  b.seed = 99;
  const Grid ga = build_grid(a), gb = build_grid(b);
  for (std::size_t i = 0; i < ga.size(); ++i) CHECK(ga[i].center == gb[i].center);
}

TEST_CASE("uniform_density") {
  const Grid g = build_grid(SystemConfig{});
  const DensityField d = uniform_density(g, 100.0, 0.05);
  for (double r : d.values()) CHECK(r == doctest::Approx(0.0025));
  CHECK(d.integral() == doctest::Approx(100.0));
  CHECK(d.check(100.0, 0.05).empty());

  const DensityField empty = uniform_density(g, 0.0, 0.05);
  for (double r : empty.values()) CHECK(r == 0.0);

  const DensityField full = uniform_density(g, 800.0, 0.02);
  for (double r : full.values()) CHECK(r == 0.02);
  CHECK(full.check(800.0, 0.02).empty());

  CHECK_THROWS_AS(uniform_density(g, 1000.0, 0.02), ConfigError);
}

TEST_CASE("validate_config reports every problem") {
  SystemConfig c;
  CHECK(validate_config(c).empty());

  c.users = 17;
  auto problems = validate_config(c);
  CHECK(mentions(problems, "K exceeds M"));

  c = SystemConfig{};
  c.uav_count = 1000.0;
  c.max_density = 0.02;
  problems = validate_config(c);
  CHECK(mentions(problems, "Q exceeds density capacity 800"));

  c.users = 17;
  c.noise_power = 0.0;
  c.uncertainty_radius = -1.0;
  problems = validate_config(c);
  CHECK(problems.size() == 4);

  try {
    validated(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.problems().size() == 4);
  }
}

TEST_CASE("validation is idempotent") {
  const SystemConfig c = testing::small_config();
  const SystemConfig once = validated(c);
  const SystemConfig twice = validated(once);
  CHECK(validate_config(twice).empty());
  CHECK(twice.users == c.users);
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(40.0) == doctest::Approx(10.0));
  CHECK(dbm_to_watts(50.0) == doctest::Approx(100.0));
  CHECK(dbm_to_watts(-102.0) == doctest::Approx(6.309573444801943e-14));
  CHECK(watts_to_dbm(dbm_to_watts(-73.5)) == doctest::Approx(-73.5));
  CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
  CHECK(db_to_linear(-30.0) == doctest::Approx(1e-3));
}

TEST_CASE("named random substreams are reproducible and independent") {
  const RandomStreams a(5), b(5), c(6);
  auto sa = a.stream("channel", 3), sb = b.stream("channel", 3);
  auto sc = c.stream("channel", 3), sd = a.stream("users");
  const auto x = sa();
  CHECK(x == sb());
  CHECK(x != sc());
  CHECK(x != sd());
  CHECK(a.stream("channel", 3)() != a.stream("channel", 4)());
}

TEST_CASE("users are drawn inside the cluster disk") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SystemConfig c;
    c.seed = seed;
    const auto users = resolve_user_positions(c);
    REQUIRE(users.size() == 4);
    for (const Vec2& u : users)
      CHECK((u - c.user_cluster_center).norm() <= c.user_cluster_radius + 1e-12);
  }
  SystemConfig fixed;
  fixed.users = 2;
  fixed.user_positions = {{10.0, 20.0}, {30.0, 40.0}};
  CHECK(resolve_user_positions(fixed) == fixed.user_positions);
}
