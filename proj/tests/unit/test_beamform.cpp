#include <doctest.h>

#include <cmath>
#include <random>

#include "aris/beamform.hpp"
#include "support.hpp"

using namespace aris;

namespace {

CMatrix random_channel(int k, int m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix h(k, m);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < m; ++j) h(i, j) = {g(rng), g(rng)};
  return h;
}

double rate(const std::vector<double>& p, const std::vector<double>& levels) {
  double r = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) r += std::log2(1.0 + p[k] / levels[k]);
  return r;
}

}  // namespace

TEST_CASE("zf_matrix on an identity channel") {
  const ZeroForcing zf = zf_matrix(CMatrix::Identity(3, 3));
  CHECK((zf.directions - CMatrix::Identity(3, 3)).norm() < 1e-12);
  for (int k = 0; k < 3; ++k) CHECK(zf.gains(k) == doctest::Approx(1.0));
}

TEST_CASE("zf_matrix with orthogonal rows of norm two") {
  CMatrix h = CMatrix::Zero(2, 4);
  h(0, 0) = 2.0;
  h(1, 1) = cd(0.0, 2.0);
  const ZeroForcing zf = zf_matrix(h);
  const CMatrix hw = h * zf.directions;
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(hw(k, k)) == doctest::Approx(2.0));
    CHECK(zf.gains(k) == doctest::Approx(2.0));
    CHECK(zf.directions.col(k).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("zf_matrix diagonalizes random channels") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix h = random_channel(4, 8, rng);
    const ZeroForcing zf = zf_matrix(h);
    const CMatrix hw = h * zf.directions;
    for (int k = 0; k < 4; ++k) {
      CHECK(zf.directions.col(k).norm() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(hw(k, k)) == doctest::Approx(zf.gains(k)).epsilon(1e-9));
      for (int i = 0; i < 4; ++i)
        if (i != k) CHECK(std::abs(hw(i, k)) <= 1e-9 * std::abs(hw(k, k)));
    }
  }
}

TEST_CASE("zf_matrix rejects rank-deficient and wide channels") {
  CMatrix h(2, 3);
  h << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0;
  CHECK_THROWS_AS(zf_matrix(h), SingularChannelError);
  try {
    zf_matrix(h);
  } catch (const SingularChannelError& e) {
    CHECK(std::string(e.what()).find("regularized") != std::string::npos);
  }
  CHECK_THROWS_AS(zf_matrix(CMatrix::Identity(3, 2)), SingularChannelError);
}

TEST_CASE("water_fill examples") {
  std::vector<double> levels{1.0, 1.0};
  WaterFilling wf = water_fill(levels, 2.0);
  CHECK(wf.powers[0] == doctest::Approx(1.0));
  CHECK(wf.powers[1] == doctest::Approx(1.0));
  CHECK(wf.water_level == doctest::Approx(2.0));

  levels = {1.0, 3.0};
  wf = water_fill(levels, 2.0);
  CHECK(wf.powers[0] == doctest::Approx(2.0));
  CHECK(wf.powers[1] == 0.0);
  CHECK(wf.water_level == doctest::Approx(3.0));

  levels = {5.0};
  wf = water_fill(levels, 2.0);
  CHECK(wf.powers[0] == doctest::Approx(2.0));

  CHECK(water_fill({}, 2.0).powers.empty());
}

TEST_CASE("water_fill [1,3] matches a grid search over splits") {
  const std::vector<double> levels{1.0, 3.0};
  double best = -1.0, best_p0 = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double p0 = 2.0 * i / 10000.0;
    const double r = rate({p0, 2.0 - p0}, levels);
    if (r > best) best = r, best_p0 = p0;
  }
  CHECK(best_p0 == doctest::Approx(2.0));
  const WaterFilling wf = water_fill(levels, 2.0);
  CHECK(rate(wf.powers, levels) >= best - 1e-12);
}

TEST_CASE("water_fill beats random Dirichlet splits and spends the budget") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> level_dist(0.1, 10.0);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> levels(5);
    for (double& l : levels) l = level_dist(rng);
    const double total = 1.0 + 10.0 * trial;
    const WaterFilling wf = water_fill(levels, total);
    double sum = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k) {
      CHECK(wf.powers[k] >= 0.0);
      if (wf.powers[k] > 0.0) CHECK(wf.powers[k] + levels[k] == doctest::Approx(wf.water_level));
      else CHECK(levels[k] >= wf.water_level - 1e-12);
      sum += wf.powers[k];
    }
    CHECK(std::abs(sum - total) <= 1e-9 * total);
    const double r = rate(wf.powers, levels);
    for (int s = 0; s < 1000; ++s) {
      std::vector<double> p(levels.size());
      double z = 0.0;
      for (double& x : p) z += (x = e(rng));
      for (double& x : p) x *= total / z;
      CHECK(rate(p, levels) <= r + 1e-12);
    }
  }
}

TEST_CASE("compose_beamformers") {
  std::mt19937_64 rng(5);
  const CMatrix h = random_channel(3, 6, rng);
  const ZeroForcing zf = zf_matrix(h);

  WaterFilling none;
  none.powers = {0.0, 0.0, 0.0};
  BeamformSet b = compose_beamformers(zf, none);
  CHECK(b.w.norm() == 0.0);

  WaterFilling first;
  first.powers = {10.0, 0.0, 0.0};
  b = compose_beamformers(zf, first);
  CHECK(b.w.col(0).squaredNorm() == doctest::Approx(10.0));
  CHECK(b.w.col(1).norm() == 0.0);
  CHECK(b.w.col(2).norm() == 0.0);

  const std::vector<double> levels{0.3, 0.7, 1.9};
  b = compose_beamformers(zf, water_fill(levels, 10.0));
  CHECK(std::abs(b.total_power() - b.powers.sum()) <= 1e-12 * b.powers.sum());
  CHECK(b.total_power() <= 10.0 + 1e-9);
  const CMatrix hw = h * b.w;
  for (int k = 0; k < 3; ++k) {
    double leak = 0.0;
    for (int i = 0; i < 3; ++i)
      if (i != k) leak += std::norm(hw(k, i));
    CHECK(leak <= 1e-12 * std::norm(hw(k, k)));
  }
}

TEST_CASE("zf_water_filling SINR matches the water-filling levels") {
  std::mt19937_64 rng(8);
  const CMatrix h = random_channel(3, 5, rng);
  const std::vector<double> c{0.5, 1.0, 2.0};
  const BeamformSet b = zf_water_filling(h, c, 4.0);
  const CMatrix hw = h * b.w;
  const ZeroForcing zf = zf_matrix(h);
  for (int k = 0; k < 3; ++k) {
    const double sinr = std::norm(hw(k, k)) / c[static_cast<std::size_t>(k)];
    const double expected = b.powers(k) * zf.gains(k) * zf.gains(k) / c[static_cast<std::size_t>(k)];
    CHECK(sinr == doctest::Approx(expected).epsilon(1e-9));
  }
  CHECK(b.total_power() == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("beamform_update on a scenario keeps leakage and budget in check") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SystemState s = testing::ready_state(testing::small_config(seed), {100.0, 40.0});
    CHECK(s.beams.total_power() == doctest::Approx(s.config().bs_power).epsilon(1e-9));
    const CMatrix hw = effective_bs_matrix(s.phases, s.density, s.scenario->channels) * s.beams.w;
    for (int k = 0; k < hw.rows(); ++k)
      for (int i = 0; i < hw.cols(); ++i)
        if (i != k && s.beams.powers(i) > 0.0)
          CHECK(std::norm(hw(k, i)) <= 1e-12 * std::norm(hw(i, i)));
  }
}
