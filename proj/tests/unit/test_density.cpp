#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aris/density.hpp"
#include "aris/driver.hpp"
#include "support.hpp"

using namespace aris;
using aris::testing::ready_state;
using aris::testing::small_config;

TEST_CASE("response functions") {
  SystemState s = ready_state(small_config(), {100.0, 40.0});
  const GainField g = net_marginal_gain(s);
  for (std::size_t k = 0; k < 2; ++k) {
    const cd z_b = (effective_bs_channel(s.phases, s.density, s.scenario->channels, k) *
                    s.beams.w.col(static_cast<Eigen::Index>(k)))(0);
    const cd z_j = effective_jam_channel(s.phases, s.density, s.scenario->channels,
                                         s.scenario->jammer_link, s.jammer.position,
                                         s.jammer.beamformer, k);
    cd sum_f = 0.0, sum_g = 0.0;
    for (std::size_t c = 0; c < s.scenario->grid.size(); ++c) {
      const auto [f, gk] = response_functions(s, c, k);
      CHECK(std::abs(f - g.signal_response(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k))) == 0.0);
      sum_f += f * s.density.mass(c);
      sum_g += gk * s.density.mass(c);
    }
    CHECK(std::abs(sum_f - z_b) <= 1e-9 * std::abs(z_b));
    CHECK(std::abs(sum_g - z_j) <= 1e-9 * std::abs(z_j));
  }

  s.beams.w.setZero();
  CHECK(std::abs(response_functions(s, 3, 0).first) == 0.0);
}

TEST_CASE("single-element response collapses to a scalar product") {
  SystemConfig c = small_config();
  c.ris_elements = 1;
  SystemState s = ready_state(c, {100.0, 40.0});
  s.phases = PhaseField::constant(1, s.scenario->grid.size());
  const CellChannels& ch = s.scenario->channels[5];
  const cd expected = std::conj(ch.ris_to_users(0, 1)) * (ch.bs_to_ris.row(0) * s.beams.w.col(1))(0);
  CHECK(std::abs(response_functions(s, 5, 1).first - expected) <= 1e-12 * std::abs(expected));
}

TEST_CASE("net marginal gain matches the closed form at zero-forcing states") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SystemState s = ready_state(small_config(seed), {100.0, 40.0});
    const GainField g = net_marginal_gain(s);
    const SystemConfig& c = s.config();
    for (std::size_t cell = 0; cell < s.scenario->grid.size(); ++cell) {
      double expected = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        const cd z_b = (effective_bs_channel(s.phases, s.density, s.scenario->channels, k) *
                        s.beams.w.col(kk))(0);
        const cd z_j = effective_jam_channel(s.phases, s.density, s.scenario->channels,
                                             s.scenario->jammer_link, s.jammer.position,
                                             s.jammer.beamformer, k);
        const double ck = std::norm(z_j) * c.jam_power + c.noise_power;
        const double gamma = std::norm(z_b) / ck;
        const auto [f, gk] = response_functions(s, cell, k);
        expected += 2.0 / std::numbers::ln2 *
                    ((std::conj(z_b) * f).real() - c.jam_power * gamma * (std::conj(z_j) * gk).real()) /
                    (std::norm(z_b) + ck);
      }
      CHECK(testing::relative_error(g.g[cell], expected) < 1e-6);
    }
  }
}

TEST_CASE("net marginal gain matches density finite differences") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const SystemState s = ready_state(small_config(seed), {100.0, 40.0});
    const GainField g = net_marginal_gain(s);
    const double q = s.config().uav_count;
    for (std::size_t cell : {std::size_t{0}, std::size_t{5}, std::size_t{10}, std::size_t{15}}) {
      const double area = s.density.areas()[cell];
      const double delta = 1e-6 * q / area;
      SystemState up = s, down = s;
      up.density[cell] += delta;
      down.density[cell] -= delta;
      const double fd = (sum_rate(up) - sum_rate(down)) / (2.0 * delta * area);
      CHECK(testing::relative_error(g.g[cell], fd) < 1e-3);
    }
  }
}

TEST_CASE("dt_ara examples") {
  const std::vector<double> gain{4, 3, 2, 1}, areas{1, 1, 1, 1};
  DtAraResult r = dt_ara(gain, areas, 2.0, 1.0);
  CHECK(r.density.values() == std::vector<double>{1, 1, 0, 0});
  CHECK(r.tau > 2.0);
  CHECK(r.tau < 3.0);
  CHECK_FALSE(r.fractional_cell);

  r = dt_ara(gain, areas, 2.5, 1.0);
  CHECK(r.density.values() == std::vector<double>{1, 1, 0.5, 0});
  REQUIRE(r.fractional_cell);
  CHECK(*r.fractional_cell == 2);

  r = dt_ara_bisection(gain, areas, 2.5, 1.0);
  CHECK(r.density.values() == std::vector<double>{1, 1, 0.5, 0});

  CHECK_THROWS_AS(dt_ara(gain, areas, 4.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dt_ara(gain, {1, 1}, 1.0, 1.0), GridMismatch);
}

TEST_CASE("ties go to the lowest index") {
  const std::vector<double> gain{1, 2, 2, 2}, areas{1, 1, 1, 1};
  for (const auto& r : {dt_ara(gain, areas, 1.5, 1.0), dt_ara_bisection(gain, areas, 1.5, 1.0)}) {
    CHECK(r.density.values() == std::vector<double>{0, 1, 0.5, 0});
  }
}

TEST_CASE("bisection and sort agree on random gain fields") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 50;
    std::vector<double> gain(n), areas(n, 100.0);
    for (double& x : gain) x = g(rng);
    const double rho_max = 0.05;
    const double q = frac(rng) * rho_max * 100.0 * n;
    const DtAraResult a = dt_ara(gain, areas, q, rho_max);
    const DtAraResult b = dt_ara_bisection(gain, areas, q, rho_max);
    for (std::size_t c = 0; c < n; ++c) CHECK(std::abs(a.density[c] - b.density[c]) <= 1e-9);
    CHECK(std::abs(a.density.integral() - q) <= 1e-9 * q);
    int fractional = 0;
    double min_on = INFINITY, max_off = -INFINITY;
    for (std::size_t c = 0; c < n; ++c) {
      const double r = a.density[c];
      if (r > 0.0 && r < rho_max) ++fractional;
      if (r > 0.0) min_on = std::min(min_on, gain[c]);
      else max_off = std::max(max_off, gain[c]);
    }
    CHECK(fractional <= 1);
    CHECK(min_on >= max_off - 1e-10);
  }
}

TEST_CASE("density_update never lowers the sum-rate") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SystemState s = ready_state(small_config(seed), {100.0, 40.0});
    for (RateModel model : {RateModel::ZeroForcing, RateModel::FixedBeamformers}) {
      OptimizerOptions options;
      options.phase.model = model;
      const DensityStep step = density_update(s, options);
      CHECK(step.density.check(s.config().uav_count, s.config().max_density).empty());
      CHECK(step.step >= 0.0);
      CHECK(step.step <= 1.0);
      SystemState next = s;
      next.density = step.density;
      // Under the zero-forcing model the BS adapts its precoders to the new density.
      if (model == RateModel::ZeroForcing) next.beams = beamform_update(next);
      CHECK(sum_rate(next) >= sum_rate(s) - 1e-9);
      CHECK(sum_rate(next) == doctest::Approx(step.sum_rate).epsilon(1e-9));
    }
  }
}
