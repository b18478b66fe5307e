#pragma once

#include <complex>
#include <random>

#include "aris/state.hpp"

namespace aris::testing {

/// A small scenario that keeps every test well under a second.
inline SystemConfig small_config(std::uint64_t seed = 1) {
  SystemConfig c;
  c.bs_antennas = 4;
  c.ris_elements = 8;
  c.users = 2;
  c.jammer_antennas = 4;
  c.grid_nx = 4;
  c.grid_ny = 4;
  c.seed = seed;
  return c;
}

inline CVector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

/// State with ZF + water-filling beams against the given jammer position.
inline SystemState ready_state(const SystemConfig& config, const Vec2& jammer) {
  SystemState s = initial_state(Scenario::build(config));
  s.jammer = fixed_jammer(jammer_objective(s), jammer);
  s.beams = beamform_update(s);
  return s;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace aris::testing
