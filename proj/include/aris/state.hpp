#pragma once

#include <memory>
#include <vector>

#include "aris/beamform.hpp"
#include "aris/channel.hpp"
#include "aris/jammer.hpp"
#include "aris/scenario.hpp"

namespace aris {

/// The immutable part of a run: validated config, grid and channels.
struct Scenario {
  SystemConfig config;
  Grid grid;
  ChannelSet channels;
  JammerLinkModel jammer_link;
  std::vector<Vec2> users;

  /// Validates the config (throws ConfigError) and draws all channels.
  static std::shared_ptr<const Scenario> build(const SystemConfig& config);
};

/// Everything the sum-rate depends on.
struct SystemState {
  std::shared_ptr<const Scenario> scenario;
  DensityField density;
  PhaseField phases;
  BeamformSet beams;
  JammerStrategy jammer;

  const SystemConfig& config() const { return scenario->config; }
  std::size_t users() const { return static_cast<std::size_t>(scenario->config.users); }
};

/// Uniform density, random phases from the "phase-init" substream, no
/// beamformers yet and the jammer parked at the estimate with v = e_1.
SystemState initial_state(std::shared_ptr<const Scenario> scenario);

/// theta = exp(i u), u ~ U[0, 2 pi), drawn from the "phase-init" substream.
PhaseField random_phases(const SystemConfig& config, std::size_t cells);

/// The defence's view of the jammer for the current (theta, rho).
JammerObjective jammer_objective(const SystemState& state);

/// SINR of user k, inter-user leakage included.
double sinr(const SystemState& state, std::size_t k);
std::vector<double> sinrs(const SystemState& state);
double sum_rate_from_sinrs(const std::vector<double>& gammas);
double sum_rate(const SystemState& state);

/// Per-user |h_eff,J,k|^2 P_J + sigma^2 for the state's jammer.
std::vector<double> interference_noise(const SystemState& state);

/// ZF + water-filling against the state's jammer (no acceptance test).
BeamformSet beamform_update(const SystemState& state);

/// K * log2(1 + P_B max_k |h_eff,B,k|^2 / sigma^2), an upper bound on the
/// sum-rate of the state's (theta, rho).
double sum_rate_upper_bound(const SystemState& state);

}  // namespace aris
