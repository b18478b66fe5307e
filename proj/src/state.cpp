#include "aris/state.hpp"

#include <cmath>
#include <numbers>

namespace aris {

std::shared_ptr<const Scenario> Scenario::build(const SystemConfig& config) {
  auto scenario = std::make_shared<Scenario>();
  scenario->config = validated(config);
  scenario->grid = build_grid(scenario->config);
  auto generated = generate_channels(scenario->config, scenario->grid);
  scenario->channels = std::move(generated.channels);
  scenario->jammer_link = std::move(generated.jammer_link);
  scenario->users = resolve_user_positions(scenario->config);
  return scenario;
}

PhaseField random_phases(const SystemConfig& config, std::size_t cells) {
  auto rng = RandomStreams(config.seed).stream("phase-init");
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  CMatrix theta(config.ris_elements, static_cast<Eigen::Index>(cells));
  for (Eigen::Index c = 0; c < theta.cols(); ++c)
    for (Eigen::Index n = 0; n < theta.rows(); ++n) theta(n, c) = std::polar(1.0, angle(rng));
  return PhaseField(std::move(theta));
}

SystemState initial_state(std::shared_ptr<const Scenario> scenario) {
  SystemState state;
  const SystemConfig& config = scenario->config;
  state.density = uniform_density(scenario->grid, config.uav_count, config.max_density);
  state.phases = random_phases(config, scenario->grid.size());
  state.beams.w = CMatrix::Zero(config.bs_antennas, config.users);
  state.beams.powers = Eigen::VectorXd::Zero(config.users);
  state.jammer.position = config.jammer_estimate;
  state.jammer.beamformer = CVector::Zero(config.jammer_antennas);
  state.jammer.beamformer(0) = 1.0;
  state.scenario = std::move(scenario);
  return state;
}

JammerObjective jammer_objective(const SystemState& state) {
  return JammerObjective(state.phases, state.density, state.scenario->channels,
                         state.scenario->jammer_link);
}

namespace {

std::vector<cd> jam_channels(const SystemState& state) {
  const Scenario& s = *state.scenario;
  std::vector<cd> out(state.users());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = effective_jam_channel(state.phases, state.density, s.channels, s.jammer_link,
                                   state.jammer.position, state.jammer.beamformer, k);
  return out;
}

double sinr_from(const CMatrix& h_eff, const BeamformSet& beams, cd jam, double p_jam,
                 double noise, std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  const CRowVector row = h_eff.row(kk);
  const double signal = std::norm((row * beams.w.col(kk))(0));
  double leakage = 0.0;
  for (Eigen::Index i = 0; i < beams.w.cols(); ++i)
    if (i != kk) leakage += std::norm((row * beams.w.col(i))(0));
  return signal / (leakage + std::norm(jam) * p_jam + noise);
}

}  // namespace

double sinr(const SystemState& state, std::size_t k) {
  const Scenario& s = *state.scenario;
  const CRowVector row = effective_bs_channel(state.phases, state.density, s.channels, k);
  CMatrix h(state.users(), row.size());
  h.setZero();
  h.row(static_cast<Eigen::Index>(k)) = row;
  const cd jam = effective_jam_channel(state.phases, state.density, s.channels, s.jammer_link,
                                       state.jammer.position, state.jammer.beamformer, k);
  return sinr_from(h, state.beams, jam, s.config.jam_power, s.config.noise_power, k);
}

std::vector<double> sinrs(const SystemState& state) {
  const Scenario& s = *state.scenario;
  const CMatrix h_eff = effective_bs_matrix(state.phases, state.density, s.channels);
  const std::vector<cd> jam = jam_channels(state);
  std::vector<double> out(state.users());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = sinr_from(h_eff, state.beams, jam[k], s.config.jam_power, s.config.noise_power, k);
  return out;
}

double sum_rate_from_sinrs(const std::vector<double>& gammas) {
  double total = 0.0;
  for (double g : gammas) total += std::log2(1.0 + g);
  return total;
}

double sum_rate(const SystemState& state) { return sum_rate_from_sinrs(sinrs(state)); }

std::vector<double> interference_noise(const SystemState& state) {
  const SystemConfig& c = state.config();
  const std::vector<cd> jam = jam_channels(state);
  std::vector<double> out(jam.size());
  for (std::size_t k = 0; k < jam.size(); ++k)
    out[k] = std::norm(jam[k]) * c.jam_power + c.noise_power;
  return out;
}

BeamformSet beamform_update(const SystemState& state) {
  const Scenario& s = *state.scenario;
  const CMatrix h_eff = effective_bs_matrix(state.phases, state.density, s.channels);
  const std::vector<double> levels = interference_noise(state);
  return zf_water_filling(h_eff, levels, s.config.bs_power);
}

double sum_rate_upper_bound(const SystemState& state) {
  const Scenario& s = *state.scenario;
  const CMatrix h_eff = effective_bs_matrix(state.phases, state.density, s.channels);
  const double best = h_eff.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(state.users()) *
         std::log2(1.0 + s.config.bs_power * best / s.config.noise_power);
}

}  // namespace aris
