#include "aris/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

#include <spdlog/spdlog.h>

namespace aris {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double zf_leakage(const SystemState& state) {
  const Scenario& s = *state.scenario;
  const CMatrix h = effective_bs_matrix(state.phases, state.density, s.channels);
  const ZeroForcing zf = zf_matrix(h);
  const CMatrix hw = h * zf.directions;
  double worst = 0.0;
  for (Eigen::Index k = 0; k < hw.rows(); ++k) {
    const double leak = hw.row(k).squaredNorm() - std::norm(hw(k, k));
    worst = std::max(worst, std::max(leak, 0.0) / std::norm(hw(k, k)));
  }
  return worst;
}

void note_state(InvariantLog& log, const SystemState& state) {
  const SystemConfig& c = state.config();
  log.max_modulus_deviation =
      std::max(log.max_modulus_deviation, state.phases.max_modulus_deviation());
  if (c.uav_count > 0.0)
    log.max_budget_error = std::max(
        log.max_budget_error, std::abs(state.density.integral() - c.uav_count) / c.uav_count);
  log.max_power_excess =
      std::max(log.max_power_excess, state.beams.total_power() - c.bs_power);
}

// Keeps the better of the current beamformers and fresh ZF + water-filling.
double safeguarded_beamform(SystemState& state, double current) {
  SystemState candidate = state;
  candidate.beams = beamform_update(state);
  const double rate = sum_rate(candidate);
  if (rate >= current) {
    state.beams = std::move(candidate.beams);
    return rate;
  }
  return current;
}

}  // namespace

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Proposed: return "proposed";
    case Scheme::S1_NonRobust: return "s1_nonrobust";
    case Scheme::S2_UniformOptPhase: return "s2_uniform_opt_phase";
    case Scheme::S3_UniformRandomPhase: return "s3_uniform_random_phase";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : all_schemes())
    if (scheme_name(s) == name) return s;
  if (name == "s1") return Scheme::S1_NonRobust;
  if (name == "s2") return Scheme::S2_UniformOptPhase;
  if (name == "s3") return Scheme::S3_UniformRandomPhase;
  return std::nullopt;
}

const std::vector<Scheme>& all_schemes() {
  static const std::vector<Scheme> schemes = {Scheme::Proposed, Scheme::S1_NonRobust,
                                              Scheme::S2_UniformOptPhase,
                                              Scheme::S3_UniformRandomPhase};
  return schemes;
}

DensityStep density_update(const SystemState& state, const OptimizerOptions& options) {
  const SystemConfig& config = state.config();
  const GradientWorkspace ws(state);
  DensityStep out;
  out.gain = net_marginal_gain(ws, state.phases, state.density, options.phase.model);
  const DtAraResult target =
      options.density_rule == DensityRule::Bisection
          ? dt_ara_bisection(out.gain.g, state.density.areas(), config.uav_count,
                             config.max_density, options.bisection_tol)
          : dt_ara(out.gain.g, state.density.areas(), config.uav_count, config.max_density);
  out.tau = target.tau;
  out.target = target.density;

  const double current = ws.sum_rate(state.phases, state.density, options.phase.model);
  out.density = state.density;
  out.sum_rate = current;
  double t = 1.0;
  for (int h = 0; h <= options.density_backtracks; ++h, t *= 0.5) {
    std::vector<double> mixed(state.density.cells());
    for (std::size_t c = 0; c < mixed.size(); ++c)
      mixed[c] = t == 1.0 ? target.density[c]
                          : (1.0 - t) * state.density[c] + t * target.density[c];
    DensityField candidate(std::move(mixed), state.density.areas());
    const double rate = ws.sum_rate(state.phases, candidate, options.phase.model);
    if (rate > current) {
      out.density = std::move(candidate);
      out.step = t;
      out.sum_rate = rate;
      break;
    }
  }
  return out;
}

RunReport alternating_optimize(SystemState state, const JammerStrategy& jammer,
                               const OptimizerOptions& options, bool with_phases,
                               bool with_density) {
  const auto start = Clock::now();
  RunReport report;
  report.design_jammer = jammer;
  report.evaluation_jammer = jammer;
  state.jammer = jammer;

  auto t0 = Clock::now();
  state.beams = beamform_update(state);
  report.times.beamform += seconds_since(t0);
  report.invariants.max_zf_leakage = zf_leakage(state);
  note_state(report.invariants, state);
  double rate = sum_rate(state);
  report.trace.push_back(rate);

  auto record_drop = [&](double before, double after) {
    report.invariants.max_trace_drop = std::max(report.invariants.max_trace_drop, before - after);
  };

  for (int t = 1; t <= options.max_outer; ++t) {
    StageRecord stage;
    stage.iteration = t;
    const double previous = rate;

    t0 = Clock::now();
    const double before_bf = rate;
    rate = safeguarded_beamform(state, rate);
    report.times.beamform += seconds_since(t0);
    report.invariants.max_zf_leakage =
        std::max(report.invariants.max_zf_leakage, zf_leakage(state));
    record_drop(before_bf, rate);
    stage.after_beamform = rate;

    if (with_phases) {
      t0 = Clock::now();
      PhaseOptions phase_options = options.phase;
      if (t <= options.log_sinr_warmup && phase_options.model == RateModel::ZeroForcing)
        phase_options.model = RateModel::LogSinr;
      const PhaseResult phase = optimize_phases(state, phase_options);
      report.times.phase += seconds_since(t0);
      report.invariants.max_tangency_residual =
          std::max(report.invariants.max_tangency_residual, phase.max_tangency_residual);
      report.invariants.max_modulus_deviation =
          std::max(report.invariants.max_modulus_deviation, phase.max_modulus_deviation);
      stage.phase_iterations = phase.iterations;
      if (phase.trace.back() > phase.trace.front()) {
        const double before = rate;
        SystemState candidate = state;
        candidate.phases = phase.phases;
        if (options.phase.model != RateModel::FixedBeamformers)
          candidate.beams = beamform_update(candidate);
        const double next = sum_rate(candidate);
        if (next >= before) {
          state = std::move(candidate);
          rate = next;
        }
        record_drop(before, rate);
      }
    }
    stage.after_phase = rate;

    if (with_density) {
      t0 = Clock::now();
      DensityStep step = density_update(state, options);
      const double before = rate;
      std::optional<SystemState> best;
      if (step.step > 0.0) {
        SystemState candidate = state;
        candidate.density = std::move(step.density);
        if (options.phase.model != RateModel::FixedBeamformers)
          candidate.beams = beamform_update(candidate);
        const double next = sum_rate(candidate);
        if (next >= rate) {
          best = std::move(candidate);
          rate = next;
          stage.density_step = step.step;
        }
      }
      if (with_phases && options.adapt_phases_to_density &&
          step.target.values() != state.density.values()) {
        SystemState candidate = state;
        candidate.density = std::move(step.target);
        candidate.beams = beamform_update(candidate);
        std::vector<RateModel> rounds{options.phase.model};
        if (options.phase.model == RateModel::ZeroForcing)
          rounds.insert(rounds.begin(), RateModel::LogSinr);
        for (RateModel model : rounds) {
          PhaseOptions po = options.phase;
          po.model = model;
          const PhaseResult phase = optimize_phases(candidate, po);
          report.invariants.max_tangency_residual =
              std::max(report.invariants.max_tangency_residual, phase.max_tangency_residual);
          report.invariants.max_modulus_deviation =
              std::max(report.invariants.max_modulus_deviation, phase.max_modulus_deviation);
          candidate.phases = phase.phases;
          candidate.beams = beamform_update(candidate);
        }
        const double next = sum_rate(candidate);
        if (next > rate) {
          best = std::move(candidate);
          rate = next;
          stage.density_step = 1.0;
        }
      }
      if (best) state = std::move(*best);
      report.times.density += seconds_since(t0);
      record_drop(before, rate);
    }
    stage.after_density = rate;
    note_state(report.invariants, state);

    report.stages.push_back(stage);
    report.trace.push_back(rate);
    report.iterations = t;
    if (std::abs(rate - previous) < options.convergence_tol) {
      report.converged = true;
      break;
    }
  }
  if (options.max_outer == 0) report.converged = false;

  // Final ZF + water-filling so the reported w matches the final fields.
  t0 = Clock::now();
  report.sum_rate = safeguarded_beamform(state, rate);
  report.times.beamform += seconds_since(t0);
  report.sinr = sinrs(state);
  report.rate.resize(report.sinr.size());
  for (std::size_t k = 0; k < report.sinr.size(); ++k)
    report.rate[k] = std::log2(1.0 + report.sinr[k]);
  report.final_state = std::move(state);
  report.times.total = seconds_since(start);
  return report;
}

RunReport run_scheme(Scheme scheme, std::shared_ptr<const Scenario> scenario,
                     const OptimizerOptions& options) {
  const auto start = Clock::now();
  const SystemConfig& config = scenario->config;
  const SystemState initial = initial_state(scenario);

  auto t0 = Clock::now();
  const JammerObjective initial_view = jammer_objective(initial);
  const JammerStrategy worst = optimize_jammer(initial_view, config.jammer_estimate,
                                               config.uncertainty_radius, options.jammer);
  const double jammer_time = seconds_since(t0);

  RunReport report;
  switch (scheme) {
    case Scheme::Proposed:
      report = alternating_optimize(initial, worst, options);
      break;
    case Scheme::S1_NonRobust: {
      const JammerStrategy nominal = fixed_jammer(initial_view, config.jammer_estimate);
      report = alternating_optimize(initial, nominal, options);
      // Face the worst-case jammer; the BS may re-run ZF + water-filling.
      SystemState& s = report.final_state;
      s.jammer = worst;
      report.evaluation_jammer = worst;
      report.sum_rate = safeguarded_beamform(s, sum_rate(s));
      report.sinr = sinrs(s);
      for (std::size_t k = 0; k < report.sinr.size(); ++k)
        report.rate[k] = std::log2(1.0 + report.sinr[k]);
      break;
    }
    case Scheme::S2_UniformOptPhase:
      report = alternating_optimize(initial, worst, options, true, false);
      break;
    case Scheme::S3_UniformRandomPhase:
      report = alternating_optimize(initial, worst, options, false, false);
      break;
  }
  report.scheme = scheme;
  report.times.jammer += jammer_time;

  if (options.reoptimize_jammer_after) {
    t0 = Clock::now();
    const JammerObjective view = jammer_objective(report.final_state);
    const JammerStrategy residual = optimize_jammer(view, config.jammer_estimate,
                                                    config.uncertainty_radius, options.jammer);
    SystemState probe = report.final_state;
    probe.jammer = residual;
    report.residual_jammer = residual;
    report.residual_sum_rate = sum_rate(probe);
    report.times.jammer += seconds_since(t0);
  }
  report.times.total = seconds_since(start);
  spdlog::debug("{} seed {}: {:.4f} bits/s/Hz after {} iterations", scheme_name(scheme),
                config.seed, report.sum_rate, report.iterations);
  return report;
}

RunReport run_scheme(Scheme scheme, const SystemConfig& config, const OptimizerOptions& options) {
  return run_scheme(scheme, Scenario::build(config), options);
}

RunReport alternating_optimize(const SystemConfig& config, const OptimizerOptions& options) {
  return run_scheme(Scheme::Proposed, config, options);
}

// ---------------------------------------------------------------------------

namespace {

template <typename F>
double best_time(F&& body, int repeats) {
  double best = std::numeric_limits<double>::infinity();
  constexpr int batches = 5;
  for (int b = 0; b < batches; ++b) {
    const auto t0 = Clock::now();
    for (int r = 0; r < repeats; ++r) body();
    best = std::min(best, seconds_since(t0) / repeats);
  }
  return best;
}

SystemState prepared_state(const SystemConfig& config) {
  SystemState state = initial_state(Scenario::build(config));
  state.jammer = fixed_jammer(jammer_objective(state), config.jammer_estimate);
  state.beams = beamform_update(state);
  return state;
}

}  // namespace

std::vector<TimingRow> complexity_probe(const SystemConfig& config,
                                        const std::vector<double>& q_values, int repeats) {
  const SystemState state = prepared_state(config);
  const GainField gain = net_marginal_gain(state);
  const std::vector<double> areas = state.density.areas();
  std::vector<TimingRow> rows;
  for (double q : q_values) {
    volatile double sink = 0.0;
    const double t = best_time(
        [&] { sink = sink + dt_ara_bisection(gain.g, areas, q, config.max_density).tau; },
        repeats);
    rows.push_back({q, t});
  }
  return rows;
}

std::vector<TimingRow> gain_field_timing(const SystemConfig& config,
                                         const std::vector<int>& grid_sizes, int repeats) {
  std::vector<TimingRow> rows;
  for (int n : grid_sizes) {
    SystemConfig c = config;
    c.grid_nx = n;
    c.grid_ny = n;
    // Keep the budget feasible on every grid.
    c.uav_count = std::min(c.uav_count, c.density_capacity());
    const SystemState state = prepared_state(c);
    volatile double sink = 0.0;
    const double t = best_time([&] { sink = sink + net_marginal_gain(state).g.front(); }, repeats);
    rows.push_back({static_cast<double>(n * n), t});
  }
  return rows;
}

}  // namespace aris
