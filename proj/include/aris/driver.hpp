#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aris/density.hpp"
#include "aris/jammer.hpp"
#include "aris/ris.hpp"
#include "aris/state.hpp"

namespace aris {

enum class Scheme { Proposed, S1_NonRobust, S2_UniformOptPhase, S3_UniformRandomPhase };

std::string_view scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);
const std::vector<Scheme>& all_schemes();

enum class DensityRule { Sort, Bisection };

struct OptimizerOptions {
  int max_outer = 20;
  double convergence_tol = 1e-3;  // bits/s/Hz
  PhaseOptions phase;
  JammerOptions jammer;
  DensityRule density_rule = DensityRule::Sort;
  double bisection_tol = 1e-10;
  /// The DT-ARA target is approached along rho + t (target - rho) with
  /// t = 1, 1/2, ... until the sum-rate does not drop.
  int density_backtracks = 30;
  /// Re-run the jammer search on the converged defence and report the
  /// residual sum-rate.
  bool reoptimize_jammer_after = false;
  /// Leading outer iterations whose phase step ascends the log-SINR form
  /// (RateModel::LogSinr) instead of the water-filled rate. Zero-forcing
  /// model only; the outer loop still accepts by the true sum-rate.
  int log_sinr_warmup = 1;
  /// Also try the full DT-ARA allocation with the phases re-optimized for it
  /// (a log-SINR round, then the configured model). Phases tuned to the old
  /// density lose their coherence when the swarm moves, so without this the
  /// bang-bang target is almost never accepted.
  bool adapt_phases_to_density = true;
};

struct StageRecord {
  int iteration = 0;
  double after_beamform = 0.0;
  double after_phase = 0.0;
  double after_density = 0.0;
  int phase_iterations = 0;
  double density_step = 0.0;  // accepted convex-combination weight, 0 = rejected
};

/// Wall-clock seconds per stage (never written to the deterministic outputs).
struct StageTimes {
  double jammer = 0.0;
  double beamform = 0.0;
  double phase = 0.0;
  double density = 0.0;
  double total = 0.0;
};

/// Worst observed invariant residuals during a run.
struct InvariantLog {
  double max_modulus_deviation = 0.0;
  double max_tangency_residual = 0.0;
  double max_zf_leakage = 0.0;   // sum_{i != k} |h_k w~_i|^2 / |h_k w~_k|^2
  double max_budget_error = 0.0; // |integral rho - Q| / Q
  double max_power_excess = 0.0; // sum ||w_k||^2 - P_B
  double max_trace_drop = 0.0;   // largest decrease between consecutive stages
};

struct RunReport {
  Scheme scheme = Scheme::Proposed;
  /// trace[0] is the initial state after ZF + water-filling, trace[t] the
  /// sum-rate after outer iteration t.
  std::vector<double> trace;
  std::vector<StageRecord> stages;
  bool converged = false;
  int iterations = 0;

  /// The defence's final state (w re-optimized against the evaluation jammer).
  SystemState final_state;
  /// The jammer the defence was optimized against.
  JammerStrategy design_jammer;
  /// The jammer the reported sum-rate is measured against.
  JammerStrategy evaluation_jammer;
  double sum_rate = 0.0;
  std::vector<double> sinr;
  std::vector<double> rate;

  std::optional<JammerStrategy> residual_jammer;
  std::optional<double> residual_sum_rate;

  StageTimes times;
  InvariantLog invariants;
};

/// Algorithm loop: beamform -> phase -> density until the outer sum-rate
/// changes by less than convergence_tol or max_outer is reached. Each block
/// update is kept only if it does not lower the sum-rate. The phase and
/// density blocks can be switched off (benchmark schemes).
RunReport alternating_optimize(SystemState state, const JammerStrategy& jammer,
                               const OptimizerOptions& options, bool with_phases = true,
                               bool with_density = true);

/// Full proposed scheme for a config.
RunReport alternating_optimize(const SystemConfig& config, const OptimizerOptions& options = {});

/// Runs one scheme. All schemes share the initial state (uniform density,
/// seeded random phases) and are evaluated against the worst-case jammer of
/// that initial state, with a final safeguarded ZF + water-filling step
/// against the evaluation jammer.
RunReport run_scheme(Scheme scheme, const SystemConfig& config,
                     const OptimizerOptions& options = {});
RunReport run_scheme(Scheme scheme, std::shared_ptr<const Scenario> scenario,
                     const OptimizerOptions& options = {});

/// One DT-ARA density step on a state (used by the loop and the CLI).
struct DensityStep {
  DensityField density;
  DensityField target;  // the DT-ARA allocation itself
  GainField gain;
  double tau = 0.0;
  double step = 0.0;
  double sum_rate = 0.0;
};
DensityStep density_update(const SystemState& state, const OptimizerOptions& options);

struct TimingRow {
  double parameter = 0.0;  // Q or number of cells
  double seconds = 0.0;    // best-of-batches time per call
};

/// DT-ARA bisection time per Q on the config's grid (gain field from the
/// config's initial state).
std::vector<TimingRow> complexity_probe(const SystemConfig& config,
                                        const std::vector<double>& q_values, int repeats = 200);

/// Net-marginal-gain evaluation time for square grids of the given sizes.
std::vector<TimingRow> gain_field_timing(const SystemConfig& config,
                                         const std::vector<int>& grid_sizes, int repeats = 5);

}  // namespace aris
