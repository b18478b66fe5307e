#pragma once

#include <optional>
#include <vector>

#include "aris/objective.hpp"
#include "aris/state.hpp"

namespace aris {

/// Euclidean gradient of the sum-rate with respect to every theta_n(x), under
/// the convention dR = sum_{c,n} 2 Re(conj(grad(n,c)) dtheta(n,c)) area_c.
/// The state's beamformers and jammer are held fixed.
CMatrix euclidean_gradient(const SystemState& state);
CMatrix euclidean_gradient(const GradientWorkspace& ws, const PhaseField& theta,
                           const DensityField& rho, RateModel model);

/// xi = g - Re(g conj(theta)) theta, entrywise.
CMatrix tangent_project(const PhaseField& theta, const CMatrix& g);

/// Entrywise (theta + step xi) / |theta + step xi|; nullopt when any entry
/// would have modulus below 1e-12.
std::optional<PhaseField> retract(const PhaseField& theta, const CMatrix& xi, double step);

/// Area-weighted L2 norm sqrt(sum_c area_c sum_n |xi(n,c)|^2).
double riemannian_norm(const CMatrix& xi, const std::vector<double>& areas);

/// max |Re(xi conj(theta))| over all entries.
double tangency_residual(const PhaseField& theta, const CMatrix& xi);

struct PhaseOptions {
  /// Initial step, measured as the largest per-entry displacement (the
  /// tangent direction is scaled to unit sup-norm before stepping).
  double initial_step = 1.0;
  double backtrack_factor = 0.5;
  int max_halvings = 30;
  /// Stop when the Riemannian gradient norm < tol * (1 + |R|).
  double tolerance = 1e-5;
  int max_iterations = 500;
  /// Search along Polak-Ribiere+ conjugate directions instead of the plain
  /// Riemannian gradient.
  bool conjugate = true;
  /// Drop the conjugate memory every this many iterations (0: never).
  int restart_every = 0;
  /// When > 0, replaces the conjugate directions by limited-memory BFGS in
  /// the phase angles (theta = exp(i phi)) keeping this many pairs; steps
  /// then retract by the exponential map.
  int lbfgs_memory = 10;
  /// Start each backtracking search from twice the last accepted step and
  /// expand while the sum-rate keeps improving.
  bool warm_start = true;
  RateModel model = RateModel::ZeroForcing;
};

struct PhaseResult {
  PhaseField phases;
  std::vector<double> trace;  // sum-rate after every accepted step, trace[0] = start
  int iterations = 0;
  bool converged = false;      // gradient-norm test met
  bool stalled = false;        // max_halvings exhausted without improvement
  bool hit_max_iterations = false;
  double final_gradient_norm = 0.0;
  double max_modulus_deviation = 0.0;  // worst over all accepted iterates
  double max_tangency_residual = 0.0;  // worst over all projected gradients
};

/// Riemannian gradient ascent on the product of unit circles with
/// backtracking: a step is accepted iff the sum-rate strictly increases.
PhaseResult optimize_phases(const SystemState& state, const PhaseOptions& options = {});

}  // namespace aris
