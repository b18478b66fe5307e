#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aris/objective.hpp"
#include "aris/state.hpp"

namespace aris {

/// Net marginal gain per cell plus the response functions it was built from.
struct GainField {
  std::vector<double> g;
  /// f(c, k) = h_U,k^H Theta H_BU w_k and jam(c, k) = h_U,k^H Theta H_JU v at
  /// each cell center (cells x K); filled by the state overload only.
  CMatrix signal_response;
  CMatrix jam_response;
};

/// (f_k, g_k) at one cell.
std::pair<cd, cd> response_functions(const SystemState& state, std::size_t cell, std::size_t k);

/// G(c) = dR / d rho(c) with beamformers, phases and jammer frozen. At
/// zero-forcing states this equals
///   sum_k (2/ln2) [Re(z_B,k* f_k) - P_J gamma_k Re(z_J,k* g_k)] / (|z_B,k|^2 + c_k);
/// elsewhere the inter-user leakage terms are differentiated too.
GainField net_marginal_gain(const SystemState& state);
/// Gain field only (no response functions) for either rate model.
GainField net_marginal_gain(const GradientWorkspace& ws, const PhaseField& theta,
                            const DensityField& rho, RateModel model);

struct DtAraResult {
  DensityField density;
  double tau = 0.0;
  /// The one cell strictly between 0 and rho_max, if any.
  std::optional<std::size_t> fractional_cell;
};

/// Exact allocation: cells sorted by G descending (ties by lowest index) are
/// filled to rho_max until the budget q is spent.
DtAraResult dt_ara(const std::vector<double>& gain, const std::vector<double>& areas, double q,
                   double rho_max);

/// Bisection on the threshold tau over [min G - 1, max G + 1] until the
/// bracket is below tol; cells inside the final bracket are filled in the
/// same order as dt_ara, so both paths agree exactly.
DtAraResult dt_ara_bisection(const std::vector<double>& gain, const std::vector<double>& areas,
                             double q, double rho_max, double tol = 1e-10);

}  // namespace aris
