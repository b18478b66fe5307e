#pragma once

#include <vector>

#include "aris/beamform.hpp"
#include "aris/state.hpp"

namespace aris {

/// Which sum-rate a phase or density step differentiates.
enum class RateModel {
  /// Beamformers held at the state's w (inter-user leakage included).
  FixedBeamformers,
  /// Beamformers re-derived by ZF + water-filling for every (theta, rho), so
  /// the objective is the rate the BS actually achieves after adapting.
  ZeroForcing,
  /// sum_k log2(SINR_k) under ZF with the budget split equally: the high-SINR
  /// form of the rate. Its gradient -dl_k / (ln2 l_k) does not fade for users
  /// that are jammed far below unit SINR or switched off by water-filling.
  LogSinr,
};

/// Sum-rate evaluation and differentiation for a fixed jammer.
///
/// H_eff[k, :] = sum_c mass_c (conj(h_U,k) .* theta_c)^T H_BU,c and
/// z_J[k] = sum_c mass_c (conj(h_U,k) .* theta_c)^T (H_JU,c v), so every
/// sum-rate differential is linear in the per-cell, per-element products
/// conj(h_U,k[n]) H_BU[n, m] and conj(h_U,k[n]) (H_JU v)[n]. The phase
/// gradient and the net marginal gain are two contractions of the same
/// per-cell sensitivity.
class GradientWorkspace {
 public:
  explicit GradientWorkspace(const SystemState& state);

  std::size_t users() const { return users_; }
  std::size_t antennas() const { return antennas_; }
  std::size_t cells() const { return cells_; }
  std::size_t elements() const { return elements_; }
  const CMatrix& beamformers() const { return w_; }

  struct Aggregates {
    CMatrix h_eff;  // K x M
    CVector z_jam;  // K
  };
  Aggregates aggregate(const PhaseField& theta, const DensityField& rho) const;

  /// Sum-rate of the aggregates under the chosen model.
  double sum_rate(const Aggregates& a, RateModel model) const;
  double sum_rate(const PhaseField& theta, const DensityField& rho, RateModel model) const;

  /// Weights such that dR = 2 Re(bs_weight^T d vec(H_eff) + jam_weight^T dz_J),
  /// with vec index k*M + m.
  struct Sensitivity {
    CVector bs_weight;   // K*M
    CVector jam_weight;  // K
  };
  Sensitivity sensitivity(const Aggregates& a, RateModel model) const;

  /// u_c[n] = sum_k conj(h_U,k[n]) ((H_BU,c B)[n, k] + (H_JU,c v)[n] jam_weight[k])
  /// with B[m, k] = bs_weight[k*M + m], so dR = 2 Re sum_c mass_c u_c^T dtheta_c.
  /// Returned as an N x cells matrix.
  CMatrix cell_sensitivity(const Sensitivity& s) const;

  double jam_power() const { return jam_power_; }
  double noise_power() const { return noise_power_; }
  double bs_power() const { return bs_power_; }

 private:
  Sensitivity fixed_sensitivity(const Aggregates& a) const;
  Sensitivity zf_sensitivity(const Aggregates& a, RateModel model) const;

  std::size_t users_ = 0;
  std::size_t antennas_ = 0;
  double jam_power_ = 0.0;
  double noise_power_ = 0.0;
  double bs_power_ = 0.0;
  std::size_t cells_ = 0;
  std::size_t elements_ = 0;
  CMatrix w_;
  // All cells stacked, row c*N + n.
  CMatrix bs_to_ris_;    // H_BU rows, (cells*N) x M
  CMatrix users_conj_;   // conj(h_U,k[n]), (cells*N) x K
  CVector jam_steering_; // (H_JU v)[n], cells*N
};

}  // namespace aris
