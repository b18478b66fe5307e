#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "aris/fields.hpp"

namespace aris {

/// Raised when the effective channel is too ill-conditioned for ZF.
class SingularChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero-forcing directions with unit-norm columns. gains(k) is the effective
/// amplitude |h_eff,k^H w_k| = 1 / |raw pseudoinverse column k|.
struct ZeroForcing {
  CMatrix directions;  // M x K
  Eigen::VectorXd gains;
};

/// W = H^H (H H^H)^-1 Gamma with Gamma normalizing every column to unit norm.
/// Throws SingularChannelError when cond(H) >= max_condition.
ZeroForcing zf_matrix(const CMatrix& h_eff, double max_condition = 1e8);

struct WaterFilling {
  std::vector<double> powers;
  double water_level = 0.0;
};

/// p_k = [eta - level_k]^+ with sum p_k = total, by sort and scan.
WaterFilling water_fill(std::span<const double> levels, double total);

/// Precoders w_k = sqrt(p_k) w~_k plus the allocation that produced them.
struct BeamformSet {
  CMatrix w;  // M x K
  Eigen::VectorXd powers;
  double water_level = 0.0;

  double total_power() const { return w.squaredNorm(); }
};

BeamformSet compose_beamformers(const ZeroForcing& zf, const WaterFilling& allocation);

/// ZF + water-filling against the given per-user interference-plus-noise
/// powers |h_eff,J,k|^2 P_J + sigma^2. The water-filling levels are those
/// powers divided by the squared ZF gains, so that p_k gains_k^2 / level is
/// the exact SINR under unit-norm ZF columns.
BeamformSet zf_water_filling(const CMatrix& h_eff, std::span<const double> interference_noise,
                             double power_budget);

}  // namespace aris
