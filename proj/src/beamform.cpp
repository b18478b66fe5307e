#include "aris/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SVD>

namespace aris {

ZeroForcing zf_matrix(const CMatrix& h_eff, double max_condition) {
  const Eigen::Index k_users = h_eff.rows();
  if (k_users > h_eff.cols())
    throw SingularChannelError("zero-forcing needs K <= M (K=" + std::to_string(k_users) +
                               ", M=" + std::to_string(h_eff.cols()) + ")");
  const Eigen::JacobiSVD<CMatrix> svd(h_eff);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smallest = s(k_users - 1);
  if (!(smallest > 0.0) || s(0) / smallest >= max_condition)
    throw SingularChannelError(
        "effective channel is rank deficient (condition number " +
        std::to_string(smallest > 0.0 ? s(0) / smallest : INFINITY) +
        "); consider a regularized precoder or a different deployment");

  const CMatrix gram = h_eff * h_eff.adjoint();
  const CMatrix raw = h_eff.adjoint() * gram.ldlt().solve(CMatrix::Identity(k_users, k_users));
  ZeroForcing out;
  out.directions.resize(h_eff.cols(), k_users);
  out.gains.resize(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double norm = raw.col(k).norm();
    out.directions.col(k) = raw.col(k) / norm;
    out.gains(k) = 1.0 / norm;
  }
  return out;
}

WaterFilling water_fill(std::span<const double> levels, double total) {
  const std::size_t n = levels.size();
  WaterFilling out;
  out.powers.assign(n, 0.0);
  if (n == 0) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return levels[a] < levels[b]; });

  // Largest active set whose water level clears its highest floor.
  double prefix = 0.0;
  std::size_t active = 0;
  double level = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prefix += levels[order[i]];
    const double candidate = (total + prefix) / static_cast<double>(i + 1);
    if (candidate > levels[order[i]]) {
      active = i + 1;
      level = candidate;
    } else {
      break;
    }
  }
  out.water_level = level;
  double used = 0.0;
  for (std::size_t i = 0; i < active; ++i) {
    const double p = std::max(level - levels[order[i]], 0.0);
    out.powers[order[i]] = p;
    used += p;
  }
  // Put the rounding residue on the strongest user so the budget is exact.
  if (active > 0 && used > 0.0) out.powers[order[0]] += total - used;
  return out;
}

BeamformSet compose_beamformers(const ZeroForcing& zf, const WaterFilling& allocation) {
  BeamformSet out;
  const auto k_users = static_cast<Eigen::Index>(allocation.powers.size());
  out.w.resize(zf.directions.rows(), k_users);
  out.powers.resize(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double p = std::max(allocation.powers[static_cast<std::size_t>(k)], 0.0);
    out.powers(k) = p;
    out.w.col(k) = std::sqrt(p) * zf.directions.col(k);
  }
  out.water_level = allocation.water_level;
  return out;
}

BeamformSet zf_water_filling(const CMatrix& h_eff, std::span<const double> interference_noise,
                             double power_budget) {
  const ZeroForcing zf = zf_matrix(h_eff);
  std::vector<double> levels(interference_noise.size());
  for (std::size_t k = 0; k < levels.size(); ++k)
    levels[k] = interference_noise[k] / (zf.gains(static_cast<Eigen::Index>(k)) *
                                         zf.gains(static_cast<Eigen::Index>(k)));
  return compose_beamformers(zf, water_fill(levels, power_budget));
}

}  // namespace aris
