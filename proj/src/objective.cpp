#include "aris/objective.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace aris {

GradientWorkspace::GradientWorkspace(const SystemState& state)
    : users_(state.users()),
      antennas_(static_cast<std::size_t>(state.config().bs_antennas)),
      jam_power_(state.config().jam_power),
      noise_power_(state.config().noise_power),
      bs_power_(state.config().bs_power),
      cells_(state.scenario->channels.size()),
      elements_(static_cast<std::size_t>(state.config().ris_elements)),
      w_(state.beams.w) {
  const Scenario& s = *state.scenario;
  const auto n = static_cast<Eigen::Index>(elements_);
  const auto rows = static_cast<Eigen::Index>(cells_) * n;
  bs_to_ris_.resize(rows, static_cast<Eigen::Index>(antennas_));
  users_conj_.resize(rows, static_cast<Eigen::Index>(users_));
  jam_steering_.resize(rows);
  const CVector& v = state.jammer.beamformer;
  for (std::size_t c = 0; c < cells_; ++c) {
    const auto r0 = static_cast<Eigen::Index>(c) * n;
    const CellChannels& ch = s.channels[c];
    bs_to_ris_.middleRows(r0, n) = ch.bs_to_ris;
    users_conj_.middleRows(r0, n) = ch.ris_to_users.conjugate();
    const JammerLink link = s.jammer_link.link(c, state.jammer.position);
    jam_steering_.segment(r0, n) = (link.amplitude * link.transmit.dot(v)) * link.receive;
  }
}

GradientWorkspace::Aggregates GradientWorkspace::aggregate(const PhaseField& theta,
                                                           const DensityField& rho) const {
  const auto n = static_cast<Eigen::Index>(elements_);
  CVector weighted(users_conj_.rows());
  for (std::size_t c = 0; c < cells_; ++c)
    weighted.segment(static_cast<Eigen::Index>(c) * n, n) = rho.mass(c) * theta.column(c);
  const CMatrix x = (users_conj_.array().colwise() * weighted.array()).matrix();
  Aggregates a;
  a.h_eff.noalias() = x.transpose() * bs_to_ris_;
  a.z_jam.noalias() = x.transpose() * jam_steering_;
  return a;
}

namespace {

struct ZfTerms {
  bool valid = false;
  CMatrix gram_inv;   // (H H^H)^-1
  CMatrix raw;        // H^H (H H^H)^-1
  std::vector<double> interference;  // c_k
  std::vector<double> levels;        // c_k [(H H^H)^-1]_kk
  WaterFilling allocation;
};

ZfTerms zf_terms(const CMatrix& h, const CVector& z_jam, double p_jam, double noise,
                 double budget, bool equal_power) {
  ZfTerms t;
  const Eigen::Index k_users = h.rows();
  const CMatrix gram = h * h.adjoint();
  const Eigen::LDLT<CMatrix> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return t;
  t.gram_inv = ldlt.solve(CMatrix::Identity(k_users, k_users));
  if (!t.gram_inv.allFinite()) return t;
  t.raw = h.adjoint() * t.gram_inv;
  t.interference.resize(static_cast<std::size_t>(k_users));
  t.levels.resize(static_cast<std::size_t>(k_users));
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double norm2 = t.raw.col(k).squaredNorm();
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) return t;
    t.interference[kk] = p_jam * std::norm(z_jam(k)) + noise;
    t.levels[kk] = t.interference[kk] * norm2;
  }
  if (equal_power) {
    t.allocation.powers.assign(t.levels.size(), budget / static_cast<double>(k_users));
  } else {
    t.allocation = water_fill(t.levels, budget);
  }
  t.valid = true;
  return t;
}

}  // namespace

double GradientWorkspace::sum_rate(const Aggregates& a, RateModel model) const {
  if (model != RateModel::FixedBeamformers) {
    const ZfTerms t = zf_terms(a.h_eff, a.z_jam, jam_power_, noise_power_, bs_power_,
                               model == RateModel::LogSinr);
    if (!t.valid) return -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (std::size_t k = 0; k < users_; ++k) {
      const double snr = t.allocation.powers[k] / t.levels[k];
      total += model == RateModel::LogSinr ? std::log2(snr) : std::log2(1.0 + snr);
    }
    return total;
  }
  const CMatrix z = a.h_eff * w_;
  double total = 0.0;
  for (Eigen::Index k = 0; k < z.rows(); ++k) {
    const double signal = std::norm(z(k, k));
    const double leakage = z.row(k).squaredNorm() - signal;
    const double d = std::max(leakage, 0.0) + jam_power_ * std::norm(a.z_jam(k)) + noise_power_;
    total += std::log2(1.0 + signal / d);
  }
  return total;
}

double GradientWorkspace::sum_rate(const PhaseField& theta, const DensityField& rho,
                                   RateModel model) const {
  return sum_rate(aggregate(theta, rho), model);
}

GradientWorkspace::Sensitivity GradientWorkspace::sensitivity(const Aggregates& a,
                                                              RateModel model) const {
  return model == RateModel::FixedBeamformers ? fixed_sensitivity(a) : zf_sensitivity(a, model);
}

GradientWorkspace::Sensitivity GradientWorkspace::fixed_sensitivity(const Aggregates& a) const {
  const auto k_users = static_cast<Eigen::Index>(users_);
  const auto m = static_cast<Eigen::Index>(antennas_);
  const CMatrix z = a.h_eff * w_;  // z(k, i) = h_eff,k w_i
  Sensitivity s;
  s.bs_weight = CVector::Zero(k_users * m);
  s.jam_weight.resize(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double signal = std::norm(z(k, k));
    const double leakage = std::max(z.row(k).squaredNorm() - signal, 0.0);
    const double d = leakage + jam_power_ * std::norm(a.z_jam(k)) + noise_power_;
    const double gamma = signal / d;
    const double scale = 1.0 / ((1.0 + gamma) * std::numbers::ln2);
    // d gamma = d|z_kk|^2 / D - S dD / D^2, d|z|^2 = 2 Re(conj(z) dz).
    const double own = scale / d;
    const double cross = -scale * signal / (d * d);
    // dz(k, i) = dH_k w_i, so the weight on dH(k, m) is sum_i c_ki conj(z_ki) w_i[m].
    CVector row_weight = CVector::Zero(m);
    for (Eigen::Index i = 0; i < k_users; ++i)
      row_weight += ((i == k ? own : cross) * std::conj(z(k, i))) * w_.col(i);
    s.bs_weight.segment(k * m, m) = row_weight;
    s.jam_weight(k) = cross * jam_power_ * std::conj(a.z_jam(k));
  }
  return s;
}

GradientWorkspace::Sensitivity GradientWorkspace::zf_sensitivity(const Aggregates& a,
                                                                 RateModel model) const {
  const auto k_users = static_cast<Eigen::Index>(users_);
  const auto m = static_cast<Eigen::Index>(antennas_);
  Sensitivity s;
  s.bs_weight = CVector::Zero(k_users * m);
  s.jam_weight = CVector::Zero(k_users);
  const ZfTerms t = zf_terms(a.h_eff, a.z_jam, jam_power_, noise_power_, bs_power_,
                             model == RateModel::LogSinr);
  if (!t.valid) return s;
  // R = sum_k log2(1 + p_k / l_k) with water-filled p; by the envelope
  // theorem dR = sum_k omega_k dl_k, omega_k = -p_k / (ln2 l_k (l_k + p_k)).
  // For sum_k log2(p_k / l_k) at constant p, omega_k = -1 / (ln2 l_k).
  // l_k = c_k Ginv_kk, dGinv_kk = -2 Re(sum_j conj(Ginv_jk) dH_j u_k),
  // u_k = column k of H^H Ginv, dc_k = 2 P_J Re(conj(z_J,k) dz_J,k).
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    const double p = t.allocation.powers[kk];
    if (p <= 0.0) continue;
    const double level = t.levels[kk];
    const double omega = model == RateModel::LogSinr
                             ? -1.0 / (std::numbers::ln2 * level)
                             : -p / (std::numbers::ln2 * level * (level + p));
    const double ginv_kk = t.raw.col(k).squaredNorm();
    for (Eigen::Index j = 0; j < k_users; ++j)
      s.bs_weight.segment(j * m, m) +=
          (-omega * t.interference[kk] * std::conj(t.gram_inv(j, k))) * t.raw.col(k);
    s.jam_weight(k) = omega * ginv_kk * jam_power_ * std::conj(a.z_jam(k));
  }
  return s;
}

CMatrix GradientWorkspace::cell_sensitivity(const Sensitivity& s) const {
  const auto k_users = static_cast<Eigen::Index>(users_);
  const auto m = static_cast<Eigen::Index>(antennas_);
  const Eigen::Map<const CMatrix> b(s.bs_weight.data(), m, k_users);
  CMatrix per_user = bs_to_ris_ * b;
  per_user.noalias() += jam_steering_ * s.jam_weight.transpose();
  const CVector u = users_conj_.cwiseProduct(per_user).rowwise().sum();
  return Eigen::Map<const CMatrix>(u.data(), static_cast<Eigen::Index>(elements_),
                                   static_cast<Eigen::Index>(cells_));
}

}  // namespace aris
