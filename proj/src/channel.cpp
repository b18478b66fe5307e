#include "aris/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aris {

CVector array_response(double angle, int count, double spacing) {
  CVector a(count);
  const double step = 2.0 * std::numbers::pi * spacing * std::sin(angle);
  // Phasor recurrence; re-anchored every 32 elements to bound rounding drift.
  const cd rotation = std::polar(1.0, step);
  for (int m = 0; m < count; ++m)
    a(m) = (m % 32 == 0) ? std::polar(1.0, step * m) : a(m - 1) * rotation;
  return a;
}

double path_loss(double distance, double alpha, double beta) {
  if (!(distance > 0.0))
    throw std::domain_error("path_loss: distance must be positive, got " +
                            std::to_string(distance));
  return beta * std::pow(distance, -alpha);
}

double link_angle(const Vec3& from, const Vec3& to) {
  const Vec3 delta = to - from;
  const double distance = delta.norm();
  if (distance == 0.0) return 0.0;
  return std::asin(std::min(1.0, delta.head<2>().norm() / distance));
}

CMatrix synth_rician(const CMatrix& los, double kappa, double distance, double alpha,
                     double beta, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CMatrix nlos(los.rows(), los.cols());
  for (Eigen::Index col = 0; col < nlos.cols(); ++col)
    for (Eigen::Index row = 0; row < nlos.rows(); ++row) {
      const double re = normal(rng);
      const double im = normal(rng);
      nlos(row, col) = cd(re, im);
    }
  const double amplitude = std::sqrt(path_loss(distance, alpha, beta));
  return amplitude * (std::sqrt(kappa / (kappa + 1.0)) * los + std::sqrt(1.0 / (kappa + 1.0)) * nlos);
}

// ---------------------------------------------------------------------------

ChannelSet::ChannelSet(std::vector<CellChannels> cells, std::uint64_t seed)
    : cells_(std::move(cells)), seed_(seed) {}

int ChannelSet::elements() const {
  return cells_.empty() ? 0 : static_cast<int>(cells_.front().bs_to_ris.rows());
}
int ChannelSet::bs_antennas() const {
  return cells_.empty() ? 0 : static_cast<int>(cells_.front().bs_to_ris.cols());
}
int ChannelSet::users() const {
  return cells_.empty() ? 0 : static_cast<int>(cells_.front().ris_to_users.cols());
}

JammerLinkModel::JammerLinkModel(std::vector<Vec3> cell_positions, double jammer_altitude,
                                 double alpha, double beta, int elements, int antennas,
                                 double spacing)
    : cell_positions_(std::move(cell_positions)),
      jammer_altitude_(jammer_altitude),
      alpha_(alpha),
      beta_(beta),
      elements_(elements),
      antennas_(antennas),
      spacing_(spacing) {}

JammerLink JammerLinkModel::link(std::size_t cell, const Vec2& jammer) const {
  const Vec3 j(jammer.x(), jammer.y(), jammer_altitude_);
  const Vec3& x = cell_positions_[cell];
  const double distance = (x - j).norm();
  const double angle = link_angle(j, x);
  JammerLink out;
  out.amplitude = std::sqrt(path_loss(distance, alpha_, beta_));
  out.receive = array_response(angle, elements_, spacing_);
  out.transmit = array_response(angle, antennas_, spacing_);
  return out;
}

CMatrix JammerLinkModel::matrix(std::size_t cell, const Vec2& jammer) const {
  const JammerLink l = link(cell, jammer);
  return l.amplitude * l.receive * l.transmit.adjoint();
}

GeneratedChannels generate_channels(const SystemConfig& config, const Grid& grid) {
  const RandomStreams streams(config.seed);
  const auto users = resolve_user_positions(config);
  const Vec3 bs(config.bs_position.x(), config.bs_position.y(), config.bs_altitude);
  const int n = config.ris_elements;
  const int m = config.bs_antennas;
  const int k_users = config.users;
  const double spacing = config.element_spacing;

  std::vector<CellChannels> cells(grid.size());
  std::vector<Vec3> positions(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const Vec3 x(grid[c].center.x(), grid[c].center.y(), config.uav_altitude);
    positions[c] = x;
    auto rng = streams.stream("channel", c);

    const double angle_bs = link_angle(bs, x);
    const CMatrix los_bs =
        array_response(angle_bs, n, spacing) * array_response(angle_bs, m, spacing).adjoint();
    CellChannels cell;
    cell.cell = c;
    cell.bs_to_ris = synth_rician(los_bs, config.rician_factor, (x - bs).norm(),
                                  config.path_loss_exponent, config.reference_gain, rng);
    cell.ris_to_users.resize(n, k_users);
    for (int k = 0; k < k_users; ++k) {
      const Vec3 u(users[k].x(), users[k].y(), config.user_altitude);
      const CMatrix los_u = array_response(link_angle(x, u), n, spacing);
      cell.ris_to_users.col(k) = synth_rician(los_u, config.rician_factor, (u - x).norm(),
                                              config.path_loss_exponent, config.reference_gain,
                                              rng);
    }
    cells[c] = std::move(cell);
  }
  return {ChannelSet(std::move(cells), config.seed),
          JammerLinkModel(std::move(positions), config.jammer_altitude, config.path_loss_exponent,
                          config.reference_gain, n, config.jammer_antennas, spacing)};
}

// ---------------------------------------------------------------------------

void require_same_grid(const PhaseField& theta, const DensityField& rho,
                       const ChannelSet& channels) {
  if (theta.cells() != rho.cells() || rho.cells() != channels.size())
    throw GridMismatch("fields are defined on different grids (theta " +
                       std::to_string(theta.cells()) + ", rho " + std::to_string(rho.cells()) +
                       ", channels " + std::to_string(channels.size()) + " cells)");
  if (channels.size() > 0 && static_cast<int>(theta.elements()) != channels.elements())
    throw GridMismatch("phase field element count does not match the channels");
}

CRowVector effective_bs_channel(const PhaseField& theta, const DensityField& rho,
                                const ChannelSet& channels, std::size_t k) {
  require_same_grid(theta, rho, channels);
  CRowVector out = CRowVector::Zero(channels.bs_antennas());
  const auto kk = static_cast<Eigen::Index>(k);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const double mass = rho.mass(c);
    if (mass == 0.0) continue;
    const CellChannels& ch = channels[c];
    // h^H Theta H = (conj(h) .* theta)^T H
    const CVector weights = ch.ris_to_users.col(kk).conjugate().cwiseProduct(theta.column(c));
    out += mass * (weights.transpose() * ch.bs_to_ris);
  }
  return out;
}

CMatrix effective_bs_matrix(const PhaseField& theta, const DensityField& rho,
                            const ChannelSet& channels) {
  require_same_grid(theta, rho, channels);
  CMatrix out = CMatrix::Zero(channels.users(), channels.bs_antennas());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const double mass = rho.mass(c);
    if (mass == 0.0) continue;
    const CellChannels& ch = channels[c];
    // Row k is (conj(h_k) .* theta)^T H_BU.
    const CMatrix weights =
        (ch.ris_to_users.conjugate().array().colwise() * theta.column(c).array()).matrix();
    out.noalias() += mass * (weights.transpose() * ch.bs_to_ris);
  }
  return out;
}

cd effective_jam_channel(const PhaseField& theta, const DensityField& rho,
                         const ChannelSet& channels, const JammerLinkModel& jammer_link,
                         const Vec2& jammer, const CVector& v, std::size_t k) {
  require_same_grid(theta, rho, channels);
  if (std::abs(v.norm() - 1.0) > 1e-9)
    throw ContractViolation("jammer beamformer must have unit norm, got " +
                            std::to_string(v.norm()));
  const auto kk = static_cast<Eigen::Index>(k);
  cd total{0.0, 0.0};
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const double mass = rho.mass(c);
    if (mass == 0.0) continue;
    const JammerLink link = jammer_link.link(c, jammer);
    // sum_n conj(h_n) theta_n a_n
    const cd reflect = channels[c]
                           .ris_to_users.col(kk)
                           .conjugate()
                           .cwiseProduct(theta.column(c))
                           .cwiseProduct(link.receive)
                           .sum();
    total += mass * link.amplitude * reflect * link.transmit.dot(v);
  }
  return total;
}

}  // namespace aris
