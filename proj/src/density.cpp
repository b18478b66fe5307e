#include "aris/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aris {

std::pair<cd, cd> response_functions(const SystemState& state, std::size_t cell, std::size_t k) {
  const Scenario& s = *state.scenario;
  const CellChannels& ch = s.channels[cell];
  const auto kk = static_cast<Eigen::Index>(k);
  const CVector weights = ch.ris_to_users.col(kk).conjugate().cwiseProduct(state.phases.column(cell));
  const cd f = weights.transpose() * (ch.bs_to_ris * state.beams.w.col(kk));
  const JammerLink link = s.jammer_link.link(cell, state.jammer.position);
  const cd g = link.amplitude * (weights.transpose() * link.receive)(0) *
               link.transmit.dot(state.jammer.beamformer);
  return {f, g};
}

GainField net_marginal_gain(const GradientWorkspace& ws, const PhaseField& theta,
                            const DensityField& rho, RateModel model) {
  const auto sens = ws.sensitivity(ws.aggregate(theta, rho), model);
  GainField out;
  const CMatrix u = ws.cell_sensitivity(sens);
  out.g.resize(ws.cells());
  for (std::size_t c = 0; c < ws.cells(); ++c) {
    const auto cc = static_cast<Eigen::Index>(c);
    out.g[c] = 2.0 * (theta.column(c).transpose() * u.col(cc))(0).real();
  }
  return out;
}

GainField net_marginal_gain(const SystemState& state) {
  const GradientWorkspace ws(state);
  GainField out = net_marginal_gain(ws, state.phases, state.density, RateModel::FixedBeamformers);
  const auto cells = static_cast<Eigen::Index>(ws.cells());
  const auto k_users = static_cast<Eigen::Index>(ws.users());
  out.signal_response.resize(cells, k_users);
  out.jam_response.resize(cells, k_users);
  for (Eigen::Index c = 0; c < cells; ++c)
    for (Eigen::Index k = 0; k < k_users; ++k) {
      const auto [f, g] =
          response_functions(state, static_cast<std::size_t>(c), static_cast<std::size_t>(k));
      out.signal_response(c, k) = f;
      out.jam_response(c, k) = g;
    }
  return out;
}

namespace {

void check_inputs(const std::vector<double>& gain, const std::vector<double>& areas, double q,
                  double rho_max) {
  if (gain.size() != areas.size())
    throw GridMismatch("gain field and area vector differ in length");
  const double capacity = rho_max * std::accumulate(areas.begin(), areas.end(), 0.0);
  if (q < 0.0 || q > capacity * (1.0 + 1e-12))
    throw std::invalid_argument("budget " + std::to_string(q) + " outside [0, " +
                                std::to_string(capacity) + "]");
}

// Fills cells in `order` to rho_max until `budget` is spent.
void fill(const std::vector<std::size_t>& order, const std::vector<double>& areas,
          double rho_max, double budget, std::vector<double>& rho,
          std::optional<std::size_t>& fractional) {
  for (std::size_t c : order) {
    if (budget <= 0.0) break;
    const double full = rho_max * areas[c];
    if (full <= budget) {
      rho[c] = rho_max;
      budget -= full;
    } else {
      rho[c] = budget / areas[c];
      fractional = c;
      budget = 0.0;
    }
  }
}

std::vector<std::size_t> descending_order(const std::vector<double>& gain,
                                          std::vector<std::size_t> cells) {
  std::sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
    if (gain[a] != gain[b]) return gain[a] > gain[b];
    return a < b;
  });
  return cells;
}

}  // namespace

DtAraResult dt_ara(const std::vector<double>& gain, const std::vector<double>& areas, double q,
                   double rho_max) {
  check_inputs(gain, areas, q, rho_max);
  std::vector<std::size_t> all(gain.size());
  std::iota(all.begin(), all.end(), 0);
  const auto order = descending_order(gain, std::move(all));

  std::vector<double> rho(gain.size(), 0.0);
  DtAraResult out;
  fill(order, areas, rho_max, q, rho, out.fractional_cell);

  // Threshold: the marginal cell's gain, or the midpoint of the gap between
  // the last filled and first empty cell.
  if (out.fractional_cell) {
    out.tau = gain[*out.fractional_cell];
  } else {
    std::size_t filled = 0;
    while (filled < order.size() && rho[order[filled]] > 0.0) ++filled;
    if (order.empty()) out.tau = 0.0;
    else if (filled == 0) out.tau = gain[order.front()] + 1.0;
    else if (filled == order.size()) out.tau = gain[order.back()] - 1.0;
    else out.tau = 0.5 * (gain[order[filled - 1]] + gain[order[filled]]);
  }
  out.density = DensityField(std::move(rho), areas);
  return out;
}

DtAraResult dt_ara_bisection(const std::vector<double>& gain, const std::vector<double>& areas,
                             double q, double rho_max, double tol) {
  check_inputs(gain, areas, q, rho_max);
  DtAraResult out;
  if (gain.empty()) {
    out.density = DensityField({}, areas);
    return out;
  }
  const auto [lo_it, hi_it] = std::minmax_element(gain.begin(), gain.end());
  double lo = *lo_it - 1.0;
  double hi = *hi_it + 1.0;
  auto mass_above = [&](double tau) {
    double m = 0.0;
    for (std::size_t c = 0; c < gain.size(); ++c)
      if (gain[c] > tau) m += rho_max * areas[c];
    return m;
  };
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // bracket at floating-point resolution
    if (mass_above(mid) > q) lo = mid;
    else hi = mid;
  }

  std::vector<double> rho(gain.size(), 0.0);
  double budget = q;
  std::vector<std::size_t> band;
  for (std::size_t c = 0; c < gain.size(); ++c) {
    if (gain[c] > hi) {
      rho[c] = rho_max;
      budget -= rho_max * areas[c];
    } else if (gain[c] > lo) {
      band.push_back(c);
    }
  }
  fill(descending_order(gain, std::move(band)), areas, rho_max, budget, rho,
       out.fractional_cell);
  out.tau = 0.5 * (lo + hi);
  out.density = DensityField(std::move(rho), areas);
  return out;
}

}  // namespace aris
