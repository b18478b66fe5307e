#include "aris/jammer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <spdlog/spdlog.h>

namespace aris {

EigenPair principal_eigpair(const CMatrix& r) {
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(r);
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const Eigen::Index n = values.size();
  const double top = values(n - 1);
  // Lowest decomposition index among the (numerically) tied top eigenvalues.
  Eigen::Index pick = n - 1;
  for (Eigen::Index i = 0; i < n; ++i)
    if (top - values(i) <= 1e-9 * std::abs(top)) {
      pick = i;
      break;
    }
  EigenPair out;
  out.value = std::max(top, 0.0);
  out.gap = n > 1 ? top - values(n - 2) : 0.0;
  out.vector = solver.eigenvectors().col(pick);
  Eigen::Index largest = 0;
  out.vector.cwiseAbs().maxCoeff(&largest);
  const cd anchor = out.vector(largest);
  if (std::abs(anchor) > 0.0) out.vector *= std::conj(anchor) / std::abs(anchor);
  out.vector.normalize();
  return out;
}

// ---------------------------------------------------------------------------

JammerObjective::JammerObjective(const PhaseField& theta, const DensityField& rho,
                                 const ChannelSet& channels,
                                 const JammerLinkModel& jammer_link)
    : jammer_link_(&jammer_link), users_(channels.users()) {
  require_same_grid(theta, rho, channels);
  reflect_.resize(channels.size());
  mass_.resize(channels.size());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    mass_[c] = rho.mass(c);
    if (mass_[c] == 0.0) continue;
    active_.push_back(c);
    reflect_[c] = (channels[c].ris_to_users.conjugate().array().colwise() *
                   theta.column(c).array())
                      .matrix();
  }
}

JamCovariance JammerObjective::covariance(const Vec2& j) const {
  const int l = jammer_link_->antennas();
  JamCovariance out;
  out.b = CMatrix::Zero(l, users_);
  for (std::size_t c : active_) {
    const JammerLink link = jammer_link_->link(c, j);
    // b_k += mass * g * a_t * conj(a_r^T (conj(h_k) .* theta))
    const CRowVector reflected = link.receive.transpose() * reflect_[c];
    out.b.noalias() += (mass_[c] * link.amplitude) * link.transmit * reflected.conjugate();
  }
  out.r = out.b * out.b.adjoint();
  return out;
}

double JammerObjective::lambda_max(const Vec2& j) const { return eigpair(j).value; }

EigenPair JammerObjective::eigpair(const Vec2& j) const {
  const JamCovariance cov = covariance(j);
  if (active_.empty()) {
    EigenPair empty;
    empty.vector = CVector::Zero(jammer_link_->antennas());
    empty.vector(0) = 1.0;
    return empty;
  }
  return principal_eigpair(cov.r);
}

JamCovariance jamming_covariance(const PhaseField& theta, const DensityField& rho,
                                 const ChannelSet& channels, const JammerLinkModel& jammer_link,
                                 const Vec2& j) {
  return JammerObjective(theta, rho, channels, jammer_link).covariance(j);
}

// ---------------------------------------------------------------------------

namespace {

double fd_lambda_axis(const JammerObjective& objective, const Vec2& j, int axis, double h) {
  Vec2 plus = j;
  Vec2 minus = j;
  plus(axis) += h;
  minus(axis) -= h;
  return (objective.lambda_max(plus) - objective.lambda_max(minus)) / (2.0 * h);
}

}  // namespace

LambdaGradient lambda_max_gradient(const JammerObjective& objective, const Vec2& j,
                                   double fd_step) {
  LambdaGradient out;
  const EigenPair top = objective.eigpair(j);
  if (!(top.gap > 1e-9 * top.value) || top.value == 0.0) {
    spdlog::debug("lambda_max gradient: degenerate top eigenvalue at ({}, {}), differencing "
                  "lambda directly",
                  j.x(), j.y());
    out.used_fallback = true;
    for (int axis = 0; axis < 2; ++axis)
      out.gradient(axis) = fd_lambda_axis(objective, j, axis, fd_step);
    return out;
  }
  for (int axis = 0; axis < 2; ++axis) {
    Vec2 plus = j;
    Vec2 minus = j;
    plus(axis) += fd_step;
    minus(axis) -= fd_step;
    const CMatrix d_r =
        (objective.covariance(plus).r - objective.covariance(minus).r) / (2.0 * fd_step);
    out.gradient(axis) = (top.vector.adjoint() * d_r * top.vector)(0).real();
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Vec2 project_to_disk(const Vec2& p, const Vec2& center, double radius) {
  const Vec2 d = p - center;
  const double n = d.norm();
  return n <= radius ? p : Vec2(center + d * (radius / n));
}

struct Candidate {
  Vec2 position;
  double lambda = 0.0;
};

/// Projected gradient ascent with step halving on non-improvement.
Candidate ascend_in_disk(const JammerObjective& objective, Candidate start, const Vec2& center,
                         double radius, const JammerOptions& o) {
  Candidate cur = start;
  double step = o.ascent_step;
  for (int it = 0; it < o.ascent_max_steps && step >= o.ascent_min_step; ++it) {
    const Vec2 g = lambda_max_gradient(objective, cur.position, o.fd_step).gradient;
    const double gn = g.norm();
    if (!(gn > 0.0)) break;
    while (step >= o.ascent_min_step) {
      const Vec2 next = project_to_disk(cur.position + step * g / gn, center, radius);
      const double value = objective.lambda_max(next);
      if (value > cur.lambda) {
        cur = {next, value};
        break;
      }
      step *= 0.5;
    }
  }
  return cur;
}

/// Ascent along the circle |j - center| = radius, starting at angle phi.
Candidate ascend_on_circle(const JammerObjective& objective, double phi, const Vec2& center,
                           double radius, const JammerOptions& o) {
  auto at = [&](double a) { return Vec2(center + radius * Vec2(std::cos(a), std::sin(a))); };
  Candidate cur{at(phi), objective.lambda_max(at(phi))};
  double step = o.ascent_step;
  for (int it = 0; it < o.ascent_max_steps && step >= o.ascent_min_step; ++it) {
    const Vec2 g = lambda_max_gradient(objective, cur.position, o.fd_step).gradient;
    const double slope = g.dot(Vec2(-std::sin(phi), std::cos(phi)));
    if (slope == 0.0) break;
    const double dir = slope > 0.0 ? 1.0 : -1.0;
    while (step >= o.ascent_min_step) {
      const double next_phi = phi + dir * step / radius;
      const Vec2 next = at(next_phi);
      const double value = objective.lambda_max(next);
      if (value > cur.lambda) {
        cur = {next, value};
        phi = next_phi;
        break;
      }
      step *= 0.5;
    }
  }
  return cur;
}

bool certify_local_max(const JammerObjective& objective, const Candidate& c, const Vec2& center,
                       double radius, const JammerOptions& o) {
  for (int d = 0; d < o.certify_directions; ++d) {
    const double a = 2.0 * std::numbers::pi * d / o.certify_directions;
    const Vec2 p = project_to_disk(c.position + o.certify_radius * Vec2(std::cos(a), std::sin(a)),
                                   center, radius);
    if (objective.lambda_max(p) > c.lambda) return false;
  }
  return true;
}

std::vector<Candidate> best_of(std::vector<Candidate> pool, int count) {
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Candidate& a, const Candidate& b) { return a.lambda > b.lambda; });
  if (static_cast<int>(pool.size()) > count) pool.resize(static_cast<std::size_t>(count));
  return pool;
}

}  // namespace

JammerStrategy fixed_jammer(const JammerObjective& objective, const Vec2& position) {
  const EigenPair top = objective.eigpair(position);
  JammerStrategy out;
  out.position = position;
  out.beamformer = top.vector;
  out.lambda_max = top.value;
  return out;
}

JammerStrategy optimize_jammer(const JammerObjective& objective, const Vec2& j_hat,
                               double epsilon, const JammerOptions& o) {
  if (epsilon <= 0.0) return fixed_jammer(objective, j_hat);

  const Candidate estimate{j_hat, objective.lambda_max(j_hat)};
  const Vec2 g_hat = lambda_max_gradient(objective, j_hat, o.fd_step).gradient;
  if (estimate.lambda == 0.0 || g_hat.norm() * epsilon <= 1e-12 * estimate.lambda) {
    JammerStrategy flat = fixed_jammer(objective, j_hat);
    flat.flat_landscape = true;
    return flat;
  }

  // Critical-point search: ascents from the estimate and from the best points
  // of a start lattice covering the disk.
  std::vector<Candidate> interior_starts{estimate};
  if (o.start_spacing > 0.0) {
    std::vector<Candidate> lattice;
    for (const LandscapePoint& p : lambda_landscape(objective, j_hat, epsilon, o.start_spacing))
      if ((p.position - j_hat).norm() < epsilon) lattice.push_back({p.position, p.lambda_max});
    for (const Candidate& c : best_of(std::move(lattice), o.refine_starts))
      interior_starts.push_back(c);
  }

  std::vector<Candidate> boundary_pool;
  bool have_interior = false;
  Candidate interior{j_hat, -1.0};
  for (const Candidate& start : interior_starts) {
    const Candidate end = ascend_in_disk(objective, start, j_hat, epsilon, o);
    if ((end.position - j_hat).norm() < epsilon * (1.0 - 1e-9)) {
      if (end.lambda >= estimate.lambda && end.lambda > interior.lambda) {
        interior = end;
        have_interior = true;
      }
    } else {
      boundary_pool.push_back(end);
    }
  }

  // Boundary candidate from the gradient at the estimate, refined along the
  // circle, plus refinements from the best angular samples.
  std::vector<double> boundary_angles{std::atan2(g_hat.y(), g_hat.x())};
  if (o.boundary_samples > 0) {
    std::vector<Candidate> ring;
    for (int s = 0; s < o.boundary_samples; ++s) {
      const double a = 2.0 * std::numbers::pi * s / o.boundary_samples;
      const Vec2 p = j_hat + epsilon * Vec2(std::cos(a), std::sin(a));
      ring.push_back({p, objective.lambda_max(p)});
    }
    for (const Candidate& c : best_of(std::move(ring), o.refine_starts)) {
      const Vec2 d = c.position - j_hat;
      boundary_angles.push_back(std::atan2(d.y(), d.x()));
    }
  }
  for (double a : boundary_angles)
    boundary_pool.push_back(ascend_on_circle(objective, a, j_hat, epsilon, o));

  Candidate boundary = boundary_pool.front();
  for (const Candidate& c : boundary_pool)
    if (c.lambda > boundary.lambda) boundary = c;

  const bool pick_interior = have_interior && interior.lambda >= boundary.lambda;
  const Candidate& best = pick_interior ? interior : boundary;
  JammerStrategy out = fixed_jammer(objective, best.position);
  out.on_boundary = !pick_interior;
  out.interior_candidate = have_interior;
  out.certified_local_max = certify_local_max(objective, best, j_hat, epsilon, o);
  return out;
}

std::vector<LandscapePoint> lambda_landscape(const JammerObjective& objective, const Vec2& j_hat,
                                             double epsilon, double spacing) {
  std::vector<LandscapePoint> out;
  if (epsilon <= 0.0 || spacing <= 0.0) {
    out.push_back({j_hat, objective.lambda_max(j_hat)});
    return out;
  }
  const int steps = static_cast<int>(std::floor(epsilon / spacing));
  for (int iy = -steps; iy <= steps; ++iy)
    for (int ix = -steps; ix <= steps; ++ix) {
      const Vec2 offset(ix * spacing, iy * spacing);
      if (offset.norm() > epsilon) continue;
      const Vec2 p = j_hat + offset;
      out.push_back({p, objective.lambda_max(p)});
    }
  return out;
}

}  // namespace aris
