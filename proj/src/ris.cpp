#include "aris/ris.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <spdlog/spdlog.h>

namespace aris {

CMatrix euclidean_gradient(const GradientWorkspace& ws, const PhaseField& theta,
                           const DensityField& rho, RateModel model) {
  const auto sens = ws.sensitivity(ws.aggregate(theta, rho), model);
  CMatrix grad = ws.cell_sensitivity(sens).conjugate();
  for (std::size_t c = 0; c < ws.cells(); ++c) grad.col(static_cast<Eigen::Index>(c)) *= rho[c];
  return grad;
}

CMatrix euclidean_gradient(const SystemState& state) {
  const GradientWorkspace ws(state);
  return euclidean_gradient(ws, state.phases, state.density, RateModel::FixedBeamformers);
}

CMatrix tangent_project(const PhaseField& theta, const CMatrix& g) {
  const auto& t = theta.matrix();
  const Eigen::ArrayXXd radial = (g.array() * t.array().conjugate()).real();
  return (g.array() - radial * t.array()).matrix();
}

std::optional<PhaseField> retract(const PhaseField& theta, const CMatrix& xi, double step) {
  CMatrix moved = theta.matrix() + step * xi;
  const Eigen::ArrayXXd modulus = moved.array().abs();
  if (modulus.size() > 0 && modulus.minCoeff() < 1e-12) return std::nullopt;
  moved.array() /= modulus.cast<cd>();
  return PhaseField(std::move(moved));
}

double riemannian_norm(const CMatrix& xi, const std::vector<double>& areas) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < xi.cols(); ++c)
    total += areas[static_cast<std::size_t>(c)] * xi.col(c).squaredNorm();
  return std::sqrt(total);
}

double tangency_residual(const PhaseField& theta, const CMatrix& xi) {
  if (xi.size() == 0) return 0.0;
  return (xi.array() * theta.matrix().array().conjugate()).real().abs().maxCoeff();
}

namespace {

// Real inner product matching the gradient convention: sum area 2 Re(conj(a) b).
double metric(const CMatrix& a, const CMatrix& b, const std::vector<double>& areas) {
  double total = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    total += areas[static_cast<std::size_t>(c)] * 2.0 * a.col(c).dot(b.col(c)).real();
  return total;
}

// dR/dphi for theta = exp(i phi): 2 area Im(g conj(theta)).
Eigen::MatrixXd angle_gradient(const PhaseField& theta, const CMatrix& g,
                               const std::vector<double>& areas) {
  Eigen::MatrixXd out = 2.0 * (g.array() * theta.matrix().array().conjugate()).imag().matrix();
  for (Eigen::Index c = 0; c < out.cols(); ++c) out.col(c) *= areas[static_cast<std::size_t>(c)];
  return out;
}

PhaseField rotate(const PhaseField& theta, const Eigen::MatrixXd& angles) {
  CMatrix out = theta.matrix();
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) *= std::polar(1.0, angles(i));
  return PhaseField(std::move(out));
}

PhaseResult lbfgs_phases(const SystemState& state, const PhaseOptions& options) {
  const GradientWorkspace ws(state);
  const std::vector<double> areas = state.density.areas();
  PhaseResult out;
  out.phases = state.phases;
  double rate = ws.sum_rate(out.phases, state.density, options.model);
  out.trace.push_back(rate);
  out.max_modulus_deviation = out.phases.max_modulus_deviation();

  struct Pair {
    Eigen::MatrixXd s, y;
    double rho;
  };
  std::deque<Pair> memory;
  Eigen::MatrixXd grad;
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it + 1;
    const CMatrix g = euclidean_gradient(ws, out.phases, state.density, options.model);
    const CMatrix xi = tangent_project(out.phases, g);
    out.max_tangency_residual = std::max(out.max_tangency_residual,
                                         tangency_residual(out.phases, xi));
    out.final_gradient_norm = riemannian_norm(xi, areas);
    if (out.final_gradient_norm < options.tolerance * (1.0 + std::abs(rate))) {
      out.converged = true;
      return out;
    }
    const Eigen::MatrixXd next_grad = angle_gradient(out.phases, g, areas);
    if (grad.size() > 0) {
      Pair& last = memory.back();
      last.y = grad - next_grad;  // curvature of -R
      const double sy = (last.s.array() * last.y.array()).sum();
      if (sy > 1e-12 * last.s.norm() * last.y.norm()) last.rho = 1.0 / sy;
      else memory.pop_back();
    }
    grad = next_grad;

    // Two-loop recursion: direction = H grad.
    auto direction_from_memory = [&] {
      Eigen::MatrixXd q = grad;
      std::vector<double> alpha(memory.size());
      for (std::size_t i = memory.size(); i-- > 0;) {
        alpha[i] = memory[i].rho * (memory[i].s.array() * q.array()).sum();
        q -= alpha[i] * memory[i].y;
      }
      if (!memory.empty()) {
        const Pair& p = memory.back();
        q *= 1.0 / (p.rho * p.y.squaredNorm());
      }
      for (std::size_t i = 0; i < memory.size(); ++i) {
        const double beta = memory[i].rho * (memory[i].y.array() * q.array()).sum();
        q += (alpha[i] - beta) * memory[i].s;
      }
      return q;
    };

    std::optional<PhaseField> best;
    double best_rate = rate;
    Eigen::MatrixXd step_taken;
    for (int attempt = 0; attempt < 2 && !best; ++attempt) {
      if (attempt == 1) {
        if (memory.empty()) break;
        memory.clear();  // fall back to the plain gradient once
      }
      Eigen::MatrixXd d = direction_from_memory();
      if ((d.array() * grad.array()).sum() <= 0.0) {
        memory.clear();
        d = grad;
      }
      const double sup = d.cwiseAbs().maxCoeff();
      double step = memory.empty() ? options.initial_step / sup
                                   : std::min(1.0, options.initial_step / sup);
      for (int h = 0; h <= options.max_halvings; ++h, step *= options.backtrack_factor) {
        PhaseField candidate = rotate(out.phases, step * d);
        const double next = ws.sum_rate(candidate, state.density, options.model);
        if (next > best_rate) {
          best = std::move(candidate);
          best_rate = next;
          step_taken = step * d;
          break;
        }
      }
    }
    if (!best) {
      out.stalled = true;
      spdlog::debug("phase ascent stalled after {} iterations (|grad| {:.3e})", it + 1,
                    out.final_gradient_norm);
      return out;
    }
    if (static_cast<int>(memory.size()) == options.lbfgs_memory) memory.pop_front();
    memory.push_back({std::move(step_taken), Eigen::MatrixXd(), 0.0});
    out.phases = std::move(*best);
    rate = best_rate;
    out.trace.push_back(rate);
    out.max_modulus_deviation =
        std::max(out.max_modulus_deviation, out.phases.max_modulus_deviation());
  }
  out.hit_max_iterations = true;
  return out;
}

}  // namespace

PhaseResult optimize_phases(const SystemState& state, const PhaseOptions& options) {
  if (options.lbfgs_memory > 0) return lbfgs_phases(state, options);
  const GradientWorkspace ws(state);
  const std::vector<double> areas = state.density.areas();
  PhaseResult out;
  out.phases = state.phases;
  double rate = ws.sum_rate(out.phases, state.density, options.model);
  out.trace.push_back(rate);
  out.max_modulus_deviation = out.phases.max_modulus_deviation();

  CMatrix last_xi;         // previous Riemannian gradient
  CMatrix last_direction;  // previous search direction
  double last_step = 0.0;  // previous accepted step, in units of the direction
  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it + 1;
    const CMatrix xi =
        tangent_project(out.phases, euclidean_gradient(ws, out.phases, state.density, options.model));
    out.max_tangency_residual = std::max(out.max_tangency_residual,
                                         tangency_residual(out.phases, xi));
    out.final_gradient_norm = riemannian_norm(xi, areas);
    if (out.final_gradient_norm < options.tolerance * (1.0 + std::abs(rate))) {
      out.converged = true;
      return out;
    }

    CMatrix direction = xi;
    const bool restart = options.restart_every > 0 && it % options.restart_every == 0;
    if (options.conjugate && last_direction.size() > 0 && !restart) {
      // Polak-Ribiere+ with vector transport by projection; restart when the
      // combined direction is not an ascent direction.
      const CMatrix moved_xi = tangent_project(out.phases, last_xi);
      const double beta =
          std::max(0.0, metric(xi, xi - moved_xi, areas) / metric(last_xi, last_xi, areas));
      direction = xi + beta * tangent_project(out.phases, last_direction);
      if (metric(direction, xi, areas) <= 0.0) direction = xi;
    }

    const double max_step = options.initial_step / direction.cwiseAbs().maxCoeff();
    double step = max_step;
    if (options.warm_start && last_step > 0.0)
      step = std::min(max_step, last_step / options.backtrack_factor);

    std::optional<PhaseField> best;
    double best_rate = rate;
    double best_step = 0.0;
    for (int h = 0; h <= options.max_halvings; ++h, step *= options.backtrack_factor) {
      auto candidate = retract(out.phases, direction, step);
      if (!candidate) continue;
      const double next = ws.sum_rate(*candidate, state.density, options.model);
      if (next > best_rate) {
        best = std::move(candidate);
        best_rate = next;
        best_step = step;
        break;
      }
    }
    // Expand from the accepted step while the sum-rate keeps improving.
    if (best && options.warm_start) {
      for (double trial = best_step / options.backtrack_factor; trial <= max_step;
           trial /= options.backtrack_factor) {
        auto candidate = retract(out.phases, direction, trial);
        if (!candidate) break;
        const double next = ws.sum_rate(*candidate, state.density, options.model);
        if (!(next > best_rate)) break;
        best = std::move(candidate);
        best_rate = next;
        best_step = trial;
      }
    }
    if (!best) {
      out.stalled = true;
      spdlog::debug("phase ascent stalled after {} iterations (|grad| {:.3e})", it + 1,
                    out.final_gradient_norm);
      return out;
    }
    last_xi = xi;
    last_direction = direction;
    last_step = best_step;
    out.phases = std::move(*best);
    rate = best_rate;
    out.trace.push_back(rate);
    out.max_modulus_deviation =
        std::max(out.max_modulus_deviation, out.phases.max_modulus_deviation());
  }
  out.hit_max_iterations = true;
  return out;
}

}  // namespace aris
