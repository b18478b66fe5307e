#pragma once

#include <vector>

#include "aris/channel.hpp"
#include "aris/fields.hpp"

namespace aris {

/// R(j) = sum_k b_k b_k^H together with the b_k (columns of an L x K matrix).
struct JamCovariance {
  CMatrix r;
  CMatrix b;
};

struct EigenPair {
  double value = 0.0;
  CVector vector;
  /// Distance to the next eigenvalue (0 when L == 1).
  double gap = 0.0;
};

/// Top eigenpair of a Hermitian PSD matrix. The eigenvector's global phase
/// is fixed by making its largest-magnitude entry real and positive.
EigenPair principal_eigpair(const CMatrix& r);

/// The jammer's view of a fixed defence (theta, rho): evaluates R(j) and
/// lambda_max(R(j)) for arbitrary positions j. Caches conj(h_U,k) .* theta
/// per cell so repeated evaluations only redo the j-dependent steering.
class JammerObjective {
 public:
  JammerObjective(const PhaseField& theta, const DensityField& rho, const ChannelSet& channels,
                  const JammerLinkModel& jammer_link);

  JamCovariance covariance(const Vec2& j) const;
  double lambda_max(const Vec2& j) const;
  EigenPair eigpair(const Vec2& j) const;
  int antennas() const { return jammer_link_->antennas(); }

 private:
  const JammerLinkModel* jammer_link_;
  int users_ = 0;
  std::vector<CMatrix> reflect_;  // per cell N x K: conj(h_U,k) .* theta
  std::vector<double> mass_;
  std::vector<std::size_t> active_;
};

JamCovariance jamming_covariance(const PhaseField& theta, const DensityField& rho,
                                 const ChannelSet& channels, const JammerLinkModel& jammer_link,
                                 const Vec2& j);

struct LambdaGradient {
  Vec2 gradient = Vec2::Zero();
  /// True when the top eigenvalue was (near) degenerate and the gradient was
  /// taken by differencing lambda_max directly.
  bool used_fallback = false;
};

/// grad_j lambda_max via first-order eigenvalue perturbation
/// v^H (dR/dj_i) v, with dR/dj_i by central differences of step fd_step.
LambdaGradient lambda_max_gradient(const JammerObjective& objective, const Vec2& j,
                                   double fd_step = 0.01);

struct JammerOptions {
  double fd_step = 0.01;          // meters, for dR/dj
  double ascent_step = 0.5;       // meters, initial projected-ascent step
  int ascent_max_steps = 100;
  double ascent_min_step = 1e-3;  // meters
  /// Local-maximum certification: neighbours at this radius...
  double certify_radius = 0.5;
  /// ...in this many directions.
  int certify_directions = 16;
  /// Lattice spacing (meters) of the start points seeding the critical-point
  /// search; <= 0 searches from the estimate only.
  double start_spacing = 3.0;
  /// Number of best lattice/boundary starts that are refined by ascent.
  int refine_starts = 6;
  /// Angular samples of the boundary circle used to seed the boundary ascent.
  int boundary_samples = 64;
};

struct JammerStrategy {
  Vec2 position = Vec2::Zero();
  CVector beamformer;
  double lambda_max = 0.0;
  bool on_boundary = false;
  /// Gradient vanished at the estimate with epsilon > 0.
  bool flat_landscape = false;
  /// An interior critical point with lambda >= lambda(estimate) was found.
  bool interior_candidate = false;
  /// The returned point beat all certification neighbours.
  bool certified_local_max = false;
};

/// Worst-case jammer over the disk |j - j_hat| <= epsilon.
JammerStrategy optimize_jammer(const JammerObjective& objective, const Vec2& j_hat,
                               double epsilon, const JammerOptions& options = {});

/// Jammer held at a fixed position with its optimal (eigen) beamformer.
JammerStrategy fixed_jammer(const JammerObjective& objective, const Vec2& position);

struct LandscapePoint {
  Vec2 position;
  double lambda_max = 0.0;
};

/// lambda_max on a square lattice clipped to the uncertainty disk.
std::vector<LandscapePoint> lambda_landscape(const JammerObjective& objective, const Vec2& j_hat,
                                             double epsilon, double spacing);

}  // namespace aris
