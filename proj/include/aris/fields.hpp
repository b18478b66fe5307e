#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace aris {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using CRowVector = Eigen::RowVectorXcd;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

/// Raised when two fields that must share a grid do not.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a caller breaks a documented precondition (e.g. a non-unit
/// jammer beamformer).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mean-field UAV density over the grid cells, in UAVs per square meter.
/// Carries the cell areas so that integrals can be formed without the grid.
class DensityField {
 public:
  DensityField() = default;
  DensityField(std::vector<double> rho, std::vector<double> area);

  std::size_t cells() const { return rho_.size(); }
  double operator[](std::size_t c) const { return rho_[c]; }
  double& operator[](std::size_t c) { return rho_[c]; }
  const std::vector<double>& values() const { return rho_; }
  const std::vector<double>& areas() const { return area_; }

  /// rho[c] * area[c]: the expected UAV count in cell c.
  double mass(std::size_t c) const { return rho_[c] * area_[c]; }
  /// Midpoint-rule integral of rho over the region.
  double integral() const;
  double total_area() const;

  /// Returns an empty string when 0 <= rho <= rho_max everywhere and the
  /// integral matches q within rel_tol, otherwise a description.
  std::string check(double q, double rho_max, double rel_tol = 1e-6) const;

 private:
  std::vector<double> rho_;
  std::vector<double> area_;
};

/// Unit-modulus RIS coefficients: column c holds theta_n at cell c.
class PhaseField {
 public:
  PhaseField() = default;
  explicit PhaseField(CMatrix theta);

  std::size_t cells() const { return static_cast<std::size_t>(theta_.cols()); }
  std::size_t elements() const { return static_cast<std::size_t>(theta_.rows()); }
  const CMatrix& matrix() const { return theta_; }
  auto column(std::size_t c) const { return theta_.col(static_cast<Eigen::Index>(c)); }

  /// Largest | |theta| - 1 | over all entries.
  double max_modulus_deviation() const;

  static PhaseField constant(std::size_t elements, std::size_t cells, cd value = cd{1.0, 0.0});

 private:
  CMatrix theta_;
};

}  // namespace aris
