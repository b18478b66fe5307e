#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aris/fields.hpp"

namespace aris {

/// Every scalar of a run. Powers are linear watts; the config reader does the
/// dBm/dB conversion once on the way in.
struct SystemConfig {
  int bs_antennas = 16;       // M
  int ris_elements = 50;      // N
  double uav_count = 100.0;   // Q, real-valued budget
  int users = 4;              // K
  int jammer_antennas = 16;   // L

  Vec2 region_size{200.0, 200.0};
  int grid_nx = 20;
  int grid_ny = 20;
  double uav_altitude = 100.0;

  double path_loss_exponent = 2.2;  // alpha
  double reference_gain = 1e-3;     // beta, -30 dB at 1 m
  double rician_factor = 10.0;      // kappa, 10 dB
  double element_spacing = 0.5;     // wavelengths, all arrays

  double bs_power = 10.0;           // 40 dBm
  double jam_power = 100.0;         // 50 dBm
  double noise_power = 6.309573444801943e-14;  // -102 dBm
  double uncertainty_radius = 30.0; // epsilon, meters
  double max_density = 0.05;        // rho_max, UAVs/m^2

  Vec2 bs_position{0.0, 100.0};
  double bs_altitude = 0.0;
  /// Explicit user coordinates; when empty, users are drawn uniformly from
  /// the cluster disk using the "users" substream.
  std::vector<Vec2> user_positions;
  Vec2 user_cluster_center{140.0, 100.0};
  double user_cluster_radius = 40.0;
  double user_altitude = 0.0;
  Vec2 jammer_estimate{100.0, 40.0};
  double jammer_altitude = 0.0;
  /// Where the jammer really is, if known. Only echoed in reports; the
  /// optimizer sees the estimate and the uncertainty radius.
  std::optional<Vec2> jammer_true;

  std::uint64_t seed = 1;

  double region_area() const { return region_size.x() * region_size.y(); }
  double density_capacity() const { return max_density * region_area(); }
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

/// Thrown with every violated invariant at once.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// All invariant violations of the config, empty when valid.
std::vector<std::string> validate_config(const SystemConfig& config);
/// Returns the config unchanged or throws ConfigError listing every problem.
SystemConfig validated(const SystemConfig& config);

struct Cell {
  std::size_t index = 0;
  Vec2 center = Vec2::Zero();
  double area = 0.0;
};

/// Uniform rectangular tiling of the deployment region, row-major
/// (index = iy * nx + ix), midpoint quadrature nodes.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<Cell> cells, int nx, int ny, double total_area);

  std::size_t size() const { return cells_.size(); }
  const Cell& operator[](std::size_t c) const { return cells_[c]; }
  const std::vector<Cell>& cells() const { return cells_; }
  std::vector<double> areas() const;
  double total_area() const { return total_area_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }

 private:
  std::vector<Cell> cells_;
  int nx_ = 0;
  int ny_ = 0;
  double total_area_ = 0.0;
};

Grid build_grid(const SystemConfig& config);

/// Constant field q / total_area; throws ConfigError when q exceeds the
/// density capacity or is negative.
DensityField uniform_density(const Grid& grid, double q, double rho_max);

/// Named, independent random substreams derived from one seed.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t seed) : seed_(seed) {}
  std::mt19937_64 stream(std::string_view name, std::uint64_t index = 0) const;
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

/// Explicit user positions if configured, otherwise K draws from the cluster
/// disk.
std::vector<Vec2> resolve_user_positions(const SystemConfig& config);

}  // namespace aris
