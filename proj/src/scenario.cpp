#include "aris/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace aris {

// ---------------------------------------------------------------------------
// Fields

DensityField::DensityField(std::vector<double> rho, std::vector<double> area)
    : rho_(std::move(rho)), area_(std::move(area)) {
  if (rho_.size() != area_.size())
    throw GridMismatch("density values and cell areas differ in length");
}

double DensityField::integral() const {
  double total = 0.0;
  for (std::size_t c = 0; c < rho_.size(); ++c) total += rho_[c] * area_[c];
  return total;
}

double DensityField::total_area() const {
  double total = 0.0;
  for (double a : area_) total += a;
  return total;
}

std::string DensityField::check(double q, double rho_max, double rel_tol) const {
  std::ostringstream out;
  for (std::size_t c = 0; c < rho_.size(); ++c) {
    if (!(rho_[c] >= 0.0) || rho_[c] > rho_max * (1.0 + 1e-12)) {
      out << "rho[" << c << "]=" << rho_[c] << " outside [0, " << rho_max << "]; ";
      break;
    }
  }
  const double total = integral();
  if (std::abs(total - q) > rel_tol * std::max(q, 1e-300) && !(q == 0.0 && total == 0.0))
    out << "integral " << total << " differs from budget " << q;
  return out.str();
}

PhaseField::PhaseField(CMatrix theta) : theta_(std::move(theta)) {}

double PhaseField::max_modulus_deviation() const {
  if (theta_.size() == 0) return 0.0;
  return (theta_.array().abs() - 1.0).abs().maxCoeff();
}

PhaseField PhaseField::constant(std::size_t elements, std::size_t cells, cd value) {
  return PhaseField(CMatrix::Constant(static_cast<Eigen::Index>(elements),
                                      static_cast<Eigen::Index>(cells), value));
}

// ---------------------------------------------------------------------------
// Units

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// ---------------------------------------------------------------------------
// Validation

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
  std::string text = "invalid configuration:";
  for (const auto& p : problems) text += "\n  - " + p;
  return text;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::invalid_argument(join_problems(problems)), problems_(std::move(problems)) {}

std::vector<std::string> validate_config(const SystemConfig& c) {
  std::vector<std::string> problems;
  auto require = [&](bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
  };
  auto fmt = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };

  require(c.bs_antennas >= 1, "bs_antennas (M) must be >= 1, got " + std::to_string(c.bs_antennas));
  require(c.ris_elements >= 1, "ris_elements (N) must be >= 1, got " + std::to_string(c.ris_elements));
  require(c.users >= 1, "users (K) must be >= 1, got " + std::to_string(c.users));
  require(c.jammer_antennas >= 1,
          "jammer_antennas (L) must be >= 1, got " + std::to_string(c.jammer_antennas));
  require(c.grid_nx >= 1 && c.grid_ny >= 1,
          "grid_dims must be >= 1 per axis, got " + std::to_string(c.grid_nx) + "x" +
              std::to_string(c.grid_ny));
  if (c.users >= 1 && c.bs_antennas >= 1)
    require(c.users <= c.bs_antennas, "K exceeds M (K=" + std::to_string(c.users) +
                                          ", M=" + std::to_string(c.bs_antennas) +
                                          "): zero-forcing needs K <= M");
  require(c.region_size.x() > 0.0 && c.region_size.y() > 0.0, "region_size must be positive");
  require(c.uav_count >= 0.0, "uav_count (Q) must be >= 0, got " + fmt(c.uav_count));
  require(c.max_density > 0.0, "max_density (rho_max) must be > 0, got " + fmt(c.max_density));
  if (c.max_density > 0.0 && c.region_size.x() > 0.0 && c.region_size.y() > 0.0) {
    const double capacity = c.density_capacity();
    require(c.uav_count <= capacity * (1.0 + 1e-12),
            "Q exceeds density capacity " + fmt(capacity) + " (Q=" + fmt(c.uav_count) +
                ", rho_max=" + fmt(c.max_density) + ", area=" + fmt(c.region_area()) + ")");
  }
  require(c.uncertainty_radius >= 0.0,
          "uncertainty_radius (epsilon) must be >= 0, got " + fmt(c.uncertainty_radius));
  require(c.bs_power > 0.0, "bs_power (P_B) must be > 0");
  require(c.jam_power >= 0.0, "jam_power (P_J) must be >= 0");
  require(c.reference_gain > 0.0, "reference_gain (beta) must be > 0");
  require(c.rician_factor > 0.0, "rician_factor (kappa) must be > 0");
  require(c.noise_power > 0.0, "noise_power must be > 0");
  require(c.path_loss_exponent > 0.0, "path_loss_exponent (alpha) must be > 0");
  require(c.element_spacing > 0.0, "element_spacing must be > 0");
  require(c.uav_altitude > c.bs_altitude && c.uav_altitude > c.user_altitude &&
              c.uav_altitude > c.jammer_altitude,
          "uav_altitude must exceed the BS, user and jammer altitudes");
  require(c.user_cluster_radius >= 0.0, "user_cluster_radius must be >= 0");
  if (!c.user_positions.empty())
    require(static_cast<int>(c.user_positions.size()) == c.users,
            "user_positions has " + std::to_string(c.user_positions.size()) +
                " entries but K=" + std::to_string(c.users));
  return problems;
}

SystemConfig validated(const SystemConfig& config) {
  auto problems = validate_config(config);
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<Cell> cells, int nx, int ny, double total_area)
    : cells_(std::move(cells)), nx_(nx), ny_(ny), total_area_(total_area) {}

std::vector<double> Grid::areas() const {
  std::vector<double> out(cells_.size());
  std::transform(cells_.begin(), cells_.end(), out.begin(), [](const Cell& c) { return c.area; });
  return out;
}

Grid build_grid(const SystemConfig& config) {
  const int nx = config.grid_nx;
  const int ny = config.grid_ny;
  const double dx = config.region_size.x() / nx;
  const double dy = config.region_size.y() / ny;
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      Cell cell;
      cell.index = cells.size();
      cell.center = Vec2((ix + 0.5) * dx, (iy + 0.5) * dy);
      cell.area = dx * dy;
      cells.push_back(cell);
    }
  }
  return Grid(std::move(cells), nx, ny, config.region_area());
}

DensityField uniform_density(const Grid& grid, double q, double rho_max) {
  std::vector<std::string> problems;
  if (q < 0.0) problems.push_back("uav_count (Q) must be >= 0");
  const double capacity = rho_max * grid.total_area();
  if (q > capacity * (1.0 + 1e-12)) {
    std::ostringstream s;
    s << "Q exceeds density capacity " << capacity << " (Q=" << q << ")";
    problems.push_back(s.str());
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  // At the capacity bound the quotient may land one ulp above rho_max.
  const double rho = std::min(q / grid.total_area(), rho_max);
  return DensityField(std::vector<double>(grid.size(), rho), grid.areas());
}

// ---------------------------------------------------------------------------
// Randomness

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::mt19937_64 RandomStreams::stream(std::string_view name, std::uint64_t index) const {
  const std::uint64_t key = splitmix64(seed_ ^ splitmix64(fnv1a(name) + splitmix64(index)));
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
  return std::mt19937_64(seq);
}

std::vector<Vec2> resolve_user_positions(const SystemConfig& config) {
  if (!config.user_positions.empty()) return config.user_positions;
  auto rng = RandomStreams(config.seed).stream("users");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec2> users;
  users.reserve(static_cast<std::size_t>(config.users));
  for (int k = 0; k < config.users; ++k) {
    const double r = config.user_cluster_radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    users.emplace_back(config.user_cluster_center + r * Vec2(std::cos(phi), std::sin(phi)));
  }
  return users;
}

}  // namespace aris
