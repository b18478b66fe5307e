#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aris/fields.hpp"
#include "aris/scenario.hpp"

namespace aris {

/// ULA response: element m is exp(i 2 pi spacing m sin(angle)).
CVector array_response(double angle, int count, double spacing = 0.5);

/// Linear power gain beta * d^-alpha. Throws std::domain_error for d <= 0.
double path_loss(double distance, double alpha, double beta);

/// Angle of a link measured in the vertical plane containing both endpoints:
/// sin(angle) = horizontal separation / 3-D distance. Identical at both ends.
double link_angle(const Vec3& from, const Vec3& to);

/// Rician draw sqrt(beta d^-alpha) (sqrt(k/(k+1)) los + sqrt(1/(k+1)) nlos)
/// with nlos entries i.i.d. CN(0, 1).
CMatrix synth_rician(const CMatrix& los, double kappa, double distance, double alpha,
                     double beta, std::mt19937_64& rng);

struct CellChannels {
  std::size_t cell = 0;
  CMatrix bs_to_ris;     // N x M
  CMatrix ris_to_users;  // N x K, column k is h_U,k
};

class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(std::vector<CellChannels> cells, std::uint64_t seed);

  std::size_t size() const { return cells_.size(); }
  const CellChannels& operator[](std::size_t c) const { return cells_[c]; }
  std::uint64_t seed() const { return seed_; }
  int elements() const;
  int bs_antennas() const;
  int users() const;

 private:
  std::vector<CellChannels> cells_;
  std::uint64_t seed_ = 0;
};

/// Rank-one jammer -> ARIS link for a jammer at j:
/// H_JU(x, j) = amplitude * receive * transmit^H.
struct JammerLink {
  double amplitude = 0.0;
  CVector receive;   // N, at the ARIS
  CVector transmit;  // L, at the jammer
};

/// Pure line-of-sight jammer links, evaluable at any jammer position.
class JammerLinkModel {
 public:
  JammerLinkModel() = default;
  JammerLinkModel(std::vector<Vec3> cell_positions, double jammer_altitude, double alpha,
                  double beta, int elements, int antennas, double spacing);

  JammerLink link(std::size_t cell, const Vec2& jammer) const;
  /// Dense N x L matrix, for oracles and dumps.
  CMatrix matrix(std::size_t cell, const Vec2& jammer) const;

  std::size_t cells() const { return cell_positions_.size(); }
  int elements() const { return elements_; }
  int antennas() const { return antennas_; }
  double jammer_altitude() const { return jammer_altitude_; }

 private:
  std::vector<Vec3> cell_positions_;
  double jammer_altitude_ = 0.0;
  double alpha_ = 2.2;
  double beta_ = 1e-3;
  int elements_ = 1;
  int antennas_ = 1;
  double spacing_ = 0.5;
};

struct GeneratedChannels {
  ChannelSet channels;
  JammerLinkModel jammer_link;
};

/// Draws every BS->ARIS and ARIS->user channel from the "channel" substream
/// (one sub-substream per cell) and builds the jammer link model.
GeneratedChannels generate_channels(const SystemConfig& config, const Grid& grid);

/// h_eff,B,k^H: midpoint sum of h_U,k^H Theta H_BU rho over cells.
CRowVector effective_bs_channel(const PhaseField& theta, const DensityField& rho,
                                const ChannelSet& channels, std::size_t k);

/// All K rows of effective_bs_channel stacked (K x M).
CMatrix effective_bs_matrix(const PhaseField& theta, const DensityField& rho,
                            const ChannelSet& channels);

/// h_eff,J,k(j, v). Throws ContractViolation when |v| != 1.
cd effective_jam_channel(const PhaseField& theta, const DensityField& rho,
                         const ChannelSet& channels, const JammerLinkModel& jammer_link,
                         const Vec2& jammer, const CVector& v, std::size_t k);

/// Throws GridMismatch unless theta, rho and channels cover the same cells.
void require_same_grid(const PhaseField& theta, const DensityField& rho,
                       const ChannelSet& channels);

}  // namespace aris
