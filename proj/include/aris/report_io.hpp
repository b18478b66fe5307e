#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aris/config_io.hpp"
#include "aris/density.hpp"
#include "aris/driver.hpp"
#include "aris/jammer.hpp"

namespace aris {

/// Bumped whenever a column is added, removed or renamed.
inline constexpr int kReportSchemaVersion = 1;

/// Shortest round-trip text for a double.
std::string format_number(double value);

/// One "iteration" row per outer iteration (row 0 is the initial state) and
/// a final "summary" row.
void write_report_csv(std::ostream& out, const RunReport& report);

/// One row per cell: x, y, rho, G. Jammer positions go in "#" comments.
void write_density_map(std::ostream& out, const SystemState& state, const GainField& gain,
                       const RunReport& report);

/// cell, element, re, im for every RIS coefficient.
void write_phase_dump(std::ostream& out, const PhaseField& phases);

void write_landscape(std::ostream& out, const std::vector<LandscapePoint>& points);

/// Stage wall-clock seconds; not deterministic, so kept out of the manifest hashes.
void write_timings(std::ostream& out, const RunReport& report);

/// Git blob hash ("blob <size>\0" + content), hex.
std::string git_blob_sha1(std::string_view content);

struct RunOutputs {
  bool phase_dump = false;
  bool landscape = false;
  double landscape_spacing = 1.0;  // meters
};

/// Writes report.csv, density_map.csv, timings.csv, manifest.json and the
/// optional phases.csv / landscape.csv into dir. Returns the data files
/// written (manifest excluded).
std::vector<std::filesystem::path> write_run_directory(const std::filesystem::path& dir,
                                                       const RunConfig& config,
                                                       const RunReport& report,
                                                       const RunOutputs& outputs = {});

}  // namespace aris
