#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aris/config_io.hpp"
#include "aris/driver.hpp"

namespace aris {

/// Parameters a sweep may vary, in their user-facing units
/// (p_jam in dBm, epsilon in meters, rho_max in UAVs/m^2).
const std::vector<std::string>& sweep_parameters();

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
  std::vector<Scheme> schemes;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
};

/// Every problem with the sweep definition; empty when valid.
std::vector<std::string> validate_sweep(const SweepSpec& spec);

struct SweepRow {
  std::string scheme;
  std::string parameter;
  double value = 0.0;
  std::optional<std::uint64_t> seed;  // empty for overlay rows
  std::optional<double> sum_rate;     // empty when the job failed
  int iterations = 0;
  double wallclock = 0.0;
  bool converged = false;
  std::string error;
  std::string source = "simulated";
};

/// Worker count from ARIS_THREADS, else the hardware concurrency (>= 1).
int sweep_threads();

/// Runs the scheme x value x seed grid. Jobs are independent; each writes
/// its own row file under output_dir/jobs when output_dir is set, and the
/// rows come back in grid order (scheme, value, seed). A failing job is
/// recorded in its row and the sweep continues.
std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepSpec& spec, int threads = 1,
                                const std::function<void(const SweepRow&)>& on_row = {});

/// scheme,param,value,seed,sum_rate,iterations,wallclock,converged,error
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// Reads externally supplied results (columns scheme,param,value,sum_rate;
/// seed optional) to be shown next to simulated ones.
std::vector<SweepRow> read_overlay_csv(const std::filesystem::path& path);

struct SweepMean {
  std::string scheme;
  std::string parameter;
  double value = 0.0;
  int runs = 0;
  double mean_sum_rate = 0.0;
  std::string source;
};

/// Mean sum-rate per (scheme, value) over the successful rows, in first-seen order.
std::vector<SweepMean> sweep_means(const std::vector<SweepRow>& rows);
void write_sweep_means(std::ostream& out, const std::vector<SweepMean>& means);

}  // namespace aris
