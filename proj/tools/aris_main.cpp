// aris: run, sweep and inspect the aerial-RIS anti-jamming optimizer.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "aris/config_io.hpp"
#include "aris/driver.hpp"
#include "aris/report_io.hpp"
#include "aris/sweep.hpp"

namespace {

using namespace aris;

constexpr int kExitInvalid = 2;
constexpr int kExitFailed = 3;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "JSON config file (defaults when omitted)");
  cmd->add_option("--seed", c.seed, "Random seed (overrides the config)");
  cmd->add_option("--set", c.overrides, "key=value override, repeatable")->allow_extra_args(false);
}

RunConfig resolve(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  std::vector<std::string> overrides = c.overrides;
  if (c.seed) overrides.push_back("seed=" + std::to_string(*c.seed));
  return overrides.empty() ? config : with_overrides(config, overrides);
}

void print_problems(const ConfigError& e) {
  std::cerr << "invalid configuration:\n";
  for (const std::string& p : e.problems()) std::cerr << "  - " << p << '\n';
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError({"cannot read value '" + item + "'"});
    }
  }
  return out;
}

// "1-10" or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream in(text);
  std::string item;
  try {
    while (std::getline(in, item, ',')) {
      const auto dash = item.find('-');
      if (dash != std::string::npos && dash > 0) {
        const auto lo = std::stoull(item.substr(0, dash));
        const auto hi = std::stoull(item.substr(dash + 1));
        if (hi < lo) throw std::invalid_argument(item);
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
      } else {
        out.push_back(std::stoull(item));
      }
    }
  } catch (const std::exception&) {
    throw ConfigError({"cannot read seed list '" + text + "'"});
  }
  return out;
}

std::vector<Scheme> parse_schemes(const std::vector<std::string>& names) {
  std::vector<Scheme> out;
  std::vector<std::string> problems;
  for (const std::string& n : names) {
    if (n == "all") {
      const auto& all = all_schemes();
      out.insert(out.end(), all.begin(), all.end());
    } else if (auto s = parse_scheme(n)) {
      out.push_back(*s);
    } else {
      problems.push_back("unknown scheme '" + n + "'");
    }
  }
  if (!problems.empty()) throw ConfigError(problems);
  return out;
}

void print_summary(const RunReport& r) {
  std::cout << scheme_name(r.scheme) << ": sum-rate " << format_number(r.sum_rate)
            << " bits/s/Hz after " << r.iterations << " iterations"
            << (r.converged ? " (converged)" : " (not converged)") << '\n'
            << "jammer at (" << format_number(r.evaluation_jammer.position.x()) << ", "
            << format_number(r.evaluation_jammer.position.y()) << ")"
            << (r.evaluation_jammer.on_boundary ? " on the uncertainty boundary" : "") << '\n';
  if (r.residual_sum_rate)
    std::cout << "residual sum-rate vs re-optimized jammer " << format_number(*r.residual_sum_rate)
              << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aerial RIS swarm anti-jamming optimizer"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  Common run_opts;
  std::string run_out = "aris_run";
  std::string run_scheme_name = "proposed";
  bool run_phases = false;
  bool run_landscape = false;
  double landscape_spacing = 1.0;
  auto* run = app.add_subcommand("run", "Optimize one scheme and write a run directory");
  add_common(run, run_opts);
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--scheme", run_scheme_name, "proposed, s1, s2 or s3");
  run->add_flag("--phases", run_phases, "Also dump the RIS coefficients");
  run->add_flag("--landscape", run_landscape, "Also write the jammer lambda_max landscape");
  run->add_option("--landscape-spacing", landscape_spacing, "Landscape lattice spacing (m)")
      ->check(CLI::PositiveNumber);

  Common sweep_opts;
  std::string sweep_out = "aris_sweep";
  std::string sweep_param;
  std::string sweep_values;
  std::vector<std::string> sweep_schemes{"proposed"};
  std::string sweep_seeds = "1";
  std::string overlay;
  auto* sweep = app.add_subcommand("sweep", "Run a scheme x value x seed grid");
  add_common(sweep, sweep_opts);
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--param", sweep_param, "p_jam, epsilon, n_elements, q_uavs or rho_max")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("--schemes", sweep_schemes, "Schemes (or 'all')")->delimiter(',');
  sweep->add_option("--seeds", sweep_seeds, "Seeds, e.g. 1-10 or 1,5,7");
  sweep->add_option("--overlay", overlay, "CSV of external results to list next to ours");

  Common map_opts;
  std::string map_out = "density_map.csv";
  auto* density_map = app.add_subcommand("density-map", "Optimize and write the density map");
  add_common(density_map, map_opts);
  density_map->add_option("--out", map_out, "Output CSV");

  Common land_opts;
  std::string land_out = "landscape.csv";
  bool land_converged = false;
  double land_spacing = 1.0;
  auto* landscape =
      app.add_subcommand("jammer-landscape", "lambda_max over the jammer uncertainty disk");
  add_common(landscape, land_opts);
  landscape->add_option("--out", land_out, "Output CSV");
  landscape->add_flag("--converged", land_converged,
                      "Evaluate against the optimized defence instead of the initial one");
  landscape->add_option("--spacing", land_spacing, "Lattice spacing (m)")
      ->check(CLI::PositiveNumber);

  Common validate_opts;
  auto* validate = app.add_subcommand("validate", "Check a config and print its canonical form");
  add_common(validate, validate_opts);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*validate) {
      std::cout << config_json(resolve(validate_opts));
      return 0;
    }

    if (*run) {
      const RunConfig config = resolve(run_opts);
      const auto scheme = parse_schemes({run_scheme_name}).front();
      const RunReport report = run_scheme(scheme, config.system, config.optimizer);
      RunOutputs outputs;
      outputs.phase_dump = run_phases;
      outputs.landscape = run_landscape;
      outputs.landscape_spacing = landscape_spacing;
      write_run_directory(run_out, config, report, outputs);
      print_summary(report);
      std::cout << "wrote " << run_out << '\n';
      return 0;
    }

    if (*sweep) {
      const RunConfig config = resolve(sweep_opts);
      SweepSpec spec;
      spec.parameter = sweep_param;
      spec.values = parse_values(sweep_values);
      spec.schemes = parse_schemes(sweep_schemes);
      spec.seeds = parse_seeds(sweep_seeds);
      spec.output_dir = sweep_out;
      if (auto problems = validate_sweep(spec); !problems.empty())
        throw ConfigError(std::move(problems));
      std::vector<SweepRow> extra;
      if (!overlay.empty()) extra = read_overlay_csv(overlay);

      const int threads = sweep_threads();
      spdlog::info("sweep {}: {} jobs on {} threads", spec.parameter,
                   spec.schemes.size() * spec.values.size() * spec.seeds.size(), threads);
      auto rows = run_sweep(config, spec, threads, [](const SweepRow& r) {
        if (r.error.empty())
          spdlog::info("{} {}={} seed {}: {:.4f}", r.scheme, r.parameter, r.value, *r.seed,
                       *r.sum_rate);
        else
          spdlog::warn("{} {}={} seed {} failed: {}", r.scheme, r.parameter, r.value, *r.seed,
                       r.error);
      });
      std::size_t failed = 0;
      for (const SweepRow& r : rows) failed += r.error.empty() ? 0 : 1;
      {
        std::ofstream out(std::filesystem::path(sweep_out) / "sweep.csv");
        write_sweep_csv(out, rows);
      }
      rows.insert(rows.end(), extra.begin(), extra.end());
      {
        std::ofstream out(std::filesystem::path(sweep_out) / "means.csv");
        write_sweep_means(out, sweep_means(rows));
      }
      std::cout << "wrote " << sweep_out << "/sweep.csv and means.csv";
      if (failed) std::cout << " (" << failed << " failed jobs)";
      std::cout << '\n';
      return failed == rows.size() - extra.size() ? kExitFailed : 0;
    }

    if (*density_map) {
      const RunConfig config = resolve(map_opts);
      const RunReport report = run_scheme(Scheme::Proposed, config.system, config.optimizer);
      const GainField gain = net_marginal_gain(report.final_state);
      std::ofstream out(map_out);
      write_density_map(out, report.final_state, gain, report);
      if (!out) throw std::runtime_error("cannot write '" + map_out + "'");
      print_summary(report);
      std::cout << "wrote " << map_out << '\n';
      return 0;
    }

    if (*landscape) {
      const RunConfig config = resolve(land_opts);
      SystemState state = initial_state(Scenario::build(config.system));
      if (land_converged)
        state = run_scheme(Scheme::Proposed, config.system, config.optimizer).final_state;
      const JammerObjective view = jammer_objective(state);
      const auto points = lambda_landscape(view, config.system.jammer_estimate,
                                           config.system.uncertainty_radius, land_spacing);
      std::ofstream out(land_out);
      write_landscape(out, points);
      if (!out) throw std::runtime_error("cannot write '" + land_out + "'");
      std::cout << "wrote " << points.size() << " points to " << land_out << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    print_problems(e);
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return 0;
}
