#include "aris/report_io.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>
#include <spdlog/fmt/fmt.h>

#include <json.hpp>

namespace aris {

namespace {

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

void write_jammer_comment(std::ostream& out, const char* label, const Vec2& p) {
  out << "# " << label << "_jammer," << format_number(p.x()) << ',' << format_number(p.y())
      << '\n';
}

std::string render(const std::function<void(std::ostream&)>& body) {
  std::ostringstream s;
  body(s);
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string format_number(double value) { return fmt::format("{}", value); }

void write_report_csv(std::ostream& out, const RunReport& report) {
  out << "# aris report v" << kReportSchemaVersion << '\n';
  out << "kind,iteration,sum_rate,after_beamform,after_phase,after_density,phase_iterations,"
         "density_step,scheme,converged,iterations,eval_jammer_x,eval_jammer_y,"
         "eval_lambda_max,design_jammer_x,design_jammer_y,residual_sum_rate,"
         "max_modulus_deviation,max_tangency_residual,max_zf_leakage,max_budget_error\n";
  const std::string summary_blank(13, ',');  // scheme .. max_budget_error
  out << "iteration,0," << format_number(report.trace.front()) << ",,,,," << summary_blank
      << '\n';
  for (const StageRecord& s : report.stages) {
    out << "iteration," << s.iteration << ','
        << format_number(report.trace[static_cast<std::size_t>(s.iteration)]) << ','
        << format_number(s.after_beamform) << ',' << format_number(s.after_phase) << ','
        << format_number(s.after_density) << ',' << s.phase_iterations << ','
        << format_number(s.density_step) << summary_blank << '\n';
  }
  const InvariantLog& inv = report.invariants;
  out << "summary," << report.iterations << ',' << format_number(report.sum_rate) << ",,,,,,"
      << scheme_name(report.scheme) << ',' << (report.converged ? 1 : 0) << ','
      << report.iterations << ',' << format_number(report.evaluation_jammer.position.x()) << ','
      << format_number(report.evaluation_jammer.position.y()) << ','
      << format_number(report.evaluation_jammer.lambda_max) << ','
      << format_number(report.design_jammer.position.x()) << ','
      << format_number(report.design_jammer.position.y()) << ','
      << optional_number(report.residual_sum_rate) << ','
      << format_number(inv.max_modulus_deviation) << ','
      << format_number(inv.max_tangency_residual) << ',' << format_number(inv.max_zf_leakage)
      << ',' << format_number(inv.max_budget_error) << '\n';
}

void write_density_map(std::ostream& out, const SystemState& state, const GainField& gain,
                       const RunReport& report) {
  const SystemConfig& c = state.config();
  const Grid& grid = state.scenario->grid;
  out << "# aris density map v" << kReportSchemaVersion << '\n';
  if (c.jammer_true) write_jammer_comment(out, "true", *c.jammer_true);
  write_jammer_comment(out, "estimated", c.jammer_estimate);
  write_jammer_comment(out, "optimized", report.evaluation_jammer.position);
  out << "# rho_max," << format_number(c.max_density) << '\n';
  out << "cell,x,y,rho,G\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2& p = grid[i].center;
    out << i << ',' << format_number(p.x()) << ',' << format_number(p.y()) << ','
        << format_number(state.density[i]) << ','
        << (i < gain.g.size() ? format_number(gain.g[i]) : std::string()) << '\n';
  }
}

void write_phase_dump(std::ostream& out, const PhaseField& phases) {
  out << "# aris phases v" << kReportSchemaVersion << '\n';
  out << "cell,element,re,im\n";
  const CMatrix& t = phases.matrix();
  for (Eigen::Index c = 0; c < t.cols(); ++c)
    for (Eigen::Index n = 0; n < t.rows(); ++n)
      out << c << ',' << n << ',' << format_number(t(n, c).real()) << ','
          << format_number(t(n, c).imag()) << '\n';
}

void write_landscape(std::ostream& out, const std::vector<LandscapePoint>& points) {
  out << "# aris jammer landscape v" << kReportSchemaVersion << '\n';
  out << "x,y,lambda_max\n";
  for (const LandscapePoint& p : points)
    out << format_number(p.position.x()) << ',' << format_number(p.position.y()) << ','
        << format_number(p.lambda_max) << '\n';
}

void write_timings(std::ostream& out, const RunReport& report) {
  const StageTimes& t = report.times;
  out << "stage,seconds\n"
      << "jammer," << t.jammer << '\n'
      << "beamform," << t.beamform << '\n'
      << "phase," << t.phase << '\n'
      << "density," << t.density << '\n'
      << "total," << t.total << '\n';
}

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) &&
                  EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i)
    hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return hex.str();
}

std::vector<std::filesystem::path> write_run_directory(const std::filesystem::path& dir,
                                                       const RunConfig& config,
                                                       const RunReport& report,
                                                       const RunOutputs& outputs) {
  std::filesystem::create_directories(dir);
  const SystemState& state = report.final_state;

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("report.csv", render([&](std::ostream& o) { write_report_csv(o, report); }));
  const GainField gain = net_marginal_gain(state);
  files.emplace_back("density_map.csv",
                     render([&](std::ostream& o) { write_density_map(o, state, gain, report); }));
  if (outputs.phase_dump)
    files.emplace_back("phases.csv",
                       render([&](std::ostream& o) { write_phase_dump(o, state.phases); }));
  if (outputs.landscape) {
    const JammerObjective view = jammer_objective(state);
    const auto points = lambda_landscape(view, config.system.jammer_estimate,
                                         config.system.uncertainty_radius,
                                         outputs.landscape_spacing);
    files.emplace_back("landscape.csv",
                       render([&](std::ostream& o) { write_landscape(o, points); }));
  }

  nlohmann::ordered_json manifest;
  manifest["schema_version"] = kReportSchemaVersion;
  manifest["scheme"] = std::string(scheme_name(report.scheme));
  manifest["config"] = nlohmann::json::parse(config_json(config));
  nlohmann::ordered_json hashes = nlohmann::ordered_json::object();
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    hashes[name] = git_blob_sha1(content);
    written.push_back(dir / name);
  }
  manifest["files"] = hashes;
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  // Wall-clock data lives outside the hashed set.
  write_file(dir / "timings.csv", render([&](std::ostream& o) { write_timings(o, report); }));
  return written;
}

}  // namespace aris
