#include "aris/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "aris/report_io.hpp"

namespace aris {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

void write_row(std::ostream& out, const SweepRow& r) {
  out << r.scheme << ',' << r.parameter << ',' << format_number(r.value) << ','
      << (r.seed ? std::to_string(*r.seed) : std::string()) << ','
      << (r.sum_rate ? format_number(*r.sum_rate) : std::string()) << ',' << r.iterations << ','
      << format_number(r.wallclock) << ',' << (r.converged ? 1 : 0) << ',';
  // Errors are free text; keep them on one CSV field.
  std::string e = r.error;
  std::replace(e.begin(), e.end(), ',', ';');
  std::replace(e.begin(), e.end(), '\n', ' ');
  out << e << '\n';
}

constexpr const char* kHeader =
    "scheme,param,value,seed,sum_rate,iterations,wallclock,converged,error\n";

}  // namespace

const std::vector<std::string>& sweep_parameters() {
  static const std::vector<std::string> names = {"p_jam", "epsilon", "n_elements", "q_uavs",
                                                 "rho_max"};
  return names;
}

std::vector<std::string> validate_sweep(const SweepSpec& spec) {
  std::vector<std::string> problems;
  const auto& names = sweep_parameters();
  if (std::find(names.begin(), names.end(), spec.parameter) == names.end())
    problems.push_back("sweep parameter '" + spec.parameter +
                       "' is not one of p_jam, epsilon, n_elements, q_uavs, rho_max");
  if (spec.values.empty()) problems.push_back("sweep value list is empty");
  if (spec.schemes.empty()) problems.push_back("sweep scheme list is empty");
  if (spec.seeds.empty()) problems.push_back("sweep seed list is empty");
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : spec.seeds)
    if (!seen.insert(s).second) problems.push_back("seed " + std::to_string(s) + " repeated");
  if (spec.parameter == "n_elements")
    for (double v : spec.values)
      if (v != std::floor(v)) problems.push_back("n_elements values must be integers");
  return problems;
}

int sweep_threads() {
  if (const char* env = std::getenv("ARIS_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
    spdlog::warn("ignoring ARIS_THREADS='{}' (expected a positive integer)", env);
  }
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const SweepSpec& spec, int threads,
                                const std::function<void(const SweepRow&)>& on_row) {
  if (auto problems = validate_sweep(spec); !problems.empty())
    throw ConfigError(std::move(problems));

  struct Job {
    Scheme scheme;
    double value;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Scheme scheme : spec.schemes)
    for (double value : spec.values)
      for (std::uint64_t seed : spec.seeds) jobs.push_back({scheme, value, seed});

  const bool write_jobs = !spec.output_dir.empty();
  if (write_jobs) std::filesystem::create_directories(spec.output_dir / "jobs");

  std::vector<SweepRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      SweepRow row;
      row.scheme = std::string(scheme_name(job.scheme));
      row.parameter = spec.parameter;
      row.value = job.value;
      row.seed = job.seed;
      const auto start = std::chrono::steady_clock::now();
      try {
        RunConfig config = base;
        set_parameter(config, spec.parameter, job.value);
        config.system.seed = job.seed;
        const RunReport report = run_scheme(job.scheme, config.system, config.optimizer);
        row.sum_rate = report.sum_rate;
        row.iterations = report.iterations;
        row.converged = report.converged;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.wallclock =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (write_jobs) {
        std::ostringstream name;
        name << "job_" << i << ".csv";
        std::ofstream out(spec.output_dir / "jobs" / name.str());
        out << kHeader;
        write_row(out, row);
      }
      rows[i] = row;
      if (on_row) {
        const std::lock_guard lock(report_mutex);
        on_row(row);
      }
    }
  };

  const int workers = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kHeader;
  for (const SweepRow& r : rows) write_row(out, r);
}

std::vector<SweepRow> read_overlay_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read overlay file '" + path.string() + "'"});
  std::string line;
  std::map<std::string, std::size_t> column;
  std::vector<SweepRow> rows;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split(line, ',');
    if (column.empty()) {
      for (std::size_t i = 0; i < fields.size(); ++i) column[trim(fields[i])] = i;
      for (const char* required : {"scheme", "param", "value", "sum_rate"})
        if (!column.count(required))
          throw ConfigError({"overlay file lacks column '" + std::string(required) + "'"});
      continue;
    }
    auto field = [&](const std::string& name) -> std::string {
      const auto it = column.find(name);
      return it != column.end() && it->second < fields.size() ? trim(fields[it->second]) : "";
    };
    SweepRow row;
    row.source = "overlay";
    try {
      row.scheme = field("scheme");
      row.parameter = field("param");
      row.value = std::stod(field("value"));
      row.sum_rate = std::stod(field("sum_rate"));
      if (const std::string s = field("seed"); !s.empty()) row.seed = std::stoull(s);
    } catch (const std::exception&) {
      throw ConfigError({"overlay file line " + std::to_string(line_no) + " is malformed"});
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<SweepMean> sweep_means(const std::vector<SweepRow>& rows) {
  std::vector<SweepMean> means;
  for (const SweepRow& r : rows) {
    if (!r.sum_rate) continue;
    auto it = std::find_if(means.begin(), means.end(), [&](const SweepMean& m) {
      return m.scheme == r.scheme && m.parameter == r.parameter && m.value == r.value &&
             m.source == r.source;
    });
    if (it == means.end()) {
      means.push_back({r.scheme, r.parameter, r.value, 0, 0.0, r.source});
      it = std::prev(means.end());
    }
    it->mean_sum_rate += *r.sum_rate;
    ++it->runs;
  }
  for (SweepMean& m : means) m.mean_sum_rate /= m.runs;
  return means;
}

void write_sweep_means(std::ostream& out, const std::vector<SweepMean>& means) {
  out << "scheme,param,value,runs,mean_sum_rate,source\n";
  for (const SweepMean& m : means)
    out << m.scheme << ',' << m.parameter << ',' << format_number(m.value) << ',' << m.runs << ','
        << format_number(m.mean_sum_rate) << ',' << m.source << '\n';
}

}  // namespace aris
