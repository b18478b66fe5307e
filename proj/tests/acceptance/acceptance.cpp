// Acceptance suite: one PASS/FAIL line per criterion.
//
//   aris_acceptance                 all criteria
//   aris_acceptance --criterion 5   one criterion (exit code 1 on FAIL)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include "aris/config_io.hpp"
#include "aris/driver.hpp"
#include "aris/report_io.hpp"
#include "aris/sweep.hpp"

using namespace aris;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

CVector random_unit(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (int i = 0; i < n; ++i) v(i) = {g(rng), g(rng)};
  return v.normalized();
}

// 1. Analytic phase gradient against central differences of the sum-rate.
Outcome gradient_oracle() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SystemConfig c;
    c.users = 4;
    c.ris_elements = 8;
    c.grid_nx = c.grid_ny = 6;
    c.seed = seed;
    SystemState s = initial_state(Scenario::build(c));
    s.jammer = fixed_jammer(jammer_objective(s), c.jammer_estimate);
    s.beams = beamform_update(s);
    const CMatrix g = euclidean_gradient(s);
    const auto areas = s.density.areas();
    std::mt19937_64 rng(seed * 7919);
    std::uniform_int_distribution<Eigen::Index> cell(0, 35), element(0, 7);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Index cc = cell(rng), n = element(rng);
      const cd theta = s.phases.matrix()(n, cc);
      const double h = 1e-5;
      SystemState probe = s;
      CMatrix t = s.phases.matrix();
      t(n, cc) = theta * std::polar(1.0, h);
      probe.phases = PhaseField(t);
      const double up = sum_rate(probe);
      t(n, cc) = theta * std::polar(1.0, -h);
      probe.phases = PhaseField(t);
      const double down = sum_rate(probe);
      const double fd = (up - down) / (2 * h);
      const double analytic =
          2.0 * (std::conj(g(n, cc)) * cd(0, 1) * theta).real() * areas[static_cast<std::size_t>(cc)];
      worst = std::max(worst, relative_error(analytic, fd));
      ++checked;
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst < 1e-4 && elapsed < 60.0,
          fmt::format("{} coordinates over 5 seeds, worst relative error {:.2e} (< 1e-4), {:.1f} s",
                      checked, worst, elapsed)};
}

// 200 points spread evenly over the disk (sunflower lattice, rim included).
std::vector<Vec2> disk_lattice(const Vec2& center, double radius, int count) {
  std::vector<Vec2> out;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double r = radius * std::sqrt((i + 0.5) / count);
    out.push_back(center + r * Vec2(std::cos(i * golden), std::sin(i * golden)));
  }
  for (int i = 0; i < 32; ++i) {
    const double a = 2.0 * std::numbers::pi * i / 32;
    out.push_back(center + radius * Vec2(std::cos(a), std::sin(a)));
  }
  return out;
}

// 2. Worst-case jammer against a dense sample of the uncertainty disk.
Outcome jammer_oracle() {
  const auto t0 = Clock::now();
  double worst_ratio = INFINITY;
  double worst_v = -INFINITY;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SystemConfig c;
    c.seed = seed;
    c.uncertainty_radius = 30.0;
    const SystemState s = initial_state(Scenario::build(c));
    const JammerObjective obj = jammer_objective(s);
    const JammerStrategy js = optimize_jammer(obj, c.jammer_estimate, c.uncertainty_radius);
    double best = 0.0;
    // 200 interior lattice points plus 32 on the rim.
    for (const Vec2& p : disk_lattice(c.jammer_estimate, c.uncertainty_radius, 200))
      best = std::max(best, obj.lambda_max(p));
    worst_ratio = std::min(worst_ratio, js.lambda_max / best);

    const CMatrix r = obj.covariance(js.position).r;
    const double mine = (js.beamformer.adjoint() * r * js.beamformer)(0).real();
    std::mt19937_64 rng(seed);
    for (int i = 0; i < 1000; ++i) {
      const CVector v = random_unit(obj.antennas(), rng);
      worst_v = std::max(worst_v, ((v.adjoint() * r * v)(0).real() - mine) / mine);
    }
  }
  const double elapsed = seconds_since(t0);
  return {worst_ratio >= 0.99 && worst_v <= 1e-12 && elapsed < 120.0,
          fmt::format("min lambda / dense max {:.4f} (>= 0.99), worst random v' excess {:.1e}, {:.1f} s",
                      worst_ratio, worst_v, elapsed)};
}

// 3. Bisection DT-ARA against the sort-and-fill oracle.
Outcome dtara_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_diff = 0.0, worst_budget = 0.0;
  int worst_fractional = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t cells = 400;
    std::vector<double> gain(cells), areas(cells, 100.0);
    for (double& g : gain) g = gauss(rng) * std::pow(10.0, 4.0 * unit(rng) - 2.0);
    // Some fields carry ties.
    if (trial % 5 == 0)
      for (std::size_t c = 0; c < cells; c += 3) gain[c] = std::round(gain[c]);
    const double rho_max = 0.02 + 0.18 * unit(rng);
    const double q = unit(rng) * rho_max * 100.0 * cells;
    const DtAraResult sorted = dt_ara(gain, areas, q, rho_max);
    const DtAraResult bis = dt_ara_bisection(gain, areas, q, rho_max);
    int fractional = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      worst_diff = std::max(worst_diff, std::abs(sorted.density[c] - bis.density[c]));
      const double r = bis.density[c];
      if (r > 0.0 && r < rho_max) ++fractional;
    }
    worst_fractional = std::max(worst_fractional, fractional);
    if (q > 0.0) worst_budget = std::max(worst_budget, std::abs(bis.density.integral() - q) / q);
  }
  return {worst_diff <= 1e-9 && worst_budget <= 1e-9 && worst_fractional <= 1,
          fmt::format("100 fields: max cell difference {:.1e}, budget error {:.1e}, "
                      "max fractional cells {}",
                      worst_diff, worst_budget, worst_fractional)};
}

// 4. Water-filling against random feasible allocations.
Outcome water_filling_oracle() {
  auto rate = [](const std::vector<double>& p, const std::vector<double>& levels) {
    double r = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) r += std::log2(1.0 + p[k] / levels[k]);
    return r;
  };
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  int instances = 0, beaten = 0;
  for (int k_users = 1; k_users <= 4; ++k_users) {
    for (int trial = 0; trial < 25; ++trial, ++instances) {
      std::vector<double> levels(static_cast<std::size_t>(k_users));
      for (double& l : levels) l = std::pow(10.0, 3.0 * unit(rng) - 1.5);
      const double total = std::pow(10.0, 3.0 * unit(rng) - 1.0);
      const WaterFilling wf = water_fill(levels, total);
      const double best = rate(wf.powers, levels);
      for (int s = 0; s < 10000; ++s) {
        std::vector<double> p(levels.size());
        double z = 0.0;
        for (double& x : p) z += (x = expo(rng));
        // Occasionally spend only part of the budget.
        const double spend = s % 10 == 0 ? unit(rng) : 1.0;
        for (double& x : p) x *= spend * total / z;
        if (rate(p, levels) > best + 1e-12) {
          ++beaten;
          break;
        }
      }
    }
  }
  const std::vector<double> example{1.0, 3.0};
  const WaterFilling wf = water_fill(example, 2.0);
  const bool exact = wf.powers[0] == 2.0 && wf.powers[1] == 0.0;
  return {beaten == 0 && exact,
          fmt::format("{} instances x 1e4 random allocations, {} beaten; [1,3], P=2 -> [{}, {}]",
                      instances, beaten, format_number(wf.powers[0]),
                      format_number(wf.powers[1]))};
}

struct DefaultRuns {
  std::vector<RunReport> reports;
  double seconds = 0.0;
};

// Proposed scheme on the default configuration, seeds 1..10.
const DefaultRuns& default_runs() {
  static const DefaultRuns runs = [] {
    DefaultRuns out;
    const auto t0 = Clock::now();
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      SystemConfig c;
      c.seed = seed;
      out.reports.push_back(run_scheme(Scheme::Proposed, c));
      const RunReport& r = out.reports.back();
      spdlog::info("default seed {}: {:.4f} bits/s/Hz, {} iterations, converged {}, {:.1f} s",
                   seed, r.sum_rate, r.iterations, r.converged, r.times.total);
    }
    out.seconds = seconds_since(t0);
    return out;
  }();
  return runs;
}

// 5. Monotone outer trace and fast convergence on the default configuration.
Outcome monotone_convergence() {
  const DefaultRuns& runs = default_runs();
  double worst_drop = 0.0;
  int fast = 0;
  std::ostringstream its;
  for (const RunReport& r : runs.reports) {
    for (std::size_t i = 1; i < r.trace.size(); ++i)
      worst_drop = std::max(worst_drop, r.trace[i - 1] - r.trace[i]);
    if (r.converged && r.iterations <= 10) ++fast;
    its << (its.tellp() > 0 ? " " : "") << r.iterations << (r.converged ? "" : "*");
  }
  return {worst_drop <= 1e-9 && fast >= 8 && runs.seconds < 600.0,
          fmt::format("largest trace drop {:.1e}; converged within 10 iterations on {}/10 seeds "
                      "(iterations: {}; * = not converged); {:.0f} s (< 600)",
                      worst_drop, fast, its.str(), runs.seconds)};
}

// 6. DT-ARA time does not depend on the swarm size.
Outcome q_independence() {
  const SystemConfig c;
  const auto rows = complexity_probe(c, {100.0, 1000.0}, 500);
  const double ratio = rows[1].seconds / rows[0].seconds;
  return {ratio >= 0.5 && ratio <= 2.0,
          fmt::format("Q=100: {:.2e} s, Q=1000: {:.2e} s, ratio {:.2f} (within [0.5, 2])",
                      rows[0].seconds, rows[1].seconds, ratio)};
}

// 7. Trend suite over 10 seeds.
Outcome trend_suite() {
  const auto t0 = Clock::now();
  RunConfig base;
  base.system.grid_nx = base.system.grid_ny = 10;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  const int threads = sweep_threads();

  auto means = [&](const std::string& param, const std::vector<double>& values,
                   const std::vector<Scheme>& schemes) {
    SweepSpec spec;
    spec.parameter = param;
    spec.values = values;
    spec.schemes = schemes;
    spec.seeds = seeds;
    const auto rows = run_sweep(base, spec, threads);
    std::map<std::pair<std::string, double>, double> out;
    for (const SweepMean& m : sweep_means(rows)) {
      if (m.runs != static_cast<int>(seeds.size()))
        spdlog::warn("{} {}={}: only {} runs succeeded", m.scheme, param, m.value, m.runs);
      out[{m.scheme, m.value}] = m.mean_sum_rate;
    }
    return out;
  };
  const std::string P(scheme_name(Scheme::Proposed)), S1(scheme_name(Scheme::S1_NonRobust)),
      S2(scheme_name(Scheme::S2_UniformOptPhase)), S3(scheme_name(Scheme::S3_UniformRandomPhase));

  std::vector<std::string> lines;
  bool pass = true;

  const std::vector<double> pj{40, 50, 60, 70, 80};
  auto a = means("p_jam", pj, {Scheme::Proposed});
  bool ok = true;
  std::string series;
  for (std::size_t i = 0; i < pj.size(); ++i) {
    series += fmt::format("{}{:.3f}", i ? " " : "", a[{P, pj[i]}]);
    if (i > 0) ok &= a[{P, pj[i]}] < a[{P, pj[i - 1]}];
  }
  lines.push_back(fmt::format("(a) {} P_J 40..80: {}", ok ? "ok" : "VIOLATED", series));
  pass &= ok;

  auto b = means("epsilon", {10, 30}, {Scheme::Proposed, Scheme::S1_NonRobust});
  const double gap10 = b[{P, 10}] - b[{S1, 10}], gap30 = b[{P, 30}] - b[{S1, 30}];
  ok = gap30 > 0.0 && gap30 > gap10;
  lines.push_back(fmt::format("(b) {} eps=30 proposed {:.3f} vs S1 {:.3f}, gap {:.3f} vs gap {:.3f} at eps=10",
                              ok ? "ok" : "VIOLATED", b[{P, 30}], b[{S1, 30}], gap30, gap10));
  pass &= ok;

  auto c = means("n_elements", {20, 60, 100}, {Scheme::Proposed});
  ok = c[{P, 60}] >= c[{P, 20}] && c[{P, 100}] >= c[{P, 60}];
  lines.push_back(fmt::format("(c) {} N 20/60/100: {:.3f} {:.3f} {:.3f}", ok ? "ok" : "VIOLATED",
                              c[{P, 20}], c[{P, 60}], c[{P, 100}]));
  pass &= ok;

  auto d = means("q_uavs", {100, 400, 800}, {Scheme::Proposed});
  ok = d[{P, 400}] >= d[{P, 100}] && d[{P, 800}] >= d[{P, 400}];
  lines.push_back(fmt::format("(d) {} Q 100/400/800: {:.3f} {:.3f} {:.3f}", ok ? "ok" : "VIOLATED",
                              d[{P, 100}], d[{P, 400}], d[{P, 800}]));
  pass &= ok;

  auto e = means("p_jam", {50}, {Scheme::S2_UniformOptPhase, Scheme::S3_UniformRandomPhase});
  const double prop = a[{P, 50}];
  ok = prop >= e[{S2, 50}] && e[{S2, 50}] >= e[{S3, 50}];
  lines.push_back(fmt::format("(e) {} proposed {:.3f} >= S2 {:.3f} >= S3 {:.3f}",
                              ok ? "ok" : "VIOLATED", prop, e[{S2, 50}], e[{S3, 50}]));
  pass &= ok;

  std::string detail = fmt::format("10 seeds, 10x10 grid, {:.0f} s", seconds_since(t0));
  for (const auto& l : lines) detail += "\n    " + l;
  return {pass, detail};
}

// 8. Jammer on the rim on the user side, density thinned near the jammer.
Outcome geometry_behavior() {
  const DefaultRuns& runs = default_runs();
  int on_rim = 0, user_side = 0, thinned = 0;
  std::string per_seed;
  for (const RunReport& r : runs.reports) {
    const SystemState& s = r.final_state;
    const SystemConfig& c = s.config();
    const Vec2 j = r.evaluation_jammer.position;
    const Vec2 offset = j - c.jammer_estimate;
    const bool rim = offset.norm() >= 0.99 * c.uncertainty_radius;
    const bool side = offset.dot(c.user_cluster_center - c.jammer_estimate) > 0.0;
    double near = 0.0, near_area = 0.0;
    for (std::size_t cell = 0; cell < s.scenario->grid.size(); ++cell) {
      if ((s.scenario->grid[cell].center - j).norm() > 20.0) continue;
      near += s.density.mass(cell);
      near_area += s.density.areas()[cell];
    }
    const double global = s.density.integral() / s.density.total_area();
    const double ratio = near_area > 0.0 ? near / near_area / global : NAN;
    const bool thin = near_area > 0.0 && ratio < 1.0;
    on_rim += rim;
    user_side += side;
    thinned += thin;
    per_seed += fmt::format("\n    seed {}: |j - j_hat| = {:.2f} m at {:.0f} deg, near/global density {:.5f}",
                            c.seed, offset.norm(),
                            std::atan2(offset.y(), offset.x()) * 180.0 / std::numbers::pi, ratio);
  }
  const int n = static_cast<int>(runs.reports.size());
  return {on_rim == n && user_side == n && thinned == n,
          fmt::format("on rim {}/{}, user-cluster side {}/{}, thinned near jammer {}/{}{}", on_rim,
                      n, user_side, n, thinned, n, per_seed)};
}

// 9. Structural invariants and byte-identical reruns.
Outcome structural_invariants() {
  InvariantLog worst;
  bool identical = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    SystemConfig c;
    c.seed = seed;
    c.grid_nx = c.grid_ny = 8;
    c.ris_elements = 16;
    OptimizerOptions o;
    o.max_outer = 5;
    std::string first;
    for (int rerun = 0; rerun < 2; ++rerun) {
      const RunReport r = run_scheme(Scheme::Proposed, c, o);
      std::ostringstream out;
      write_report_csv(out, r);
      write_density_map(out, r.final_state, net_marginal_gain(r.final_state), r);
      write_phase_dump(out, r.final_state.phases);
      if (rerun == 0) first = out.str();
      else identical &= out.str() == first;
      worst.max_modulus_deviation =
          std::max(worst.max_modulus_deviation, r.invariants.max_modulus_deviation);
      worst.max_tangency_residual =
          std::max(worst.max_tangency_residual, r.invariants.max_tangency_residual);
      worst.max_zf_leakage = std::max(worst.max_zf_leakage, r.invariants.max_zf_leakage);
      worst.max_budget_error = std::max(worst.max_budget_error, r.invariants.max_budget_error);
    }
  }
  const bool pass = worst.max_modulus_deviation <= 1e-9 && worst.max_tangency_residual <= 1e-12 &&
                    worst.max_zf_leakage <= 1e-12 && worst.max_budget_error <= 1e-9 && identical;
  return {pass, fmt::format("modulus {:.1e}, tangency {:.1e}, ZF leakage {:.1e}, budget {:.1e}, "
                            "reruns {}",
                            worst.max_modulus_deviation, worst.max_tangency_residual,
                            worst.max_zf_leakage, worst.max_budget_error,
                            identical ? "byte-identical" : "DIFFER")};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aris acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::info);

  const std::vector<Criterion> criteria = {
      {1, "gradient_oracle", gradient_oracle},
      {2, "jammer_oracle", jammer_oracle},
      {3, "dtara_oracle", dtara_oracle},
      {4, "water_filling_oracle", water_filling_oracle},
      {5, "monotone_convergence", monotone_convergence},
      {6, "q_independence", q_independence},
      {7, "trend_suite", trend_suite},
      {8, "geometry_behavior", geometry_behavior},
      {9, "structural_invariants", structural_invariants},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    if (only != 0 && c.number != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d %s: %s  %s\n", c.number, c.name, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
