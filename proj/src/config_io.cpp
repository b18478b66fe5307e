#include "aris/config_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace aris {

using nlohmann::json;

namespace {

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table = {
      {"M", "bs_antennas"},
      {"N", "ris_elements"},
      {"n_elements", "ris_elements"},
      {"Q", "uav_count"},
      {"q_uavs", "uav_count"},
      {"K", "users"},
      {"L", "jammer_antennas"},
      {"alpha", "path_loss_exponent"},
      {"beta_db", "reference_gain_db"},
      {"kappa_db", "rician_factor_db"},
      {"p_bs", "bs_power_dbm"},
      {"p_jam", "jam_power_dbm"},
      {"noise_dbm", "noise_power_dbm"},
      {"epsilon", "uncertainty_radius"},
      {"rho_max", "max_density"},
      {"grid", "grid_dims"},
  };
  return table;
}

// Rounds away representation noise from dB conversions so echoes stay tidy.
double tidy_db(double db) { return std::round(db * 1e9) / 1e9; }

json vec2(const Vec2& v) { return json::array({v.x(), v.y()}); }

class Reader {
 public:
  Reader(const json& object, std::string prefix, std::vector<std::string>& problems)
      : object_(object), prefix_(std::move(prefix)), problems_(problems) {}

  template <typename T>
  void number(const char* key, T& out) {
    if (!take(key)) return;
    const json& v = object_.at(key);
    if (!v.is_number()) return wrong(key, "a number");
    if constexpr (std::is_integral_v<T>) {
      const double d = v.get<double>();
      if (d != std::floor(d)) return wrong(key, "an integer");
      out = static_cast<T>(d);
    } else {
      out = v.get<T>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (!take(key)) return;
    if (!object_.at(key).is_boolean()) return wrong(key, "true or false");
    out = object_.at(key).get<bool>();
  }

  void text(const char* key, std::string& out) {
    if (!take(key)) return;
    if (!object_.at(key).is_string()) return wrong(key, "a string");
    out = object_.at(key).get<std::string>();
  }

  bool point(const json& v, Vec2& out) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) return false;
    out = Vec2(v[0].get<double>(), v[1].get<double>());
    return true;
  }

  void point(const char* key, Vec2& out) {
    if (!take(key)) return;
    if (!point(object_.at(key), out)) wrong(key, "a [x, y] pair");
  }

  void optional_point(const char* key, std::optional<Vec2>& out) {
    if (!take(key)) return;
    if (object_.at(key).is_null()) {
      out.reset();
      return;
    }
    Vec2 p;
    if (!point(object_.at(key), p)) return wrong(key, "a [x, y] pair or null");
    out = p;
  }

  void points(const char* key, std::vector<Vec2>& out) {
    if (!take(key)) return;
    const json& v = object_.at(key);
    if (!v.is_array()) return wrong(key, "a list of [x, y] pairs");
    std::vector<Vec2> parsed;
    for (const json& item : v) {
      Vec2 p;
      if (!point(item, p)) return wrong(key, "a list of [x, y] pairs");
      parsed.push_back(p);
    }
    out = std::move(parsed);
  }

  void dims(const char* key, int& nx, int& ny) {
    if (!take(key)) return;
    Vec2 p;
    if (!point(object_.at(key), p) || p.x() != std::floor(p.x()) || p.y() != std::floor(p.y()))
      return wrong(key, "an [nx, ny] pair of integers");
    nx = static_cast<int>(p.x());
    ny = static_cast<int>(p.y());
  }

  bool has(const char* key) const { return object_.contains(key); }
  void skip(const char* key) { used_.insert(key); }

  void report_unknown() {
    for (const auto& [key, value] : object_.items())
      if (!used_.count(key)) problems_.push_back("unknown config key '" + prefix_ + key + "'");
  }

 private:
  bool take(const char* key) {
    used_.insert(key);
    return object_.contains(key);
  }
  void wrong(const char* key, const char* expected) {
    problems_.push_back("config key '" + prefix_ + key + "' must be " + expected);
  }

  const json& object_;
  std::string prefix_;
  std::vector<std::string>& problems_;
  std::set<std::string> used_;
};

json to_json(const RunConfig& rc) {
  const SystemConfig& c = rc.system;
  json j;
  j["bs_antennas"] = c.bs_antennas;
  j["ris_elements"] = c.ris_elements;
  j["uav_count"] = c.uav_count;
  j["users"] = c.users;
  j["jammer_antennas"] = c.jammer_antennas;
  j["region_size"] = vec2(c.region_size);
  j["grid_dims"] = json::array({c.grid_nx, c.grid_ny});
  j["uav_altitude"] = c.uav_altitude;
  j["path_loss_exponent"] = c.path_loss_exponent;
  j["reference_gain_db"] = tidy_db(10.0 * std::log10(c.reference_gain));
  j["rician_factor_db"] = tidy_db(10.0 * std::log10(c.rician_factor));
  j["element_spacing"] = c.element_spacing;
  j["bs_power_dbm"] = tidy_db(watts_to_dbm(c.bs_power));
  j["jam_power_dbm"] = c.jam_power > 0.0 ? json(tidy_db(watts_to_dbm(c.jam_power))) : json(nullptr);
  j["noise_power_dbm"] = tidy_db(watts_to_dbm(c.noise_power));
  j["uncertainty_radius"] = c.uncertainty_radius;
  j["max_density"] = c.max_density;
  j["bs_position"] = vec2(c.bs_position);
  j["bs_altitude"] = c.bs_altitude;
  json users = json::array();
  for (const Vec2& u : c.user_positions) users.push_back(vec2(u));
  j["user_positions"] = users;
  j["user_cluster_center"] = vec2(c.user_cluster_center);
  j["user_cluster_radius"] = c.user_cluster_radius;
  j["user_altitude"] = c.user_altitude;
  j["jammer_estimate"] = vec2(c.jammer_estimate);
  j["jammer_altitude"] = c.jammer_altitude;
  j["jammer_true"] = c.jammer_true ? vec2(*c.jammer_true) : json(nullptr);
  j["seed"] = c.seed;

  const OptimizerOptions& o = rc.optimizer;
  json opt;
  opt["max_outer"] = o.max_outer;
  opt["convergence_tol"] = o.convergence_tol;
  opt["phase_initial_step"] = o.phase.initial_step;
  opt["phase_backtrack_factor"] = o.phase.backtrack_factor;
  opt["phase_max_halvings"] = o.phase.max_halvings;
  opt["phase_tolerance"] = o.phase.tolerance;
  opt["phase_max_iterations"] = o.phase.max_iterations;
  opt["phase_conjugate"] = o.phase.conjugate;
  opt["phase_warm_start"] = o.phase.warm_start;
  opt["phase_restart_every"] = o.phase.restart_every;
  opt["phase_lbfgs_memory"] = o.phase.lbfgs_memory;
  opt["rate_model"] =
      o.phase.model == RateModel::ZeroForcing ? "zero_forcing" : "fixed_beamformers";
  opt["density_rule"] = o.density_rule == DensityRule::Bisection ? "bisection" : "sort";
  opt["bisection_tol"] = o.bisection_tol;
  opt["density_backtracks"] = o.density_backtracks;
  opt["reoptimize_jammer_after"] = o.reoptimize_jammer_after;
  opt["log_sinr_warmup"] = o.log_sinr_warmup;
  opt["adapt_phases_to_density"] = o.adapt_phases_to_density;
  opt["jammer_fd_step"] = o.jammer.fd_step;
  opt["jammer_ascent_step"] = o.jammer.ascent_step;
  opt["jammer_ascent_max_steps"] = o.jammer.ascent_max_steps;
  opt["jammer_ascent_min_step"] = o.jammer.ascent_min_step;
  opt["jammer_certify_radius"] = o.jammer.certify_radius;
  opt["jammer_certify_directions"] = o.jammer.certify_directions;
  opt["jammer_start_spacing"] = o.jammer.start_spacing;
  opt["jammer_refine_starts"] = o.jammer.refine_starts;
  opt["jammer_boundary_samples"] = o.jammer.boundary_samples;
  j["optimizer"] = opt;
  return j;
}

RunConfig from_json(const json& j) {
  std::vector<std::string> problems;
  if (!j.is_object()) throw ConfigError({"config must be a JSON object"});
  RunConfig rc;
  SystemConfig& c = rc.system;
  Reader r(j, "", problems);
  r.number("bs_antennas", c.bs_antennas);
  r.number("ris_elements", c.ris_elements);
  r.number("uav_count", c.uav_count);
  r.number("users", c.users);
  r.number("jammer_antennas", c.jammer_antennas);
  r.point("region_size", c.region_size);
  r.dims("grid_dims", c.grid_nx, c.grid_ny);
  r.number("uav_altitude", c.uav_altitude);
  r.number("path_loss_exponent", c.path_loss_exponent);
  double db = 0.0;
  if (r.has("reference_gain_db")) {
    db = 10.0 * std::log10(c.reference_gain);
    r.number("reference_gain_db", db);
    c.reference_gain = db_to_linear(db);
  }
  if (r.has("rician_factor_db")) {
    db = 10.0 * std::log10(c.rician_factor);
    r.number("rician_factor_db", db);
    c.rician_factor = db_to_linear(db);
  }
  r.number("element_spacing", c.element_spacing);
  if (r.has("bs_power_dbm")) {
    db = watts_to_dbm(c.bs_power);
    r.number("bs_power_dbm", db);
    c.bs_power = dbm_to_watts(db);
  }
  if (r.has("jam_power_dbm")) {
    if (j.at("jam_power_dbm").is_null()) {
      r.skip("jam_power_dbm");
      c.jam_power = 0.0;  // no jammer
    } else {
      db = watts_to_dbm(c.jam_power);
      r.number("jam_power_dbm", db);
      c.jam_power = dbm_to_watts(db);
    }
  }
  if (r.has("noise_power_dbm")) {
    db = watts_to_dbm(c.noise_power);
    r.number("noise_power_dbm", db);
    c.noise_power = dbm_to_watts(db);
  }
  r.number("uncertainty_radius", c.uncertainty_radius);
  r.number("max_density", c.max_density);
  r.point("bs_position", c.bs_position);
  r.number("bs_altitude", c.bs_altitude);
  r.points("user_positions", c.user_positions);
  r.point("user_cluster_center", c.user_cluster_center);
  r.number("user_cluster_radius", c.user_cluster_radius);
  r.number("user_altitude", c.user_altitude);
  r.point("jammer_estimate", c.jammer_estimate);
  r.number("jammer_altitude", c.jammer_altitude);
  r.optional_point("jammer_true", c.jammer_true);
  r.number("seed", c.seed);

  if (j.contains("optimizer")) {
    r.skip("optimizer");
    const json& oj = j.at("optimizer");
    if (!oj.is_object()) {
      problems.push_back("config key 'optimizer' must be an object");
    } else {
      OptimizerOptions& o = rc.optimizer;
      Reader opt(oj, "optimizer.", problems);
      opt.number("max_outer", o.max_outer);
      opt.number("convergence_tol", o.convergence_tol);
      opt.number("phase_initial_step", o.phase.initial_step);
      opt.number("phase_backtrack_factor", o.phase.backtrack_factor);
      opt.number("phase_max_halvings", o.phase.max_halvings);
      opt.number("phase_tolerance", o.phase.tolerance);
      opt.number("phase_max_iterations", o.phase.max_iterations);
      opt.boolean("phase_conjugate", o.phase.conjugate);
      opt.boolean("phase_warm_start", o.phase.warm_start);
      opt.number("phase_restart_every", o.phase.restart_every);
      opt.number("phase_lbfgs_memory", o.phase.lbfgs_memory);
      std::string name;
      if (opt.has("rate_model")) {
        opt.text("rate_model", name);
        if (name == "zero_forcing") o.phase.model = RateModel::ZeroForcing;
        else if (name == "fixed_beamformers") o.phase.model = RateModel::FixedBeamformers;
        else problems.push_back("optimizer.rate_model must be 'zero_forcing' or 'fixed_beamformers'");
      }
      if (opt.has("density_rule")) {
        opt.text("density_rule", name);
        if (name == "sort") o.density_rule = DensityRule::Sort;
        else if (name == "bisection") o.density_rule = DensityRule::Bisection;
        else problems.push_back("optimizer.density_rule must be 'sort' or 'bisection'");
      }
      opt.number("bisection_tol", o.bisection_tol);
      opt.number("density_backtracks", o.density_backtracks);
      opt.boolean("reoptimize_jammer_after", o.reoptimize_jammer_after);
      opt.number("log_sinr_warmup", o.log_sinr_warmup);
      opt.boolean("adapt_phases_to_density", o.adapt_phases_to_density);
      opt.number("jammer_fd_step", o.jammer.fd_step);
      opt.number("jammer_ascent_step", o.jammer.ascent_step);
      opt.number("jammer_ascent_max_steps", o.jammer.ascent_max_steps);
      opt.number("jammer_ascent_min_step", o.jammer.ascent_min_step);
      opt.number("jammer_certify_radius", o.jammer.certify_radius);
      opt.number("jammer_certify_directions", o.jammer.certify_directions);
      opt.number("jammer_start_spacing", o.jammer.start_spacing);
      opt.number("jammer_refine_starts", o.jammer.refine_starts);
      opt.number("jammer_boundary_samples", o.jammer.boundary_samples);
      opt.report_unknown();
      if (o.max_outer < 0) problems.push_back("optimizer.max_outer must be >= 0");
      if (!(o.phase.backtrack_factor > 0.0 && o.phase.backtrack_factor < 1.0))
        problems.push_back("optimizer.phase_backtrack_factor must be in (0, 1)");
      if (o.phase.restart_every < 0) problems.push_back("optimizer.phase_restart_every must be >= 0");
      if (o.phase.lbfgs_memory < 0) problems.push_back("optimizer.phase_lbfgs_memory must be >= 0");
      if (o.log_sinr_warmup < 0) problems.push_back("optimizer.log_sinr_warmup must be >= 0");
    }
  }
  r.report_unknown();

  for (auto& p : validate_config(c)) problems.push_back(std::move(p));
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return rc;
}

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

}  // namespace

std::string canonical_key(std::string_view key) {
  const auto& table = aliases();
  const auto it = table.find(std::string(key));
  return it == table.end() ? std::string(key) : it->second;
}

RunConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("config is not valid JSON: ") + e.what()});
  }
  // Accept aliases at the top level too.
  if (j.is_object()) {
    json normalized = json::object();
    std::vector<std::string> problems;
    for (const auto& [key, value] : j.items()) {
      const std::string name = canonical_key(key);
      if (normalized.contains(name)) problems.push_back("config key '" + name + "' given twice");
      normalized[name] = value;
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    j = std::move(normalized);
  }
  return from_json(j);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot read config file '" + path.string() + "'"});
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

RunConfig with_overrides(const RunConfig& base, const std::vector<std::string>& overrides) {
  json j = to_json(base);
  std::vector<std::string> problems;
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      problems.push_back("override '" + item + "' is not of the form key=value");
      continue;
    }
    const std::string key = item.substr(0, eq);
    const json value = parse_value(item.substr(eq + 1));
    constexpr std::string_view prefix = "optimizer.";
    if (key.rfind(prefix, 0) == 0) {
      j["optimizer"][key.substr(prefix.size())] = value;
    } else {
      j[canonical_key(key)] = value;
    }
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return from_json(j);
}

std::string config_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

void set_parameter(RunConfig& config, std::string_view name, double value) {
  json j = to_json(config);
  const std::string key = canonical_key(name);
  if (!j.contains(key) || key == "optimizer")
    throw ConfigError({"unknown parameter '" + std::string(name) + "'"});
  j[key] = value;
  config = from_json(j);
}

}  // namespace aris
