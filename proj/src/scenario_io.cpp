#include "satfr/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "satfr/errors.hpp"

namespace satfr {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ValidationError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

const json& require_object(const json& doc, const std::string& path) {
  if (!doc.is_object()) throw ValidationError(path.empty() ? "<root>" : path, "must be a JSON object");
  return doc;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double number_at(const json& obj, const char* key, const std::string& path) {
  const std::string field = join(path, key);
  if (!obj.contains(key)) throw ValidationError(field, "required field is missing");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(field, "must be a number");
  return v.get<double>();
}

class Reader {
 public:
  explicit Reader(std::vector<std::string>& defaulted) : defaulted_(defaulted) {}

  double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
      defaulted_.push_back(join(path, key));
      return fallback;
    }
    return number_at(obj, key, path);
  }

  int integer_or(const json& obj, const char* key, const std::string& path, int fallback) {
    const std::string field = join(path, key);
    if (!obj.contains(key) || obj.at(key).is_null()) {
      defaulted_.push_back(field);
      return fallback;
    }
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ValidationError(field, "must be an integer");
    return v.get<int>();
  }

  void note(const std::string& field) { defaulted_.push_back(field); }

 private:
  std::vector<std::string>& defaulted_;
};

SaturationLimits read_limits(const json& doc, Reader& rd) {
  if (!doc.contains("limits") || doc.at("limits").is_null()) {
    rd.note("limits");
    return no_limits();
  }
  const json& lim = require_object(doc.at("limits"), "limits");
  reject_unknown(lim, "limits", {"accel", "speed"});
  const bool accel = lim.contains("accel") && !lim.at("accel").is_null();
  const bool speed = lim.contains("speed") && !lim.at("speed").is_null();
  double a_min = 0.0, a_max = 0.0, v_min = 0.0, v_max = 0.0, v_e = 0.0;
  if (accel) {
    const json& a = require_object(lim.at("accel"), "limits.accel");
    reject_unknown(a, "limits.accel", {"a_min", "a_max"});
    a_min = number_at(a, "a_min", "limits.accel");
    a_max = number_at(a, "a_max", "limits.accel");
  }
  if (speed) {
    const json& v = require_object(lim.at("speed"), "limits.speed");
    reject_unknown(v, "limits.speed", {"v_min", "v_max", "v_e"});
    v_min = number_at(v, "v_min", "limits.speed");
    v_max = number_at(v, "v_max", "limits.speed");
    v_e = number_at(v, "v_e", "limits.speed");
  }
  if (accel && speed) return make_limits(a_min, a_max, v_min, v_max, v_e);
  if (accel) return make_accel_limits(a_min, a_max);
  if (speed) return make_speed_limits(v_min, v_max, v_e);
  return no_limits();
}

std::vector<double> read_grid(const json& doc, Reader& rd) {
  if (!doc.contains("frequency_grid") || doc.at("frequency_grid").is_null()) {
    rd.note("frequency_grid");
    return log_grid(kDefaultFrequencyFloorHz, kDefaultFrequencyCeilingHz, 50);
  }
  const json& g = doc.at("frequency_grid");
  if (g.is_array()) {
    std::vector<double> out;
    out.reserve(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g[i].is_number()) throw ValidationError("frequency_grid[" + std::to_string(i) + "]", "must be a number");
      out.push_back(g[i].get<double>());
    }
    return out;
  }
  require_object(g, "frequency_grid");
  reject_unknown(g, "frequency_grid", {"fmin", "fmax", "points", "spacing"});
  const double fmin = rd.number_or(g, "fmin", "frequency_grid", kDefaultFrequencyFloorHz);
  const double fmax = rd.number_or(g, "fmax", "frequency_grid", kDefaultFrequencyCeilingHz);
  const int points = rd.integer_or(g, "points", "frequency_grid", 50);
  std::string spacing = "log";
  if (g.contains("spacing")) {
    if (!g.at("spacing").is_string()) throw ValidationError("frequency_grid.spacing", "must be \"log\" or \"linear\"");
    spacing = g.at("spacing").get<std::string>();
  } else {
    rd.note("frequency_grid.spacing");
  }
  if (spacing == "log") return log_grid(fmin, fmax, points);
  if (spacing == "linear") return linear_grid(fmin, fmax, points);
  throw ValidationError("frequency_grid.spacing", "must be \"log\" or \"linear\"");
}

SolverSettings read_solver(const json& doc, Reader& rd) {
  SolverSettings s;
  if (!doc.contains("solver") || doc.at("solver").is_null()) {
    rd.note("solver");
    return s;
  }
  const json& o = require_object(doc.at("solver"), "solver");
  reject_unknown(o, "solver",
                 {"b_ini_max", "sweep_points", "root_tol", "theta_samples", "dt", "settle_periods",
                  "measure_periods", "max_periods"});
  s.b_ini_max = rd.number_or(o, "b_ini_max", "solver", s.b_ini_max);
  s.sweep_points = rd.integer_or(o, "sweep_points", "solver", s.sweep_points);
  s.root_tol = rd.number_or(o, "root_tol", "solver", s.root_tol);
  s.theta_samples = rd.integer_or(o, "theta_samples", "solver", s.theta_samples);
  s.dt = rd.number_or(o, "dt", "solver", s.dt);
  s.settle_periods = rd.integer_or(o, "settle_periods", "solver", s.settle_periods);
  s.measure_periods = rd.integer_or(o, "measure_periods", "solver", s.measure_periods);
  s.max_periods = rd.integer_or(o, "max_periods", "solver", s.max_periods);
  return s;
}

}  // namespace

LoadedScenario scenario_from_json(const json& doc) {
  require_object(doc, "");
  reject_unknown(doc, "",
                 {"name", "description", "controller", "limits", "leader_amplitude", "standstill_distance",
                  "frequency_grid", "frequency_floor_hz", "solver"});
  LoadedScenario out;
  Reader rd(out.defaulted);
  Scenario& sc = out.scenario;

  if (!doc.contains("controller")) throw ValidationError("controller", "required field is missing");
  const json& c = require_object(doc.at("controller"), "controller");
  reject_unknown(c, "controller", {"k_d", "k_v", "tau"});
  sc.gains = derive_loop_gains(number_at(c, "k_d", "controller"), number_at(c, "k_v", "controller"),
                               number_at(c, "tau", "controller"));
  sc.limits = read_limits(doc, rd);
  if (!doc.contains("leader_amplitude")) throw ValidationError("leader_amplitude", "required field is missing");
  if (!doc.at("leader_amplitude").is_number()) throw ValidationError("leader_amplitude", "must be a number");
  sc.leader_amplitude = doc.at("leader_amplitude").get<double>();
  sc.standstill_distance = rd.number_or(doc, "standstill_distance", "", 0.0);
  sc.frequency_floor_hz = rd.number_or(doc, "frequency_floor_hz", "", kDefaultFrequencyFloorHz);
  sc.freq_grid_hz = read_grid(doc, rd);
  sc.solver = read_solver(doc, rd);
  validate(sc);
  return out;
}

LoadedScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(path, std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(doc);
}

Scenario load_scenario(const std::string& path) { return load_scenario_file(path).scenario; }

json settings_to_json(const SolverSettings& s) {
  return json{{"b_ini_max", s.b_ini_max},         {"sweep_points", s.sweep_points},
              {"root_tol", s.root_tol},           {"theta_samples", s.theta_samples},
              {"dt", s.dt},                       {"settle_periods", s.settle_periods},
              {"measure_periods", s.measure_periods}, {"max_periods", s.max_periods}};
}

json scenario_to_json(const Scenario& sc) {
  json limits = json::object();
  const SaturationLimits& l = sc.limits;
  limits["accel"] = l.accel_active ? json{{"a_min", l.a_min}, {"a_max", l.a_max}} : json(nullptr);
  limits["speed"] = l.speed_active ? json{{"v_min", l.v_min}, {"v_max", l.v_max}, {"v_e", l.v_e}} : json(nullptr);
  return json{{"controller", {{"k_d", sc.gains.k_d}, {"k_v", sc.gains.k_v}, {"tau", sc.gains.tau}}},
              {"limits", limits},
              {"leader_amplitude", sc.leader_amplitude},
              {"standstill_distance", sc.standstill_distance},
              {"frequency_floor_hz", sc.frequency_floor_hz},
              {"frequency_grid", sc.freq_grid_hz},
              {"solver", settings_to_json(sc.solver)}};
}

void save_scenario(const Scenario& sc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << scenario_to_json(sc).dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace satfr
