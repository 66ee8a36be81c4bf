#include "satfr/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "satfr/errors.hpp"
#include "satfr/scenario_io.hpp"

namespace satfr {

namespace {

using nlohmann::json;

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_number(const std::optional<T>& v) {
  return v ? number_or_null(static_cast<double>(*v)) : json(nullptr);
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

json point_json(const FrequencyResponsePoint& p) {
  return json{{"omega", p.omega},
              {"magnitude", number_or_null(p.magnitude)},
              {"phase", number_or_null(p.phase)},
              {"phase_unwrapped", number_or_null(p.phase_unwrapped)},
              {"method", to_string(p.method)}};
}

json candidate_json(const OscillationCandidate& c) {
  return json{{"omega", c.omega},
              {"B", c.B},
              {"phi", c.phi},
              {"loop", to_string(c.loop)},
              {"residual", c.residual},
              {"stability", to_string(c.stability)}};
}

json metadata(const Scenario& sc, const EmitOptions& options) {
  return json{{"tool", "satfr"},
              {"version", kToolVersion},
              {"scenario", scenario_to_json(sc)},
              {"settings", settings_to_json(sc.solver)},
              {"loop", to_string(sc.loop())},
              {"defaulted_fields", options.defaulted}};
}

double degrees(const std::optional<FrequencyResponsePoint>& p, bool unwrapped) {
  if (!p) return std::nan("");
  return (unwrapped ? p->phase_unwrapped : p->phase) * kRadToDeg;
}

const std::vector<double>& layer_values(const HeatmapResult& hm, const std::string& layer) {
  if (layer == "mag_lin") return hm.mag_lin;
  if (layer == "phase_lin") return hm.phase_lin;
  if (layer == "mag_idf") return hm.mag_idf;
  if (layer == "phase_idf") return hm.phase_idf;
  if (layer == "mag_diff") return hm.mag_diff;
  if (layer == "phase_diff") return hm.phase_diff;
  throw ValidationError("layer", "unknown heatmap layer " + layer);
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_sweep_csv(const SweepResult& res, std::ostream& out, const EmitOptions& opt) {
  out << kSweepCsvHeader;
  if (opt.degrees) out << ',' << kSweepCsvDegreeColumns;
  out << '\n';
  const double na = std::nan("");
  for (const SweepRow& r : res.rows) {
    out << format_number(r.f_hz) << ',' << format_number(r.idf ? r.idf->magnitude : na) << ','
        << format_number(r.idf ? r.idf->phase : na) << ',' << format_number(r.idf ? r.idf->phase_unwrapped : na)
        << ',' << format_number(r.lin.magnitude) << ',' << format_number(r.lin.phase) << ','
        << format_number(r.sim ? r.sim->magnitude : na) << ',' << format_number(r.sim ? r.sim->phase : na) << ','
        << format_number(r.B.value_or(na)) << ',' << (r.stable ? (*r.stable ? "1" : "0") : "NA") << ','
        << join(r.warnings, ";");
    if (opt.degrees) {
      out << ',' << format_number(degrees(r.idf, false)) << ',' << format_number(degrees(r.idf, true)) << ','
          << format_number(r.lin.phase * kRadToDeg) << ',' << format_number(degrees(r.sim, false));
    }
    out << '\n';
  }
}

json sweep_to_json(const SweepResult& res, const EmitOptions& opt) {
  json doc = metadata(res.scenario, opt);
  doc["command"] = "sweep";
  doc["flags"] = {{"with_sim", res.flags.with_sim}, {"full_sweep", res.flags.full_sweep}};
  doc["warnings"] = res.warnings;
  json rows = json::array();
  for (const SweepRow& r : res.rows) {
    json cands = json::array();
    for (const OscillationCandidate& c : r.candidates) cands.push_back(candidate_json(c));
    rows.push_back({{"f_hz", r.f_hz},
                    {"idf", r.idf ? point_json(*r.idf) : json(nullptr)},
                    {"linear", point_json(r.lin)},
                    {"simulation", r.sim ? point_json(*r.sim) : json(nullptr)},
                    {"B", optional_number(r.B)},
                    {"stable", r.stable ? json(*r.stable) : json(nullptr)},
                    {"accel_reached", r.accel_reached},
                    {"speed_reached", r.speed_reached},
                    {"sim_residual_fraction", optional_number(r.sim_residual_fraction)},
                    {"candidates", cands},
                    {"warnings", r.warnings}});
  }
  doc["rows"] = rows;
  return doc;
}

std::vector<std::string> heatmap_layers() {
  return {"mag_lin", "phase_lin", "mag_idf", "phase_idf", "mag_diff", "phase_diff", "limits_reached"};
}

void write_heatmap_layer_csv(const HeatmapResult& hm, const std::string& layer, std::ostream& out) {
  out << "f_hz,ratio,value\n";
  const bool flags = layer == "limits_reached";
  const std::vector<double>* values = flags ? nullptr : &layer_values(hm, layer);
  for (std::size_t i = 0; i < hm.ratio.size(); ++i) {
    for (std::size_t j = 0; j < hm.f_hz.size(); ++j) {
      const std::size_t idx = hm.index(i, j);
      out << format_number(hm.f_hz[j]) << ',' << format_number(hm.ratio[i]) << ',';
      if (flags) {
        out << hm.limits_reached[idx];
      } else {
        out << format_number((*values)[idx]);
      }
      out << '\n';
    }
  }
}

json heatmap_index_json(const HeatmapResult& hm, const EmitOptions& opt) {
  json doc = metadata(hm.scenario, opt);
  doc["command"] = "heatmap";
  doc["ratio_scale"] = hm.ratio_scale;
  doc["f_hz"] = hm.f_hz;
  doc["ratio"] = hm.ratio;
  json layers = json::array();
  for (const std::string& l : heatmap_layers()) layers.push_back({{"name", l}, {"file", l + ".csv"}});
  doc["layers"] = layers;
  json warnings = json::array();
  for (std::size_t i = 0; i < hm.ratio.size(); ++i) {
    for (std::size_t j = 0; j < hm.f_hz.size(); ++j) {
      const std::string& w = hm.cell_warnings[hm.index(i, j)];
      if (!w.empty()) warnings.push_back({{"f_hz", hm.f_hz[j]}, {"ratio", hm.ratio[i]}, {"warnings", w}});
    }
  }
  doc["cell_warnings"] = warnings;
  return doc;
}

json limit_cycle_to_json(const LimitCycleVerdict& v) {
  json balance = json::array();
  for (std::size_t i = 0; i < v.balance.size(); ++i) {
    const LimitCycleReport& r = v.balance[i];
    balance.push_back({{"f_hz", v.f_hz[i]},
                       {"no_root", r.no_root},
                       {"min_g_over_B", r.min_g_over_B},
                       {"min_abs_imag_D", r.min_abs_imag_D},
                       {"b_max", r.b_max},
                       {"grid_points", r.grid_points},
                       {"violating_B", r.violating_B}});
  }
  json decay = json::array();
  for (const DecayReport& d : v.decay) {
    decay.push_back({{"initial_offset", d.initial_offset},
                     {"horizon", d.horizon},
                     {"final_envelope", d.final_envelope},
                     {"threshold", d.threshold},
                     {"passed", d.passed}});
  }
  return json{{"passed", v.passed}, {"balance", balance}, {"decay", decay}};
}

json verdict_to_json(const VerdictReport& rep, const EmitOptions& opt) {
  json doc = metadata(rep.scenario, opt);
  doc["command"] = "verdict";
  auto method = [](const std::optional<MethodVerdict>& m) -> json {
    if (!m) return nullptr;
    return json{{"method", m->method},
                {"evaluated", m->evaluated},
                {"max_magnitude", number_or_null(m->max_magnitude)},
                {"argmax_f_hz", m->argmax_f_hz},
                {"string_stable", m->string_stable},
                {"verdict", m->string_stable ? "stable" : "unstable"}};
  };
  doc["linear"] = method(rep.linear);
  doc["idf"] = method(rep.idf);
  doc["simulation"] = method(rep.sim);
  doc["limit_cycle"] = rep.limit_cycle ? limit_cycle_to_json(*rep.limit_cycle) : json(nullptr);
  doc["active_limits"] = rep.active_limits;
  doc["warnings"] = rep.warnings;
  return doc;
}

void write_locus_csv(const LocusExport& locus, std::ostream& out, const EmitOptions& opt) {
  out << "theta,re,im";
  if (opt.degrees) out << ",theta_deg";
  out << '\n';
  for (const LocusPoint& p : locus.points) {
    out << format_number(p.theta) << ',' << format_number(p.value.real()) << ',' << format_number(p.value.imag());
    if (opt.degrees) out << ',' << format_number(p.theta * kRadToDeg);
    out << '\n';
  }
}

json locus_to_json(const LocusExport& locus) {
  json pts = json::array();
  for (const LocusPoint& p : locus.points) pts.push_back({p.theta, p.value.real(), p.value.imag()});
  return json{{"f_hz", locus.f_hz},
              {"candidate", candidate_json(locus.candidate)},
              {"winding_number", locus.winding},
              {"points", pts}};
}

std::string write_text_file(const std::string& dir, const std::string& name, const std::string& text) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const std::string path = (fs::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path);
  return path;
}

}  // namespace satfr
