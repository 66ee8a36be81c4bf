// satfr: frequency response of a saturated car-following loop.
//
//   satfr sweep   --scenario s.json [--with-sim] [--full-sweep] [--out dir]
//   satfr heatmap --scenario s.json [--ratio-min 0 --ratio-max 8]
//   satfr verdict --scenario s.json [--limit-cycle]
//   satfr locus   --scenario s.json --freq 0.1 [--candidate 0]
//
// Exit codes: 0 success, 1 scenario or validation error, 2 computation failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "satfr/commands.hpp"
#include "satfr/errors.hpp"
#include "satfr/report_io.hpp"
#include "satfr/scenario_io.hpp"

namespace {

using namespace satfr;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCompute = 2;

struct GridOptions {
  std::optional<double> fmin;
  std::optional<double> fmax;
  std::optional<int> fpoints;
};

struct Options {
  std::string scenario;
  std::string out = ".";
  std::string format = "csv";
  bool with_sim = false;
  bool full_sweep = false;
  bool limit_cycle = false;
  bool degrees = false;
  GridOptions grid;
  double ratio_min = 0.0;
  double ratio_max = 8.0;
  int ratio_points = 40;
  double freq = 0.0;
  std::optional<std::size_t> candidate;
};

LoadedScenario load(const Options& o) {
  LoadedScenario ls = load_scenario_file(o.scenario);
  const GridOptions& g = o.grid;
  if (g.fmin || g.fmax || g.fpoints) {
    ls.scenario.freq_grid_hz = log_grid(g.fmin.value_or(kDefaultFrequencyFloorHz),
                                        g.fmax.value_or(kDefaultFrequencyCeilingHz), g.fpoints.value_or(50));
    validate(ls.scenario);
  }
  return ls;
}

bool wants(const Options& o, const char* fmt) { return o.format == fmt || o.format == "both"; }

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

int cmd_sweep(const Options& o) {
  const LoadedScenario ls = load(o);
  const EmitOptions emit{o.degrees, ls.defaulted};
  const SweepResult res = run_sweep(ls.scenario, {o.with_sim, o.full_sweep});
  if (wants(o, "csv")) {
    std::cout << write_text_file(o.out, "sweep.csv", render([&](std::ostream& os) { write_sweep_csv(res, os, emit); }))
              << '\n';
  }
  if (wants(o, "json")) {
    std::cout << write_text_file(o.out, "sweep.json", sweep_to_json(res, emit).dump(2) + "\n") << '\n';
  }
  if (res.all_rows_failed()) {
    std::cerr << "satfr: no row produced a stable response\n";
    return kExitCompute;
  }
  return kExitOk;
}

int cmd_heatmap(const Options& o) {
  const LoadedScenario ls = load(o);
  const EmitOptions emit{o.degrees, ls.defaulted};
  HeatmapSpec spec;
  spec.f_min = o.grid.fmin.value_or(spec.f_min);
  spec.f_max = o.grid.fmax.value_or(spec.f_max);
  spec.f_points = o.grid.fpoints.value_or(spec.f_points);
  spec.ratio_min = o.ratio_min;
  spec.ratio_max = o.ratio_max;
  spec.ratio_points = o.ratio_points;
  Scenario sc = ls.scenario;
  if (o.grid.fmin || o.grid.fmax || o.grid.fpoints) sc.freq_grid_hz = linear_grid(spec.f_min, spec.f_max, spec.f_points);
  const HeatmapResult hm = run_heatmap(sc, spec, {false, o.full_sweep});
  for (const std::string& layer : heatmap_layers()) {
    write_text_file(o.out, layer + ".csv",
                    render([&](std::ostream& os) { write_heatmap_layer_csv(hm, layer, os); }));
  }
  std::cout << write_text_file(o.out, "heatmap.json", heatmap_index_json(hm, emit).dump(2) + "\n") << '\n';
  return kExitOk;
}

void print_method(const std::optional<MethodVerdict>& m) {
  if (!m) return;
  std::printf("%-10s max|F| = %s at f = %s Hz -> %s\n", m->method.c_str(), format_number(m->max_magnitude).c_str(),
              format_number(m->argmax_f_hz).c_str(), m->string_stable ? "string stable" : "string unstable");
}

int cmd_verdict(const Options& o) {
  const LoadedScenario ls = load(o);
  const EmitOptions emit{o.degrees, ls.defaulted};
  VerdictReport rep;
  rep.scenario = ls.scenario;
  if (o.limit_cycle) {
    rep.limit_cycle = limit_cycle_verdict(ls.scenario);
    std::printf("limit cycle check: %s\n", rep.limit_cycle->passed ? "no limit cycle" : "violation");
  } else {
    rep = verdict_string_stability(ls.scenario, {o.with_sim, o.full_sweep});
    print_method(rep.linear);
    print_method(rep.idf);
    print_method(rep.sim);
    if (!rep.active_limits.empty()) {
      std::string l;
      for (const std::string& s : rep.active_limits) l += (l.empty() ? "" : ", ") + s;
      std::printf("limits reached: %s\n", l.c_str());
    }
  }
  std::cout << write_text_file(o.out, "verdict.json", verdict_to_json(rep, emit).dump(2) + "\n") << '\n';
  if (!o.limit_cycle && !rep.idf) return kExitCompute;
  return kExitOk;
}

int cmd_locus(const Options& o) {
  const LoadedScenario ls = load(o);
  const EmitOptions emit{o.degrees, ls.defaulted};
  const LocusExport lx = export_locus(ls.scenario, o.freq, o.candidate);
  if (wants(o, "csv")) {
    std::cout << write_text_file(o.out, "locus.csv", render([&](std::ostream& os) { write_locus_csv(lx, os, emit); }))
              << '\n';
  }
  if (wants(o, "json")) {
    std::cout << write_text_file(o.out, "locus.json", locus_to_json(lx).dump(2) + "\n") << '\n';
  }
  std::printf("candidate B = %s, winding = %s, %s\n", format_number(lx.candidate.B).c_str(),
              format_number(lx.winding).c_str(), to_string(lx.candidate.stability));
  return kExitOk;
}

void add_common(CLI::App* app, Options& o) {
  app->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--format", o.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
  app->add_flag("--degrees", o.degrees, "Add phase columns in degrees");
}

void add_grid(CLI::App* app, Options& o) {
  app->add_option("--fmin", o.grid.fmin, "Lowest frequency [Hz]");
  app->add_option("--fmax", o.grid.fmax, "Highest frequency [Hz]");
  app->add_option("--fpoints", o.grid.fpoints, "Number of frequencies");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency response of a car-following loop with acceleration and speed saturation"};
  app.require_subcommand(1);
  Options o;

  CLI::App* sweep = app.add_subcommand("sweep", "IDF, linear and optional simulated response over a frequency grid");
  add_common(sweep, o);
  add_grid(sweep, o);
  sweep->add_flag("--with-sim", o.with_sim, "Add the time-domain estimate");
  sweep->add_flag("--full-sweep", o.full_sweep, "Check encirclement at every grid frequency");

  CLI::App* heat = app.add_subcommand("heatmap", "Linear vs IDF response over frequency and R / bound");
  add_common(heat, o);
  add_grid(heat, o);
  heat->add_option("--ratio-min", o.ratio_min, "Smallest R / bound");
  heat->add_option("--ratio-max", o.ratio_max, "Largest R / bound");
  heat->add_option("--ratio-points", o.ratio_points, "Number of ratios");
  heat->add_flag("--full-sweep", o.full_sweep, "Check encirclement at every grid frequency");

  CLI::App* verdict = app.add_subcommand("verdict", "String-stability verdict per method");
  add_common(verdict, o);
  add_grid(verdict, o);
  verdict->add_flag("--with-sim", o.with_sim, "Include the time-domain estimate");
  verdict->add_flag("--full-sweep", o.full_sweep, "Check encirclement at every grid frequency");
  verdict->add_flag("--limit-cycle", o.limit_cycle, "Free-response checks with R = 0");

  CLI::App* locus = app.add_subcommand("locus", "Incremental open-loop locus of one candidate");
  add_common(locus, o);
  locus->add_option("--freq", o.freq, "Frequency [Hz]")->required();
  locus->add_option("--candidate", o.candidate, "Candidate index, ascending B");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (sweep->parsed()) return cmd_sweep(o);
    if (heat->parsed()) return cmd_heatmap(o);
    if (verdict->parsed()) return cmd_verdict(o);
    if (locus->parsed()) return cmd_locus(o);
  } catch (const ValidationError& e) {
    std::cerr << "satfr: invalid input: " << e.what() << '\n';
    return kExitInput;
  } catch (const IoError& e) {
    std::cerr << "satfr: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "satfr: computation failed: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitInput;
}
