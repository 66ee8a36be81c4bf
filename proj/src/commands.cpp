#include "satfr/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "satfr/errors.hpp"

namespace satfr {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kResidualFlag = 0.1;

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> grid_omegas(const Scenario& sc) {
  std::vector<double> w;
  w.reserve(sc.freq_grid_hz.size());
  for (double f : sc.freq_grid_hz) w.push_back(angular_frequency(f));
  return w;
}

MethodVerdict summarize(const std::string& method, const std::vector<std::pair<double, double>>& f_mag) {
  MethodVerdict v;
  v.method = method;
  v.max_magnitude = -std::numeric_limits<double>::infinity();
  for (const auto& [f, m] : f_mag) {
    ++v.evaluated;
    if (m > v.max_magnitude) {
      v.max_magnitude = m;
      v.argmax_f_hz = f;
    }
  }
  v.string_stable = v.evaluated > 0 && v.max_magnitude <= 1.0 + kStringStabilityTolerance;
  return v;
}

}  // namespace

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

bool SweepResult::all_rows_failed() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
}

SweepRow analyze_frequency(const Scenario& sc, double f_hz, const AnalysisFlags& flags) {
  SweepRow row;
  row.f_hz = f_hz;
  const double w = angular_frequency(f_hz);
  row.lin = linear_frequency_response(sc.gains, w);
  row.warnings = scenario_warnings(sc);

  const BalanceProblem problem = make_problem(sc, w);
  StabilityOptions opts;
  opts.full_sweep = flags.full_sweep;
  if (flags.full_sweep) opts.sweep_omegas = grid_omegas(sc);

  try {
    row.candidates = solve_candidates(problem, sc.solver);
    for (OscillationCandidate& c : row.candidates) c.stability = classify_stability(c, problem, sc.solver, opts);
    const SelectionReport sel = select_response(row.candidates);
    if (sel.has_indeterminate) row.warnings.emplace_back("indeterminate_candidate");
    if (sel.no_stable_solution) {
      row.warnings.emplace_back("no_stable_solution");
      row.stable = false;
      row.failed = true;
    } else {
      const OscillationCandidate& c = *sel.selected;
      if (sel.ambiguous) {
        std::string list = "ambiguous:";
        for (std::size_t i = 0; i < sel.stable.size(); ++i) {
          list += (i ? "|" : "") + format_double(sel.stable[i].B);
        }
        row.warnings.push_back(list);
      }
      row.idf = frequency_response(c, problem);
      row.B = c.B;
      row.stable = true;
      const SaturationState st = saturation_state(c, problem);
      row.accel_reached = st.accel_reached;
      row.speed_reached = st.speed_reached;
    }
  } catch (const NoRootFound&) {
    row.warnings.emplace_back("no_root_found");
    row.failed = true;
  } catch (const PoleOnLocus&) {
    row.warnings.emplace_back("pole_on_locus");
    row.failed = true;
  }

  if (flags.with_sim) {
    try {
      const SimEstimate est = estimate_frequency_response(sc, w, sc.solver);
      row.sim = est.point;
      row.sim_residual_fraction = est.fit.residual_fraction;
      if (est.fit.residual_fraction > kResidualFlag) row.warnings.emplace_back("sim_harmonic_residual_high");
    } catch (const NonConvergence&) {
      row.warnings.emplace_back("sim_nonconvergence");
    } catch (const DivergenceError&) {
      row.warnings.emplace_back("sim_divergence");
    }
  }
  return row;
}

SweepResult run_sweep(const Scenario& sc, const AnalysisFlags& flags) {
  validate(sc);
  if (sc.leader_amplitude == 0.0) {
    throw ValidationError("leader_amplitude",
                          "R = 0 has no frequency response; use verdict --limit-cycle for the free response");
  }
  SweepResult res;
  res.scenario = sc;
  res.flags = flags;
  res.warnings = scenario_warnings(sc);
  res.rows.resize(sc.freq_grid_hz.size());
  parallel_for(res.rows.size(), [&](std::size_t i) {
    try {
      res.rows[i] = analyze_frequency(sc, sc.freq_grid_hz[i], flags);
    } catch (const Error&) {
      SweepRow& r = res.rows[i];
      r.f_hz = sc.freq_grid_hz[i];
      r.lin = linear_frequency_response(sc.gains, angular_frequency(r.f_hz));
      r.failed = true;
      r.warnings.emplace_back("error");
    }
  });

  std::vector<double> principal;
  for (const SweepRow& r : res.rows) {
    if (r.idf) principal.push_back(r.idf->phase);
  }
  const std::vector<double> unwrapped = unwrap_phases(principal);
  std::size_t k = 0;
  for (SweepRow& r : res.rows) {
    if (r.idf) r.idf->phase_unwrapped = unwrapped[k++];
  }
  std::vector<double> lin_principal;
  for (const SweepRow& r : res.rows) lin_principal.push_back(r.lin.phase);
  const std::vector<double> lin_unwrapped = unwrap_phases(lin_principal);
  for (std::size_t i = 0; i < res.rows.size(); ++i) res.rows[i].lin.phase_unwrapped = lin_unwrapped[i];
  return res;
}

double ratio_scale(const SaturationLimits& l) {
  if (l.accel_active) return l.accel_bound();
  if (l.speed_active) return l.speed_bound();
  throw ValidationError("limits", "heatmap needs at least one active saturation");
}

HeatmapResult run_heatmap(const Scenario& sc, const HeatmapSpec& spec, const AnalysisFlags& flags) {
  validate(sc);
  if (spec.f_points < 2 || spec.ratio_points < 2) throw ValidationError("heatmap.resolution", "must be >= 2x2");
  if (!(spec.ratio_min >= 0.0 && spec.ratio_max > spec.ratio_min)) {
    throw ValidationError("heatmap.ratio", "need 0 <= ratio_min < ratio_max");
  }
  HeatmapResult hm;
  hm.scenario = sc;
  hm.spec = spec;
  hm.ratio_scale = ratio_scale(sc.limits);
  hm.f_hz = linear_grid(spec.f_min, spec.f_max, spec.f_points);
  hm.ratio = linear_grid(spec.ratio_min, spec.ratio_max, spec.ratio_points);
  const std::size_t nf = hm.f_hz.size();
  const std::size_t cells = nf * hm.ratio.size();
  for (auto* layer : {&hm.mag_lin, &hm.phase_lin, &hm.mag_idf, &hm.phase_idf, &hm.mag_diff, &hm.phase_diff}) {
    layer->assign(cells, kNaN);
  }
  hm.limits_reached.assign(cells, 0);
  hm.cell_warnings.assign(cells, "");

  std::vector<FrequencyResponsePoint> lin(nf);
  for (std::size_t j = 0; j < nf; ++j) lin[j] = linear_frequency_response(sc.gains, angular_frequency(hm.f_hz[j]));

  AnalysisFlags cell_flags = flags;
  cell_flags.with_sim = false;
  parallel_for(cells, [&](std::size_t idx) {
    const std::size_t i = idx / nf;
    const std::size_t j = idx % nf;
    hm.mag_lin[idx] = lin[j].magnitude;
    hm.phase_lin[idx] = lin[j].phase;
    const double R = hm.ratio[i] * hm.ratio_scale;
    if (R == 0.0) {
      hm.mag_idf[idx] = lin[j].magnitude;
      hm.phase_idf[idx] = lin[j].phase;
      return;
    }
    Scenario cell = sc;
    cell.leader_amplitude = R;
    try {
      const SweepRow row = analyze_frequency(cell, hm.f_hz[j], cell_flags);
      if (row.idf) {
        hm.mag_idf[idx] = row.idf->magnitude;
        hm.phase_idf[idx] = row.idf->phase;
      }
      hm.limits_reached[idx] = row.limits_reached() ? 1 : 0;
      std::string w;
      for (const std::string& s : row.warnings) {
        if (s.rfind("asymmetric_", 0) == 0) continue;
        w += (w.empty() ? "" : ";") + s;
      }
      hm.cell_warnings[idx] = w;
    } catch (const Error&) {
      hm.cell_warnings[idx] = "error";
    }
  });

  for (std::size_t i = 0; i < hm.ratio.size(); ++i) {
    std::vector<double> principal;
    std::vector<std::size_t> where;
    for (std::size_t j = 0; j < nf; ++j) {
      const std::size_t idx = hm.index(i, j);
      if (std::isfinite(hm.phase_idf[idx])) {
        principal.push_back(hm.phase_idf[idx]);
        where.push_back(idx);
      }
    }
    const std::vector<double> un = unwrap_phases(principal);
    for (std::size_t k = 0; k < where.size(); ++k) hm.phase_idf[where[k]] = un[k];
  }
  for (std::size_t idx = 0; idx < cells; ++idx) {
    hm.mag_diff[idx] = hm.mag_lin[idx] - hm.mag_idf[idx];
    hm.phase_diff[idx] = hm.phase_lin[idx] - hm.phase_idf[idx];
  }
  return hm;
}

LimitCycleVerdict limit_cycle_verdict(const Scenario& sc, const std::vector<double>& offsets) {
  Scenario free = sc;
  free.leader_amplitude = 0.0;
  LimitCycleVerdict v;
  v.f_hz = sc.freq_grid_hz;
  v.passed = true;
  for (double f : sc.freq_grid_hz) {
    const LimitCycleReport r = check_no_limit_cycle(make_problem(free, angular_frequency(f)), sc.solver);
    v.passed = v.passed && r.no_root;
    v.balance.push_back(r);
  }
  for (double off : offsets) {
    const DecayReport d = decay_check(free, off, sc.solver);
    v.passed = v.passed && d.passed;
    v.decay.push_back(d);
  }
  return v;
}

VerdictReport verdict_string_stability(const Scenario& sc, const AnalysisFlags& flags) {
  VerdictReport rep;
  rep.scenario = sc;
  SweepResult sweep = run_sweep(sc, flags);
  std::vector<std::pair<double, double>> lin, idf, sim;
  bool accel = false;
  bool speed = false;
  for (const SweepRow& r : sweep.rows) {
    lin.emplace_back(r.f_hz, r.lin.magnitude);
    if (r.idf) idf.emplace_back(r.f_hz, r.idf->magnitude);
    if (r.sim) sim.emplace_back(r.f_hz, r.sim->magnitude);
    accel = accel || r.accel_reached;
    speed = speed || r.speed_reached;
  }
  rep.linear = summarize("linear", lin);
  if (!idf.empty()) rep.idf = summarize("idf", idf);
  if (!sim.empty()) rep.sim = summarize("simulation", sim);
  if (idf.size() < sweep.rows.size()) rep.warnings.emplace_back("idf_missing_rows");
  if (flags.with_sim && sim.size() < sweep.rows.size()) rep.warnings.emplace_back("sim_missing_rows");
  if (accel) rep.active_limits.emplace_back("accel");
  if (speed) rep.active_limits.emplace_back("speed");
  for (const std::string& w : sweep.warnings) rep.warnings.push_back(w);
  rep.sweep = std::move(sweep);
  return rep;
}

LocusExport export_locus(const Scenario& sc, double f_hz, std::optional<std::size_t> candidate_index) {
  validate(sc);
  if (!(f_hz > 0.0)) throw ValidationError("freq", "must be > 0");
  const double w = angular_frequency(f_hz);
  const BalanceProblem problem = make_problem(sc, w);
  std::vector<OscillationCandidate> cands = solve_candidates(problem, sc.solver);
  if (cands.empty()) throw UndefinedResponse("no oscillation candidate for R = 0");
  for (OscillationCandidate& c : cands) c.stability = classify_stability(c, problem, sc.solver);
  LocusExport out;
  out.f_hz = f_hz;
  if (candidate_index) {
    if (*candidate_index >= cands.size()) {
      throw ValidationError("candidate", "index out of range (" + std::to_string(cands.size()) + " candidates)");
    }
    out.candidate = cands[*candidate_index];
  } else {
    const SelectionReport sel = select_response(cands);
    out.candidate = sel.selected ? *sel.selected : cands.front();
  }
  out.points = open_loop_locus(out.candidate, problem, sc.solver);
  std::vector<std::complex<double>> poly;
  for (const LocusPoint& p : out.points) poly.push_back(p.value);
  out.winding = winding_number(poly, {-1.0, 0.0});
  return out;
}

}  // namespace satfr
