#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "satfr/harmonic_balance.hpp"
#include "satfr/oscillation_stability.hpp"
#include "satfr/time_domain_oracle.hpp"

namespace satfr {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs fn(0..n-1) on a small worker pool; results land in index order.
/// fn must not throw.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

struct AnalysisFlags {
  bool with_sim = false;
  bool full_sweep = false;
};

/// Everything computed at one grid frequency. Missing values stay empty.
struct SweepRow {
  double f_hz = 0.0;
  std::optional<FrequencyResponsePoint> idf;
  FrequencyResponsePoint lin;
  std::optional<FrequencyResponsePoint> sim;
  std::optional<double> B;
  std::optional<bool> stable;  ///< a stable candidate was selected
  bool accel_reached = false;
  bool speed_reached = false;
  std::optional<double> sim_residual_fraction;
  std::vector<OscillationCandidate> candidates;
  std::vector<std::string> warnings;
  bool failed = false;  ///< no usable IDF response at this row

  bool limits_reached() const { return accel_reached || speed_reached; }
};

struct SweepResult {
  Scenario scenario;
  AnalysisFlags flags;
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;  ///< scenario-level remarks

  bool all_rows_failed() const;
};

/// Candidates, stability and selected response at one frequency. Errors
/// are recorded in the row.
SweepRow analyze_frequency(const Scenario& scenario, double f_hz, const AnalysisFlags& flags);

/// Per-frequency analysis over scenario.freq_grid_hz with IDF phases
/// unwrapped from the lowest frequency. ValidationError for R = 0.
SweepResult run_sweep(const Scenario& scenario, const AnalysisFlags& flags);

struct HeatmapSpec {
  double f_min = 0.1;
  double f_max = 0.5;
  int f_points = 40;
  double ratio_min = 0.0;
  double ratio_max = 8.0;
  int ratio_points = 40;
};

/// Layers are ratio-major: index = i_ratio * f_hz.size() + i_f.
struct HeatmapResult {
  Scenario scenario;
  HeatmapSpec spec;
  double ratio_scale = 0.0;  ///< R = ratio * ratio_scale
  std::vector<double> f_hz;
  std::vector<double> ratio;
  std::vector<double> mag_lin;
  std::vector<double> phase_lin;
  std::vector<double> mag_idf;     ///< NaN where no stable response exists
  std::vector<double> phase_idf;   ///< unwrapped along f from the lowest f
  std::vector<double> mag_diff;    ///< mag_lin - mag_idf
  std::vector<double> phase_diff;  ///< phase_lin - phase_idf
  std::vector<int> limits_reached;
  std::vector<std::string> cell_warnings;

  std::size_t index(std::size_t i_ratio, std::size_t i_f) const { return i_ratio * f_hz.size() + i_f; }
};

/// Acceleration bound when that saturation is active, otherwise the speed
/// bound. ValidationError for a purely linear scenario.
double ratio_scale(const SaturationLimits& limits);

/// Sweeps R / ratio_scale against frequency. Ratio 0 cells take the
/// small-amplitude limit, which is the linear response.
HeatmapResult run_heatmap(const Scenario& scenario, const HeatmapSpec& spec, const AnalysisFlags& flags = {});

inline constexpr double kStringStabilityTolerance = 1e-9;

struct MethodVerdict {
  std::string method;
  int evaluated = 0;
  double max_magnitude = 0.0;
  double argmax_f_hz = 0.0;
  bool string_stable = false;
};

struct LimitCycleVerdict {
  std::vector<double> f_hz;
  std::vector<LimitCycleReport> balance;
  std::vector<DecayReport> decay;
  bool passed = false;
};

struct VerdictReport {
  Scenario scenario;
  std::optional<MethodVerdict> linear;
  std::optional<MethodVerdict> idf;
  std::optional<MethodVerdict> sim;
  std::optional<LimitCycleVerdict> limit_cycle;
  std::vector<std::string> active_limits;  ///< limits reached somewhere on the grid
  std::vector<std::string> warnings;
  std::optional<SweepResult> sweep;
};

/// String stability per method: stable iff max |F| <= 1 + tolerance.
VerdictReport verdict_string_stability(const Scenario& scenario, const AnalysisFlags& flags);

/// Free-response checks for R = 0: balance scan at every grid frequency and
/// decay from each offset.
LimitCycleVerdict limit_cycle_verdict(const Scenario& scenario,
                                      const std::vector<double>& offsets = {0.1, 1.0, 10.0});

struct LocusExport {
  double f_hz = 0.0;
  OscillationCandidate candidate;
  std::vector<LocusPoint> points;
  double winding = 0.0;
};

/// Locus of one candidate at f_hz; candidate_index selects among the sorted
/// candidates, default the selected response (or the first).
LocusExport export_locus(const Scenario& scenario, double f_hz, std::optional<std::size_t> candidate_index);

}  // namespace satfr
