#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "satfr/commands.hpp"

namespace satfr {

/// Frozen sweep CSV header.
inline constexpr const char* kSweepCsvHeader =
    "f_hz,mag_idf,phase_idf_rad,phase_idf_unwrapped,mag_lin,phase_lin_rad,mag_sim,phase_sim_rad,B,stable,warnings";

/// Appended after kSweepCsvHeader when degree columns are requested.
inline constexpr const char* kSweepCsvDegreeColumns = "phase_idf_deg,phase_idf_unwrapped_deg,phase_lin_deg,phase_sim_deg";

struct EmitOptions {
  bool degrees = false;
  std::vector<std::string> defaulted;  ///< scenario fields filled from defaults
};

/// %.9g, or NA for a missing or non-finite value.
std::string format_number(double v);

void write_sweep_csv(const SweepResult& result, std::ostream& out, const EmitOptions& options = {});
nlohmann::json sweep_to_json(const SweepResult& result, const EmitOptions& options = {});

nlohmann::json heatmap_index_json(const HeatmapResult& result, const EmitOptions& options = {});
/// Long format, one row per cell: f_hz,ratio,value.
void write_heatmap_layer_csv(const HeatmapResult& result, const std::string& layer, std::ostream& out);
/// Layer names in output order.
std::vector<std::string> heatmap_layers();

nlohmann::json verdict_to_json(const VerdictReport& report, const EmitOptions& options = {});
nlohmann::json limit_cycle_to_json(const LimitCycleVerdict& verdict);

/// theta,re,im, one row per locus sample.
void write_locus_csv(const LocusExport& locus, std::ostream& out, const EmitOptions& options = {});
nlohmann::json locus_to_json(const LocusExport& locus);

/// Writes text to dir/name, creating dir. IoError with the path on failure.
std::string write_text_file(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace satfr
