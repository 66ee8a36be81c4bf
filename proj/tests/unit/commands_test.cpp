#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "satfr/commands.hpp"
#include "satfr/errors.hpp"
#include "satfr/report_io.hpp"
#include "satfr/scenario_io.hpp"

using namespace satfr;

namespace {

const std::string kSource = SATFR_SOURCE_DIR;

Scenario shipped(const std::string& name) { return load_scenario(kSource + "/scenarios/" + name + ".json"); }

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(ParallelFor, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, [](std::size_t) { FAIL(); });
}

TEST(Sweep, CsvHeaderIsFrozen) {
  std::ifstream golden(kSource + "/tests/golden/sweep_header.csv");
  std::string expected;
  std::getline(golden, expected);
  EXPECT_EQ(expected, kSweepCsvHeader);

  Scenario sc = shipped("control_saturation");
  sc.freq_grid_hz = {0.05, 0.1};
  std::ostringstream os;
  write_sweep_csv(run_sweep(sc, {}), os);
  const auto rows = lines(os.str());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], expected);
  // no simulation requested: both sim columns are NA
  EXPECT_NE(rows[1].find(",NA,NA,"), std::string::npos);
}

TEST(Sweep, DegreeColumnsAreAppended) {
  Scenario sc = shipped("control_saturation");
  sc.freq_grid_hz = {0.1};
  std::ostringstream os;
  write_sweep_csv(run_sweep(sc, {}), os, {true, {}});
  const auto rows = lines(os.str());
  EXPECT_EQ(rows[0], std::string(kSweepCsvHeader) + "," + kSweepCsvDegreeColumns);
  EXPECT_EQ(std::count(rows[1].begin(), rows[1].end(), ','), std::count(rows[0].begin(), rows[0].end(), ','));
}

TEST(Sweep, Deterministic) {
  const Scenario sc = shipped("both_saturations");
  std::ostringstream a, b;
  write_sweep_csv(run_sweep(sc, {}), a);
  write_sweep_csv(run_sweep(sc, {}), b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(sweep_to_json(run_sweep(sc, {})).dump(), sweep_to_json(run_sweep(sc, {})).dump());
}

TEST(Sweep, RowsCarryIdfAndLinear) {
  const SweepResult res = run_sweep(shipped("both_saturations"), {});
  ASSERT_EQ(res.rows.size(), 50u);
  EXPECT_FALSE(res.all_rows_failed());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const SweepRow& r = res.rows[i];
    ASSERT_TRUE(r.idf) << r.f_hz;
    EXPECT_TRUE(r.stable.value_or(false));
    EXPECT_FALSE(r.sim);
    EXPECT_EQ(r.lin.method, ResponseMethod::Linear);
    if (i) EXPECT_LT(std::abs(r.idf->phase_unwrapped - res.rows[i - 1].idf->phase_unwrapped), 3.14159);
  }
}

TEST(Sweep, MildSaturationCanRaiseGain) {
  // Just past the acceleration bound N is close to 1 and the loss in
  // 1 - k1 N / w^2 outweighs it at low frequency; deep saturation lowers |F|.
  const Scenario sc = shipped("both_saturations");
  const SweepRow mild = analyze_frequency(sc, 0.0922373329, {});
  ASSERT_TRUE(mild.idf && mild.accel_reached);
  EXPECT_LT(*mild.B, 1.3 * sc.limits.a_max);
  EXPECT_GT(mild.idf->magnitude, mild.lin.magnitude);
  const SweepRow deep = analyze_frequency(sc, 0.3, {});
  ASSERT_TRUE(deep.idf && deep.accel_reached);
  EXPECT_LT(deep.idf->magnitude, deep.lin.magnitude);
}

TEST(Sweep, RefusesZeroLeader) {
  Scenario sc = shipped("control_saturation");
  sc.leader_amplitude = 0.0;
  EXPECT_THROW(run_sweep(sc, {}), ValidationError);
}

TEST(Sweep, JsonEchoesScenarioAndSettings) {
  Scenario sc = shipped("state_saturation");
  sc.freq_grid_hz = {0.1, 0.2};
  const auto doc = sweep_to_json(run_sweep(sc, {}), {false, {"solver"}});
  EXPECT_EQ(doc["tool"], "satfr");
  EXPECT_EQ(doc["version"], kToolVersion);
  EXPECT_EQ(scenario_from_json(doc["scenario"]).scenario, sc);
  EXPECT_EQ(doc["settings"]["theta_samples"], 720);
  EXPECT_EQ(doc["defaulted_fields"][0], "solver");
  EXPECT_EQ(doc["rows"].size(), 2u);
  EXPECT_TRUE(doc["rows"][0]["simulation"].is_null());
}

TEST(Heatmap, TwoByTwoComposition) {
  const Scenario sc = shipped("control_saturation");
  HeatmapSpec spec;
  spec.f_min = 0.1;
  spec.f_max = 0.3;
  spec.f_points = 2;
  spec.ratio_min = 0.0;
  spec.ratio_max = 4.0;
  spec.ratio_points = 2;
  const HeatmapResult hm = run_heatmap(sc, spec);
  ASSERT_EQ(hm.f_hz.size(), 2u);
  ASSERT_EQ(hm.ratio.size(), 2u);
  EXPECT_EQ(hm.ratio_scale, 5.0);
  for (std::size_t j = 0; j < 2; ++j) {
    // ratio 0 row is the linear response
    EXPECT_EQ(hm.mag_idf[hm.index(0, j)], hm.mag_lin[hm.index(0, j)]);
    EXPECT_EQ(hm.limits_reached[hm.index(0, j)], 0);
    // ratio 4 row agrees with a direct analysis at R = 20
    Scenario direct = sc;
    direct.leader_amplitude = 20.0;
    const SweepRow row = analyze_frequency(direct, hm.f_hz[j], {});
    EXPECT_NEAR(hm.mag_idf[hm.index(1, j)], row.idf->magnitude, 1e-12);
    EXPECT_EQ(hm.limits_reached[hm.index(1, j)], row.limits_reached() ? 1 : 0);
  }
  for (std::size_t k = 0; k < hm.mag_lin.size(); ++k) {
    EXPECT_DOUBLE_EQ(hm.mag_diff[k], hm.mag_lin[k] - hm.mag_idf[k]);
    EXPECT_DOUBLE_EQ(hm.phase_diff[k], hm.phase_lin[k] - hm.phase_idf[k]);
  }
  std::ostringstream os;
  write_heatmap_layer_csv(hm, "mag_idf", os);
  const auto rows = lines(os.str());
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "f_hz,ratio,value");
  EXPECT_EQ(rows[1].rfind("0.1,0,", 0), 0u);
  EXPECT_EQ(heatmap_index_json(hm)["layers"].size(), heatmap_layers().size());
}

TEST(Heatmap, RatioScale) {
  EXPECT_EQ(ratio_scale(make_limits(-5, 5, 0, 20, 10)), 5.0);
  EXPECT_EQ(ratio_scale(make_speed_limits(0, 20, 10)), 10.0);
  EXPECT_THROW(ratio_scale(no_limits()), ValidationError);
}

TEST(Verdict, TruckIsMisjudgedByTheLinearMethod) {
  const VerdictReport rep = verdict_string_stability(shipped("loaded_truck"), {});
  ASSERT_TRUE(rep.linear && rep.idf);
  EXPECT_FALSE(rep.linear->string_stable);
  EXPECT_GT(rep.linear->max_magnitude, 1.0);
  EXPECT_TRUE(rep.idf->string_stable);
  EXPECT_LE(rep.idf->max_magnitude, 1.0);
  EXPECT_EQ(rep.idf->evaluated, 25);
  EXPECT_FALSE(rep.sim);
  EXPECT_FALSE(rep.active_limits.empty());
  const auto doc = verdict_to_json(rep);
  EXPECT_EQ(doc["linear"]["verdict"], "unstable");
  EXPECT_EQ(doc["idf"]["verdict"], "stable");
}

TEST(Verdict, PassengerCarIsStableEitherWay) {
  const VerdictReport rep = verdict_string_stability(shipped("both_saturations"), {});
  EXPECT_TRUE(rep.linear->string_stable);
  EXPECT_TRUE(rep.idf->string_stable);
}

TEST(LimitCycle, NoLimitCycleInShippedScenarios) {
  for (const char* name : {"both_saturations", "loaded_truck"}) {
    Scenario sc = shipped(name);
    sc.leader_amplitude = 0.0;
    const LimitCycleVerdict v = limit_cycle_verdict(sc);
    EXPECT_TRUE(v.passed) << name;
    EXPECT_EQ(v.decay.size(), 3u);
    EXPECT_EQ(v.balance.size(), sc.freq_grid_hz.size());
    EXPECT_TRUE(limit_cycle_to_json(v)["passed"].get<bool>());
  }
}

TEST(Locus, ExportHasOneRowPerSampleAndCloses) {
  const LocusExport lx = export_locus(shipped("control_saturation"), 0.1, std::nullopt);
  ASSERT_EQ(lx.points.size(), 720u);
  EXPECT_EQ(lx.points.front().value, lx.points.back().value);
  EXPECT_EQ(lx.candidate.stability, Stability::Stable);
  EXPECT_NEAR(lx.winding, 0.0, 1e-9);
  std::ostringstream os;
  write_locus_csv(lx, os);
  const auto rows = lines(os.str());
  EXPECT_EQ(rows.size(), 721u);
  EXPECT_EQ(rows[0], "theta,re,im");
  EXPECT_EQ(locus_to_json(lx)["points"].size(), 720u);
  EXPECT_THROW(export_locus(shipped("control_saturation"), 0.1, 7), ValidationError);
}

TEST(Format, NumbersAndMissingValues) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(std::nan("")), "NA");
  EXPECT_EQ(format_number(INFINITY), "NA");
}

TEST(Files, WriteCreatesDirectory) {
  const std::string dir = (std::filesystem::temp_directory_path() / "satfr_out_test" / "nested").string();
  const std::string path = write_text_file(dir, "x.txt", "hello\n");
  std::ifstream in(path);
  std::string s;
  std::getline(in, s);
  EXPECT_EQ(s, "hello");
  std::filesystem::remove_all(std::filesystem::temp_directory_path() / "satfr_out_test");
  EXPECT_THROW(write_text_file("/proc/satfr_no_such_dir", "x.txt", ""), IoError);
}
