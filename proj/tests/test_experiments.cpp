#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ealab/exact_oracles.hpp"
#include "ealab/experiments.hpp"

using namespace ealab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ealab_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Cell onemax_cell(std::size_t n, double p, std::size_t reps) {
  Cell cell;
  cell.function.kind = FamilyKind::onemax;
  cell.function.n = n;
  cell.p = p;
  cell.reps = reps;
  return cell;
}

}  // namespace

TEST_CASE("summary statistics") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto s = summarize_values(v);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.sd == doctest::Approx(std::sqrt(2.5)));
  CHECK(s.se == doctest::Approx(std::sqrt(2.5 / 5.0)));
  CHECK(s.median == doctest::Approx(3.0));
  CHECK(s.q25 == doctest::Approx(2.0));
  CHECK(s.q75 == doctest::Approx(4.0));
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 5.0);
}

TEST_CASE("run_cell is deterministic and independent of worker count") {
  const Cell cell = onemax_cell(25, 0.04, 40);
  const auto a = run_cell(cell, 999, 1);
  const auto b = run_cell(cell, 999, 2);
  REQUIRE(a.size() == b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    CHECK(a[r].T == b[r].T);
    CHECK(a[r].stream_key == b[r].stream_key);
  }
  // a different master seed moves the records
  const auto c = run_cell(cell, 1000, 2);
  bool any_diff = false;
  for (std::size_t r = 0; r < a.size(); ++r) any_diff = any_diff || a[r].T != c[r].T;
  CHECK(any_diff);
}

TEST_CASE("campaign outputs are byte-identical across runs and resume by cell") {
  Campaign campaign;
  campaign.master_seed = 4242;
  campaign.cells.push_back(onemax_cell(20, 0.05, 10));
  campaign.cells.push_back(onemax_cell(10, 0.1, 10));

  const auto dir1 = fresh_dir("campaign1");
  const auto dir2 = fresh_dir("campaign2");
  run_campaign(campaign, dir1, 2);
  run_campaign(campaign, dir2, 1);

  const auto rec_name = "records_" + campaign.cells[0].key() + ".jsonl";
  CHECK(slurp(dir1 / rec_name) == slurp(dir2 / rec_name));
  CHECK(slurp(dir1 / "summaries.csv") == slurp(dir2 / "summaries.csv"));

  // resuming: re-running leaves bytes unchanged
  std::ostringstream log;
  run_campaign(campaign, dir1, 2, &log);
  CHECK(log.str().find("skipping") != std::string::npos);
  CHECK(slurp(dir1 / rec_name) == slurp(dir2 / rec_name));
}

TEST_CASE("summaries are recomputable from the JSONL records alone") {
  Campaign campaign;
  campaign.master_seed = 7;
  campaign.cells.push_back(onemax_cell(15, 0.06, 25));
  const auto dir = fresh_dir("rebuild");
  const auto summaries = run_campaign(campaign, dir, 2);
  const auto rebuilt = rebuild_summaries(campaign, dir);
  REQUIRE(summaries.size() == rebuilt.size());
  CHECK(summary_csv_row(summaries[0]) == summary_csv_row(rebuilt[0]));
}

TEST_CASE("reading truncated JSONL names the malformed line") {
  const auto dir = fresh_dir("truncated");
  const auto path = dir / "records.jsonl";
  {
    std::ofstream out(path);
    out << R"({"rep":0,"T":5,"capped":false,"init_ones":2,"seed":1})" << "\n";
    out << R"({"rep":1,"T":7,"cap)";  // cut mid-line
  }
  try {
    read_records_jsonl(path);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find(":2") != std::string::npos);
    CHECK(msg.find("records.jsonl") != std::string::npos);
  }
}

TEST_CASE("campaign JSON round-trip resolves c to p") {
  const std::string text = R"({
    "master_seed": 11,
    "cells": [
      {"function": {"kind": "onemax", "n": 50, "seed": 0}, "c": 2.0, "reps": 10},
      {"function": {"kind": "binval", "n": 8, "seed": 0}, "p": 0.125, "reps": 5,
       "selector": "best", "mu": 3, "cap": 1000}
    ]
  })";
  const auto campaign = Campaign::from_json(text);
  REQUIRE(campaign.cells.size() == 2);
  CHECK(campaign.cells[0].p == doctest::Approx(0.04));
  CHECK(campaign.cells[0].c.value() == 2.0);
  CHECK(campaign.cells[1].selector == "best");
  CHECK(campaign.cells[1].mu == 3);
  const auto back = Campaign::from_json(campaign.to_json());
  CHECK(back.master_seed == campaign.master_seed);
  CHECK(back.cells[0].p == campaign.cells[0].p);
  CHECK(back.cells[1].cap == campaign.cells[1].cap);
}

TEST_CASE("dominance test: identical samples pass, a shifted copy fails") {
  std::vector<double> a;
  for (int k = 0; k < 500; ++k) a.push_back(100.0 + k);
  const auto self = dominance_test(a, a, 0.99);
  CHECK(self.pass);
  CHECK(self.epsilon == doctest::Approx(std::sqrt(std::log(200.0) / 1000.0)));

  std::vector<double> shifted;
  for (double v : a) shifted.push_back(v + 1000.0);
  CHECK(dominance_test(a, shifted, 0.99).pass);   // a is faster: fine
  CHECK(!dominance_test(shifted, a, 0.99).pass);  // direction check
}

TEST_CASE("dominance test refuses censored data") {
  RunRecord ok;
  ok.T = 10;
  RunRecord capped;
  capped.T = 100;
  capped.capped = true;
  const std::vector<RunRecord> a{ok, ok};
  const std::vector<RunRecord> b{ok, capped};
  CHECK_THROWS_AS(dominance_test_records(a, b, 0.95), std::invalid_argument);
}

TEST_CASE("onemax runtimes dominate binval runtimes at small scale") {
  Cell om = onemax_cell(30, 1.0 / 30.0, 3000);
  Cell bv = om;
  bv.function.kind = FamilyKind::binval;
  const auto rec_a = run_cell(om, 31337, 2);
  const auto rec_b = run_cell(bv, 31337, 2);
  CHECK(dominance_test_records(rec_a, rec_b, 0.99).pass);
}

TEST_CASE("optimal p scan finds c = 1 on a small grid") {
  FunctionSpec fn;
  fn.kind = FamilyKind::onemax;
  const std::vector<double> grid{0.5, 1.0, 2.0};
  const auto result = optimal_p_scan(50, grid, fn, 300, 2024, 2);
  CHECK(result.argmin_c == 1.0);
  REQUIRE(result.rows.size() == 3);
  CHECK(result.rows[0].c == 0.5);
  CHECK(result.rows[0].mean > result.rows[1].mean);

  CHECK_THROWS_AS(optimal_p_scan(50, std::vector<double>{0.5, 2.0}, fn, 300, 1, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(optimal_p_scan(50, grid, fn, 100, 1, 1), std::invalid_argument);
}

TEST_CASE("phase transition scan separates easy and hopeless multipliers") {
  FunctionSpec fn;
  fn.kind = FamilyKind::onemax;
  const std::vector<double> m{1.0, 4.0};
  const auto rows = phase_transition_scan(30, m, fn, 6, 100'000, 99, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].capped_frac == 0.0);
  CHECK(!rows[0].median_capped);
  CHECK(rows[0].median > 0.0);
  CHECK(rows[1].capped_frac == 1.0);
  CHECK(rows[1].median_capped);
}

TEST_CASE("drift trace estimator: onemax clears 1/(en), binval identity fails it") {
  const std::size_t n = 30;

  Cell om = onemax_cell(n, 1.0 / n, 300);
  om.recording.mode = RecordingPolicy::Mode::ones;
  const auto om_records = run_cell(om, 5, 2);
  const double delta_ref = 1.0 / (std::exp(1.0) * static_cast<double>(n));
  const auto om_bins = drift_trace_estimator(om_records, delta_ref);
  REQUIRE(!om_bins.empty());
  for (const auto& bin : om_bins) CHECK(!bin.flagged);

  Cell bv = onemax_cell(n, 3.0 / n, 300);
  bv.function.kind = FamilyKind::binval;
  bv.recording.mode = RecordingPolicy::Mode::potential;
  bv.recording.pot_kind = PotentialKind::identity;
  const auto bv_records = run_cell(bv, 5, 2);
  const auto bv_bins = drift_trace_estimator(bv_records, delta_ref);
  bool any_flagged = false;
  for (const auto& bin : bv_bins) any_flagged = any_flagged || bin.flagged;
  CHECK(any_flagged);
}

TEST_CASE("drift trace estimator rejects thinned or missing trajectories") {
  Cell cell = onemax_cell(10, 0.1, 5);
  const auto no_traj = run_cell(cell, 1, 1);
  CHECK_THROWS_AS(drift_trace_estimator(no_traj, 0.01), std::invalid_argument);

  cell.recording.mode = RecordingPolicy::Mode::ones;
  cell.recording.thin = 3;
  const auto thinned = run_cell(cell, 1, 1);
  CHECK_THROWS_AS(drift_trace_estimator(thinned, 0.01), std::invalid_argument);
}

TEST_CASE("refined potential drift traces on binval clear 1/(en)") {
  const std::size_t n = 30;
  Cell bv = onemax_cell(n, 1.0 / n, 300);
  bv.function.kind = FamilyKind::binval;
  bv.recording.mode = RecordingPolicy::Mode::potential;
  bv.recording.pot_kind = PotentialKind::refined;
  const auto records = run_cell(bv, 6, 2);
  const double delta_ref = 1.0 / (std::exp(1.0) * static_cast<double>(n));
  const auto bins = drift_trace_estimator(records, delta_ref);
  REQUIRE(!bins.empty());
  for (const auto& bin : bins) CHECK(!bin.flagged);
}
