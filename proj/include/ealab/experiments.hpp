#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ealab/ea_engine.hpp"
#include "ealab/linear_function.hpp"

namespace ealab {

// --- summary statistics -----------------------------------------------------

struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;      // sample standard deviation
  double se = 0.0;      // sd / sqrt(count)
  double median = 0.0;
  double q05 = 0.0, q25 = 0.0, q75 = 0.0, q95 = 0.0;
};

Summary summarize_values(std::span<const double> values);

// Linear-interpolation quantile of a sorted sample, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

// --- campaign ----------------------------------------------------------------

// One grid point of a campaign.
struct Cell {
  FunctionSpec function;
  double p = 0.0;                  // resolved mutation probability
  std::optional<double> c;        // if set, p was given as c/n
  std::size_t mu = 1;
  std::string selector = "elitist";  // "elitist" | "best" | "uniform"
  std::size_t reps = 0;
  std::uint64_t cap = 10'000'000;
  RecordingPolicy recording;

  std::string key() const;  // deterministic identifier used in file names
};

struct Campaign {
  std::uint64_t master_seed = 0;
  std::vector<Cell> cells;

  std::string to_json() const;
  static Campaign from_json(const std::string& text);
};

struct CellSummary {
  std::string key;
  std::string function;
  std::size_t n = 0;
  double p = 0.0;
  std::size_t mu = 1;
  std::string selector;
  std::size_t reps = 0;
  Summary stats;               // over uncapped runtimes
  double capped_frac = 0.0;
  double ratio_nln = 0.0;      // mean / (n ln n)
  double bound_refined = 0.0;  // refined upper bound (NaN unless p = 1/n, n >= 4)
  double bound_lower = 0.0;    // small-p lower bound (NaN outside regime)
  double bound_b1 = 0.0;       // general upper bound b(1) at alpha = 2
};

// Deterministic per-cell replication: record r is fully determined by
// (master_seed, cell key, r), independent of worker count.
std::vector<RunRecord> run_cell(const Cell& cell, std::uint64_t master_seed,
                                std::size_t jobs);

CellSummary summarize_cell(const Cell& cell, std::span<const RunRecord> records);

// Runs every cell, persisting one JSONL file per cell plus summaries.csv and
// report.md under outdir.  Cells whose JSONL already holds a full set of
// records are skipped, so interrupted campaigns resume by cell.
std::vector<CellSummary> run_campaign(const Campaign& campaign,
                                      const std::filesystem::path& outdir,
                                      std::size_t jobs, std::ostream* log = nullptr);

// --- persistence ---------------------------------------------------------------

struct StoredRecord {
  std::uint64_t rep = 0;
  std::uint64_t T = 0;
  bool capped = false;
  std::uint32_t init_ones = 0;
  std::uint64_t seed = 0;
};

void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const RunRecord> records);

// Throws std::runtime_error naming path and line number on malformed input.
std::vector<StoredRecord> read_records_jsonl(const std::filesystem::path& path);

std::string summaries_csv_header();
std::string summary_csv_row(const CellSummary& s);
void write_summaries_csv(const std::filesystem::path& path,
                         std::span<const CellSummary> summaries);
void write_report_md(const std::filesystem::path& path,
                     std::span<const CellSummary> summaries);

// Rebuilds summaries from the JSONL files of a campaign output directory.
std::vector<CellSummary> rebuild_summaries(const Campaign& campaign,
                                           const std::filesystem::path& outdir);

// --- statistical tests ---------------------------------------------------------

// One-sided empirical-CDF dominance check with a DKW band: passes when
// cdf_A(t) >= cdf_B(t) - eps for all t, i.e. "A stochastically no slower than
// B" is not refuted at the given confidence.  eps =
// sqrt(ln(2/(1-confidence)) / (2*min(|A|,|B|))).
struct DominanceVerdict {
  bool pass = false;
  double epsilon = 0.0;
  double min_slack = 0.0;  // min over t of cdf_A(t) - cdf_B(t) + eps
  double worst_t = 0.0;
};

DominanceVerdict dominance_test(std::span<const double> faster_candidate,
                                std::span<const double> slower_candidate,
                                double confidence);

// Record-level wrapper; refuses censored (capped) data.
DominanceVerdict dominance_test_records(std::span<const RunRecord> a,
                                        std::span<const RunRecord> b, double confidence);

// --- scans ---------------------------------------------------------------------

struct PScanRow {
  double c = 0.0;
  double p = 0.0;
  double mean = 0.0;
  double se = 0.0;
};

struct PScanResult {
  std::vector<PScanRow> rows;
  double argmin_c = 0.0;
  // true when the c = 1 cell beats both grid neighbors by > 2 combined SE
  bool c1_clearly_best = false;
};

PScanResult optimal_p_scan(std::size_t n, std::span<const double> c_grid,
                           const FunctionSpec& fn, std::size_t reps,
                           std::uint64_t master_seed, std::size_t jobs,
                           std::uint64_t cap = 10'000'000);

struct PhaseRow {
  double m = 0.0;  // p = m * ln(n) / n
  double p = 0.0;
  bool median_capped = false;  // median landed on a capped run
  double median = 0.0;         // over all runs with capped counted as +inf
  double capped_frac = 0.0;
};

std::vector<PhaseRow> phase_transition_scan(std::size_t n, std::span<const double> m_grid,
                                            const FunctionSpec& fn, std::size_t reps,
                                            std::uint64_t cap, std::uint64_t master_seed,
                                            std::size_t jobs);

// --- drift trace estimation ------------------------------------------------------

struct DriftBin {
  double s_lo = 0.0, s_hi = 0.0;
  std::size_t count = 0;
  double s_mean = 0.0;
  double delta_mean = 0.0;
  double delta_hat = 0.0;  // mean(delta) / mean(s)
  double se = 0.0;         // sd(delta) / (sqrt(count) * mean(s))
  bool flagged = false;    // delta_hat + 3*se < delta_ref
};

// Bins one-step potential decreases (s_t, s_t - s_{t+1}) from recorded
// trajectories by log-spaced s and compares the per-bin drift coefficient
// estimate against delta_ref.  Requires thinning interval 1 (consecutive
// steps) and at least one trajectory.
std::vector<DriftBin> drift_trace_estimator(std::span<const RunRecord> records,
                                            double delta_ref, std::size_t bins = 12);

}  // namespace ealab
