#include "ealab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "ealab/drift_bounds.hpp"

namespace ealab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v, const char* spec = "%.10g") {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::size_t effective_jobs(std::size_t jobs) {
  if (jobs != 0) return jobs;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return kNaN;
  if (sorted.size() == 1) return sorted[0];
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

Summary summarize_values(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.sd = s.se = s.median = s.q05 = s.q25 = s.q75 = s.q95 = kNaN;
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  s.se = s.sd / std::sqrt(static_cast<double>(values.size()));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.median = quantile_sorted(sorted, 0.5);
  s.q05 = quantile_sorted(sorted, 0.05);
  s.q25 = quantile_sorted(sorted, 0.25);
  s.q75 = quantile_sorted(sorted, 0.75);
  s.q95 = quantile_sorted(sorted, 0.95);
  return s;
}

std::string Cell::key() const {
  std::ostringstream os;
  os << function.label() << "_n" << (function.weights ? function.weights->size() : function.n)
     << "_p" << fmt(p, "%.6g") << "_mu" << mu << "_" << selector;
  return os.str();
}

std::vector<RunRecord> run_cell(const Cell& cell, std::uint64_t master_seed,
                                std::size_t jobs) {
  if (cell.reps == 0) throw std::invalid_argument("run_cell: reps must be >= 1");
  const LinearFunction fn = resolve(cell.function);
  const std::uint64_t cell_seed = mix_key(master_seed, hash_string(cell.key()));

  std::unique_ptr<ParentSelector> selector;
  if (cell.selector != "elitist") selector = make_parent_selector(cell.selector);

  std::vector<RunRecord> records(cell.reps);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= cell.reps) return;
      RunConfig cfg;
      cfg.function = cell.function;
      cfg.p = cell.p;
      cfg.mu = cell.mu;
      cfg.step_cap = cell.cap;
      cfg.master_seed = cell_seed;
      cfg.replication = rep;
      cfg.recording = cell.recording;
      records[rep] = selector ? run_mutation_based_ea(fn, cfg, *selector)
                              : run_oneone_ea_mu(fn, cfg);
    }
  };

  const std::size_t nthreads = std::min(effective_jobs(jobs), cell.reps);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return records;
}

namespace {

CellSummary summarize_from_values(const Cell& cell, std::span<const double> uncapped,
                                  std::size_t total) {
  CellSummary s;
  s.key = cell.key();
  s.function = cell.function.label();
  s.n = cell.function.weights ? cell.function.weights->size() : cell.function.n;
  s.p = cell.p;
  s.mu = cell.mu;
  s.selector = cell.selector;
  s.reps = total;
  s.stats = summarize_values(uncapped);
  s.capped_frac =
      total == 0 ? 0.0
                 : static_cast<double>(total - uncapped.size()) / static_cast<double>(total);
  const double dn = static_cast<double>(s.n);
  s.ratio_nln = s.stats.mean / (dn * std::log(dn));
  s.bound_refined = (s.n >= 4 && std::abs(cell.p * dn - 1.0) < 1e-9)
                        ? refined_upper_bound(s.n).expectation_bound
                        : kNaN;
  try {
    s.bound_lower = small_p_lower_bound(s.n, cell.p);
  } catch (const std::exception&) {
    s.bound_lower = kNaN;
  }
  s.bound_b1 = general_upper_bound(s.n, cell.p, 2.0, 1.0);
  return s;
}

}  // namespace

CellSummary summarize_cell(const Cell& cell, std::span<const RunRecord> records) {
  std::vector<double> uncapped;
  uncapped.reserve(records.size());
  for (const auto& r : records)
    if (!r.capped) uncapped.push_back(static_cast<double>(r.T));
  return summarize_from_values(cell, uncapped, records.size());
}

void write_records_jsonl(const std::filesystem::path& path,
                         std::span<const RunRecord> records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  for (std::size_t rep = 0; rep < records.size(); ++rep)
    out << records[rep].to_jsonl(rep) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<StoredRecord> read_records_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::vector<StoredRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("rep") || !j.contains("T") || !j.contains("capped"))
      throw std::runtime_error("malformed JSONL record at " + path.string() + ":" +
                               std::to_string(lineno));
    StoredRecord r;
    r.rep = j.at("rep").get<std::uint64_t>();
    r.T = j.at("T").get<std::uint64_t>();
    r.capped = j.at("capped").get<bool>();
    r.init_ones = j.value("init_ones", 0u);
    r.seed = j.value("seed", std::uint64_t{0});
    records.push_back(r);
  }
  return records;
}

std::string summaries_csv_header() {
  return "cell,function,n,p,mu,selector,reps,mean,se,median,q05,q25,q75,q95,"
         "capped_frac,ratio_nln,bound_refined_upper,bound_small_p_lower,bound_b1";
}

std::string summary_csv_row(const CellSummary& s) {
  std::ostringstream os;
  os << s.key << ',' << s.function << ',' << s.n << ',' << fmt(s.p, "%.6g") << ',' << s.mu
     << ',' << s.selector << ',' << s.reps << ',' << fmt(s.stats.mean) << ','
     << fmt(s.stats.se) << ',' << fmt(s.stats.median) << ',' << fmt(s.stats.q05) << ','
     << fmt(s.stats.q25) << ',' << fmt(s.stats.q75) << ',' << fmt(s.stats.q95) << ','
     << fmt(s.capped_frac) << ',' << fmt(s.ratio_nln) << ',' << fmt(s.bound_refined)
     << ',' << fmt(s.bound_lower) << ',' << fmt(s.bound_b1);
  return os.str();
}

void write_summaries_csv(const std::filesystem::path& path,
                         std::span<const CellSummary> summaries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << summaries_csv_header() << '\n';
  for (const auto& s : summaries) out << summary_csv_row(s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_report_md(const std::filesystem::path& path,
                     std::span<const CellSummary> summaries) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "# Campaign report\n\n";
  out << "| cell | reps | mean | se | median | capped | mean/(n ln n) | b(1) |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : summaries) {
    out << "| " << s.key << " | " << s.reps << " | " << fmt(s.stats.mean, "%.4g") << " | "
        << fmt(s.stats.se, "%.3g") << " | " << fmt(s.stats.median, "%.4g") << " | "
        << fmt(s.capped_frac, "%.3g") << " | " << fmt(s.ratio_nln, "%.4g") << " | "
        << fmt(s.bound_b1, "%.4g") << " |\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::filesystem::path cell_records_path(const std::filesystem::path& outdir,
                                        const Cell& cell) {
  return outdir / ("records_" + cell.key() + ".jsonl");
}

bool cell_complete(const std::filesystem::path& path, std::size_t reps) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return false;
  try {
    return read_records_jsonl(path).size() == reps;
  } catch (const std::exception&) {
    return false;  // partial or damaged output: re-run the cell
  }
}

CellSummary summarize_stored(const Cell& cell, std::span<const StoredRecord> records) {
  std::vector<double> uncapped;
  uncapped.reserve(records.size());
  for (const auto& r : records)
    if (!r.capped) uncapped.push_back(static_cast<double>(r.T));
  return summarize_from_values(cell, uncapped, records.size());
}

}  // namespace

std::vector<CellSummary> rebuild_summaries(const Campaign& campaign,
                                           const std::filesystem::path& outdir) {
  std::vector<CellSummary> summaries;
  for (const auto& cell : campaign.cells) {
    const auto records = read_records_jsonl(cell_records_path(outdir, cell));
    summaries.push_back(summarize_stored(cell, records));
  }
  return summaries;
}

std::vector<CellSummary> run_campaign(const Campaign& campaign,
                                      const std::filesystem::path& outdir,
                                      std::size_t jobs, std::ostream* log) {
  std::filesystem::create_directories(outdir);
  {
    std::ofstream cfg(outdir / "campaign.json", std::ios::trunc);
    cfg << campaign.to_json() << '\n';
  }
  for (const auto& cell : campaign.cells) {
    const auto path = cell_records_path(outdir, cell);
    if (cell_complete(path, cell.reps)) {
      if (log) *log << "cell " << cell.key() << ": complete, skipping\n";
      continue;
    }
    if (log) *log << "cell " << cell.key() << ": running " << cell.reps << " reps\n";
    const auto records = run_cell(cell, campaign.master_seed, jobs);
    write_records_jsonl(path, records);
  }
  auto summaries = rebuild_summaries(campaign, outdir);
  write_summaries_csv(outdir / "summaries.csv", summaries);
  write_report_md(outdir / "report.md", summaries);
  return summaries;
}

std::string Campaign::to_json() const {
  nlohmann::json j;
  j["master_seed"] = master_seed;
  j["cells"] = nlohmann::json::array();
  for (const auto& cell : cells) {
    nlohmann::json c;
    c["function"] = nlohmann::json::parse(cell.function.to_json());
    if (cell.c)
      c["c"] = *cell.c;
    else
      c["p"] = cell.p;
    c["mu"] = cell.mu;
    c["selector"] = cell.selector;
    c["reps"] = cell.reps;
    c["cap"] = cell.cap;
    j["cells"].push_back(c);
  }
  return j.dump(2);
}

Campaign Campaign::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  Campaign campaign;
  campaign.master_seed = j.value("master_seed", std::uint64_t{0});
  for (const auto& c : j.at("cells")) {
    Cell cell;
    cell.function = FunctionSpec::from_json(c.at("function").dump());
    const std::size_t n =
        cell.function.weights ? cell.function.weights->size() : cell.function.n;
    if (c.contains("p")) {
      cell.p = c.at("p").get<double>();
    } else if (c.contains("c")) {
      cell.c = c.at("c").get<double>();
      cell.p = *cell.c / static_cast<double>(n);
    } else {
      throw std::invalid_argument("campaign cell: needs p or c");
    }
    cell.mu = c.value("mu", std::size_t{1});
    cell.selector = c.value("selector", std::string("elitist"));
    cell.reps = c.at("reps").get<std::size_t>();
    cell.cap = c.value("cap", std::uint64_t{10'000'000});
    if (cell.reps < 2) throw std::invalid_argument("campaign cell: reps must be >= 2");
    campaign.cells.push_back(cell);
  }
  return campaign;
}

DominanceVerdict dominance_test(std::span<const double> faster_candidate,
                                std::span<const double> slower_candidate,
                                double confidence) {
  if (faster_candidate.empty() || slower_candidate.empty())
    throw std::invalid_argument("dominance_test: samples must be nonempty");
  if (!(confidence > 0.0) || !(confidence < 1.0))
    throw std::invalid_argument("dominance_test: confidence must be in (0, 1)");

  std::vector<double> a(faster_candidate.begin(), faster_candidate.end());
  std::vector<double> b(slower_candidate.begin(), slower_candidate.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const double m = static_cast<double>(std::min(a.size(), b.size()));
  const double eps = std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * m));

  DominanceVerdict verdict;
  verdict.epsilon = eps;
  verdict.min_slack = std::numeric_limits<double>::infinity();
  verdict.pass = true;

  // Walk the pooled sample points; CDF differences attain their extremes there.
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() || ib < b.size()) {
    double t;
    if (ib >= b.size() || (ia < a.size() && a[ia] <= b[ib]))
      t = a[ia];
    else
      t = b[ib];
    while (ia < a.size() && a[ia] <= t) ++ia;
    while (ib < b.size() && b[ib] <= t) ++ib;
    const double cdf_a = static_cast<double>(ia) / static_cast<double>(a.size());
    const double cdf_b = static_cast<double>(ib) / static_cast<double>(b.size());
    const double slack = cdf_a - cdf_b + eps;
    if (slack < verdict.min_slack) {
      verdict.min_slack = slack;
      verdict.worst_t = t;
    }
  }
  verdict.pass = verdict.min_slack >= 0.0;
  return verdict;
}

DominanceVerdict dominance_test_records(std::span<const RunRecord> a,
                                        std::span<const RunRecord> b, double confidence) {
  std::vector<double> ta, tb;
  ta.reserve(a.size());
  tb.reserve(b.size());
  for (const auto& r : a) {
    if (r.capped)
      throw std::invalid_argument("dominance_test: capped runs present (censored data)");
    ta.push_back(static_cast<double>(r.T));
  }
  for (const auto& r : b) {
    if (r.capped)
      throw std::invalid_argument("dominance_test: capped runs present (censored data)");
    tb.push_back(static_cast<double>(r.T));
  }
  return dominance_test(ta, tb, confidence);
}

PScanResult optimal_p_scan(std::size_t n, std::span<const double> c_grid,
                           const FunctionSpec& fn, std::size_t reps,
                           std::uint64_t master_seed, std::size_t jobs,
                           std::uint64_t cap) {
  if (reps < 200) throw std::invalid_argument("optimal_p_scan: reps must be >= 200");
  const bool has_one =
      std::any_of(c_grid.begin(), c_grid.end(), [](double c) { return c == 1.0; });
  if (!has_one) throw std::invalid_argument("optimal_p_scan: c grid must contain 1");

  PScanResult result;
  for (double c : c_grid) {
    Cell cell;
    cell.function = fn;
    cell.function.n = n;
    cell.c = c;
    cell.p = c / static_cast<double>(n);
    cell.reps = reps;
    cell.cap = cap;
    const auto records = run_cell(cell, master_seed, jobs);
    std::vector<double> values;
    values.reserve(records.size());
    for (const auto& r : records) {
      if (r.capped)
        throw std::runtime_error("optimal_p_scan: capped run at c = " + fmt(c, "%.4g"));
      values.push_back(static_cast<double>(r.T));
    }
    const auto s = summarize_values(values);
    result.rows.push_back(PScanRow{c, cell.p, s.mean, s.se});
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.rows.size(); ++i)
    if (result.rows[i].mean < result.rows[best].mean) best = i;
  result.argmin_c = result.rows[best].c;

  // Does the c = 1 cell beat its grid neighbors by more than 2 combined SE?
  std::size_t one = 0;
  for (std::size_t i = 0; i < result.rows.size(); ++i)
    if (result.rows[i].c == 1.0) one = i;
  result.c1_clearly_best = true;
  for (std::size_t j : {one == 0 ? one : one - 1, one + 1}) {
    if (j == one || j >= result.rows.size()) continue;
    const double gap = result.rows[j].mean - result.rows[one].mean;
    const double comb =
        std::sqrt(result.rows[j].se * result.rows[j].se + result.rows[one].se * result.rows[one].se);
    if (!(gap > 2.0 * comb)) result.c1_clearly_best = false;
  }
  return result;
}

std::vector<PhaseRow> phase_transition_scan(std::size_t n, std::span<const double> m_grid,
                                            const FunctionSpec& fn, std::size_t reps,
                                            std::uint64_t cap, std::uint64_t master_seed,
                                            std::size_t jobs) {
  std::vector<PhaseRow> rows;
  for (double m : m_grid) {
    const double p = m * std::log(static_cast<double>(n)) / static_cast<double>(n);
    if (!(p > 0.0) || !(p < 1.0))
      throw std::invalid_argument("phase_transition_scan: multiplier gives p outside (0,1)");
    Cell cell;
    cell.function = fn;
    cell.function.n = n;
    cell.p = p;
    cell.reps = reps;
    cell.cap = cap;
    const auto records = run_cell(cell, master_seed, jobs);

    // Median with capped runs ordered above every finite runtime.
    std::vector<double> values;
    std::size_t capped = 0;
    for (const auto& r : records) {
      if (r.capped) {
        ++capped;
        values.push_back(std::numeric_limits<double>::infinity());
      } else {
        values.push_back(static_cast<double>(r.T));
      }
    }
    std::sort(values.begin(), values.end());
    const double med = quantile_sorted(values, 0.5);
    PhaseRow row;
    row.m = m;
    row.p = p;
    row.capped_frac = static_cast<double>(capped) / static_cast<double>(records.size());
    row.median_capped = std::isinf(med);
    row.median = row.median_capped ? kNaN : med;
    rows.push_back(row);
  }
  return rows;
}

std::vector<DriftBin> drift_trace_estimator(std::span<const RunRecord> records,
                                            double delta_ref, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("drift_trace_estimator: bins must be >= 1");

  // Collect (s_t, s_t - s_{t+1}) pairs from consecutive trajectory entries.
  std::vector<std::pair<double, double>> pairs;
  bool any_trajectory = false;
  for (const auto& rec : records) {
    if (rec.trajectory.empty()) continue;
    any_trajectory = true;
    for (std::size_t k = 0; k + 1 < rec.trajectory.size(); ++k) {
      const auto& cur = rec.trajectory[k];
      const auto& nxt = rec.trajectory[k + 1];
      if (nxt.step != cur.step + 1)
        throw std::invalid_argument(
            "drift_trace_estimator: trajectories must be recorded with thinning 1");
      const double s = std::isnan(cur.potential) ? cur.ones : cur.potential;
      const double s2 = std::isnan(nxt.potential) ? nxt.ones : nxt.potential;
      if (s > 0.0) pairs.emplace_back(s, s - s2);
    }
  }
  if (!any_trajectory)
    throw std::invalid_argument("drift_trace_estimator: no recorded trajectories");
  if (pairs.empty())
    throw std::invalid_argument("drift_trace_estimator: no usable trajectory steps");

  double s_min = std::numeric_limits<double>::infinity();
  double s_max = 0.0;
  for (const auto& [s, d] : pairs) {
    s_min = std::min(s_min, s);
    s_max = std::max(s_max, s);
  }
  if (s_max <= s_min) bins = 1;

  const double log_lo = std::log(s_min);
  const double log_hi = std::log(s_max) + 1e-12;
  const double width = (log_hi - log_lo) / static_cast<double>(bins);

  struct Acc {
    std::size_t count = 0;
    double sum_s = 0.0, sum_d = 0.0, sum_d2 = 0.0;
  };
  std::vector<Acc> acc(bins);
  for (const auto& [s, d] : pairs) {
    auto b = static_cast<std::size_t>((std::log(s) - log_lo) / width);
    if (b >= bins) b = bins - 1;
    acc[b].count += 1;
    acc[b].sum_s += s;
    acc[b].sum_d += d;
    acc[b].sum_d2 += d * d;
  }

  std::vector<DriftBin> out;
  for (std::size_t b = 0; b < bins; ++b) {
    if (acc[b].count < 2) continue;
    DriftBin bin;
    bin.s_lo = std::exp(log_lo + width * static_cast<double>(b));
    bin.s_hi = std::exp(log_lo + width * static_cast<double>(b + 1));
    bin.count = acc[b].count;
    const double cnt = static_cast<double>(acc[b].count);
    bin.s_mean = acc[b].sum_s / cnt;
    bin.delta_mean = acc[b].sum_d / cnt;
    const double var = std::max(0.0, (acc[b].sum_d2 - cnt * bin.delta_mean * bin.delta_mean) /
                                         (cnt - 1.0));
    bin.delta_hat = bin.delta_mean / bin.s_mean;
    bin.se = std::sqrt(var / cnt) / bin.s_mean;
    bin.flagged = bin.delta_hat + 3.0 * bin.se < delta_ref;
    out.push_back(bin);
  }
  return out;
}

}  // namespace ealab
