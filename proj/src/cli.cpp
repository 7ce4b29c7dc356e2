#include "ealab/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ealab/drift_bounds.hpp"
#include "ealab/ea_engine.hpp"
#include "ealab/exact_oracles.hpp"
#include "ealab/experiments.hpp"
#include "ealab/potentials.hpp"

namespace ealab::cli {

namespace {

namespace fs = std::filesystem;

struct RunOptions {
  std::string fn = "onemax";
  std::size_t n = 100;
  double p = 0.0;
  double c = 0.0;
  std::uint64_t fn_seed = 0;
  double kappa = 5.0;
  std::size_t mu = 1;
  std::string selector = "elitist";
  std::size_t reps = 100;
  std::uint64_t cap = 10'000'000;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "out";
  std::string record = "none";
  std::string pot = "identity";
  double alpha = 2.0;
  std::size_t thin = 1;
  std::size_t jobs = 0;
};

FunctionSpec make_spec(const RunOptions& opt) {
  FunctionSpec spec;
  spec.kind = family_kind_from_name(opt.fn);
  spec.n = opt.n;
  spec.seed = opt.fn_seed;
  spec.kappa = opt.kappa;
  return spec;
}

int cmd_run(const RunOptions& opt) {
  Cell cell;
  cell.function = make_spec(opt);
  if (opt.p > 0.0 && opt.c > 0.0) {
    std::cerr << "run: give either --p or --c, not both\n";
    return kExitUsage;
  }
  if (opt.c > 0.0) {
    cell.c = opt.c;
    cell.p = opt.c / static_cast<double>(opt.n);
  } else if (opt.p > 0.0) {
    cell.p = opt.p;
  } else {
    cell.p = 1.0 / static_cast<double>(opt.n);
  }
  cell.mu = opt.mu;
  cell.selector = opt.selector;
  cell.reps = opt.reps;
  cell.cap = opt.cap;
  if (opt.record == "ones") {
    cell.recording.mode = RecordingPolicy::Mode::ones;
  } else if (opt.record == "potential") {
    cell.recording.mode = RecordingPolicy::Mode::potential;
    cell.recording.pot_kind = potential_kind_from_name(opt.pot);
    cell.recording.alpha = opt.alpha;
  } else if (opt.record != "none") {
    std::cerr << "run: unknown --record mode " << opt.record << "\n";
    return kExitUsage;
  }
  cell.recording.thin = opt.thin;

  Campaign campaign;
  campaign.master_seed = opt.seed;
  campaign.cells.push_back(cell);
  const auto summaries = run_campaign(campaign, opt.out, opt.jobs, &std::cerr);
  std::cout << summaries_csv_header() << '\n';
  for (const auto& s : summaries) std::cout << summary_csv_row(s) << '\n';
  return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out, std::size_t jobs,
              std::uint64_t seed, bool seed_given) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "sweep: cannot open " << config_path << "\n";
    return kExitIo;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  Campaign campaign = Campaign::from_json(buf.str());
  if (seed_given) campaign.master_seed = seed;  // flag overrides config file
  const auto summaries = run_campaign(campaign, out, jobs, &std::cerr);
  std::cout << summaries_csv_header() << '\n';
  for (const auto& s : summaries) std::cout << summary_csv_row(s) << '\n';
  return kExitOk;
}

int cmd_bounds(std::size_t n, double p, double alpha, double t, bool json) {
  const double a = alpha > 0.0 ? alpha : default_alpha(n);
  const auto table = bound_report_table(n, p, a, t);
  std::cout << (json ? bound_table_to_json(table) : bound_table_to_text(table));
  if (json) std::cout << '\n';
  return kExitOk;
}

int cmd_exact(const std::string& what, std::size_t n, double p, std::size_t i,
              const std::string& out_path) {
  std::ostringstream os;
  if (what == "chain") {
    const auto chain = solve_onemax_chain(n, p);
    os << "i,expected_steps,one_step_drift\n";
    for (std::size_t s = 0; s <= n; ++s)
      os << s << ',' << std::setprecision(17) << chain.expected_steps[s] << ','
         << chain.one_step_drift(s) << '\n';
    os << "# uniform_start_steps," << std::setprecision(17) << chain.uniform_start_steps
       << "\n# uniform_start_evals," << chain.uniform_start_evals << '\n';
  } else if (what == "dist") {
    const auto dist = exact_mutation_ones_distribution(i, n, p);
    os << "j,prob,cdf\n";
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      acc += dist.probs[j];
      os << j << ',' << std::setprecision(17) << dist.probs[j] << ',' << acc << '\n';
    }
  } else {
    std::cerr << "exact: unknown --what " << what << " (chain|dist)\n";
    return kExitUsage;
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) {
      std::cerr << "exact: cannot open " << out_path << "\n";
      return kExitIo;
    }
    out << os.str();
  }
  return kExitOk;
}

int cmd_verify(std::size_t nmax, std::size_t samples, std::uint64_t seed) {
  bool all_ok = true;

  // Mutation ones-count CDF monotonicity, exact, n <= 20.
  {
    bool ok = true;
    for (std::size_t n = 1; n <= 20 && ok; ++n) {
      for (int pi = 1; pi <= 10 && ok; ++pi) {
        const double p = 0.05 * pi;
        const auto report = check_mutation_cdf_monotonicity(n, p);
        if (!report.pass) {
          ok = false;
          const auto& v = *report.violation;
          std::cout << "cdf-monotonicity: VIOLATED at n=" << n << " p=" << p
                    << " (i_a=" << v.i_a << ", i_b=" << v.i_b << ", j=" << v.j << ")\n";
        }
      }
    }
    if (ok) std::cout << "cdf-monotonicity: ok (n <= 20, p in {0.05..0.5})\n";
    all_ok = all_ok && ok;
  }

  // Adaptive potential drift condition, exact enumeration.
  {
    bool ok = true;
    SplitMix64 seeder(detail::mix64(seed));
    for (std::size_t n = 4; n <= nmax && ok; ++n) {
      const std::vector<FunctionSpec> fns = [&] {
        std::vector<FunctionSpec> v;
        FunctionSpec s;
        s.n = n;
        s.kind = FamilyKind::onemax;
        v.push_back(s);
        if (n <= kBinValMaxBits) {
          s.kind = FamilyKind::binval;
          v.push_back(s);
        }
        s.kind = FamilyKind::random_uniform;
        s.seed = seeder.next_u64();
        v.push_back(s);
        s.kind = FamilyKind::random_exponential;
        s.seed = seeder.next_u64();
        v.push_back(s);
        return v;
      }();
      for (const auto& spec : fns) {
        const LinearFunction f = resolve(spec);
        for (double p : {1.0 / static_cast<double>(n), 2.0 / static_cast<double>(n), 0.3}) {
          const auto rep =
              verify_drift_condition(f, PotentialKind::adaptive, p, 2.0, samples, seed);
          if (!rep.pass) {
            ok = false;
            std::cout << "adaptive-drift-condition: VIOLATED at n=" << n << " p=" << p
                      << " fn=" << spec.label() << " point="
                      << rep.violating_point->to_msb_string() << " drift="
                      << rep.violating_drift << " bound=" << rep.violating_bound << "\n";
          }
        }
      }
    }
    if (ok)
      std::cout << "adaptive-drift-condition: ok (alpha=2, n in 4.." << nmax
                << ", p in {1/n, 2/n, 0.3})\n";
    all_ok = all_ok && ok;
  }

  // Refined potential drift condition at p = 1/n.
  {
    bool ok = true;
    SplitMix64 seeder(detail::mix64(seed ^ 0x7265ULL));
    for (std::size_t n = 4; n <= nmax && ok; ++n) {
      std::vector<FunctionSpec> fns;
      FunctionSpec s;
      s.n = n;
      s.kind = FamilyKind::onemax;
      fns.push_back(s);
      if (n <= kBinValMaxBits) {
        s.kind = FamilyKind::binval;
        fns.push_back(s);
      }
      s.kind = FamilyKind::random_exponential;
      s.seed = seeder.next_u64();
      fns.push_back(s);
      for (const auto& spec : fns) {
        const LinearFunction f = resolve(spec);
        const auto rep = verify_drift_condition(f, PotentialKind::refined,
                                                1.0 / static_cast<double>(n), 0.0, samples,
                                                seed);
        if (!rep.pass) {
          ok = false;
          std::cout << "refined-drift-condition: VIOLATED at n=" << n
                    << " fn=" << spec.label() << " point="
                    << rep.violating_point->to_msb_string() << " drift="
                    << rep.violating_drift << " bound=" << rep.violating_bound << "\n";
        }
      }
    }
    if (ok) std::cout << "refined-drift-condition: ok (p=1/n, n in 4.." << nmax << ")\n";
    all_ok = all_ok && ok;
  }

  // OneMax one-step drift dominance, exhaustive.
  {
    std::vector<double> p_grid;
    for (int k = 1; k <= 50; ++k) p_grid.push_back(0.01 * k);
    const auto scan = scan_onemax_drift_dominance(30, p_grid);
    if (scan.pass) {
      std::cout << "onemax-drift-dominance: ok (" << scan.checked
                << " states, min margin " << scan.min_margin << ")\n";
    } else {
      std::cout << "onemax-drift-dominance: VIOLATED at i=" << scan.violation->i_a
                << " n=" << scan.violation->i_b << " p=" << scan.violation_p << "\n";
    }
    all_ok = all_ok && scan.pass;
  }

  return all_ok ? kExitOk : kExitVerification;
}

int cmd_report(const std::string& dir, const std::string& config_path) {
  const fs::path outdir = dir;
  fs::path cfg = config_path.empty() ? outdir / "campaign.json" : fs::path(config_path);
  std::ifstream in(cfg);
  if (!in) {
    std::cerr << "report: cannot open " << cfg.string() << "\n";
    return kExitIo;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const Campaign campaign = Campaign::from_json(buf.str());
  const auto summaries = rebuild_summaries(campaign, outdir);
  write_summaries_csv(outdir / "summaries.csv", summaries);
  write_report_md(outdir / "report.md", summaries);
  std::cout << summaries_csv_header() << '\n';
  for (const auto& s : summaries) std::cout << summary_csv_row(s) << '\n';
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"Runtime-analysis laboratory for mutation-based EAs on linear functions"};
  app.require_subcommand(1);

  RunOptions run_opt;
  auto* run = app.add_subcommand("run", "Run one experiment cell and summarize it");
  run->add_option("--fn", run_opt.fn,
                  "Function family: onemax|binval|random-uniform|random-exponential");
  run->add_option("--n", run_opt.n, "Dimension")->check(CLI::PositiveNumber);
  run->add_option("--p", run_opt.p, "Mutation probability");
  run->add_option("--c", run_opt.c, "Mutation probability as c/n");
  run->add_option("--fn-seed", run_opt.fn_seed, "Seed for random weight families");
  run->add_option("--kappa", run_opt.kappa, "Exponent of the random-exponential family");
  run->add_option("--mu", run_opt.mu, "Population size");
  run->add_option("--selector", run_opt.selector,
                  "elitist (default) | best | uniform (mutation-based scheme)");
  run->add_option("--reps", run_opt.reps, "Replications")->check(CLI::PositiveNumber);
  run->add_option("--cap", run_opt.cap, "Mutation step cap");
  run->add_option("--seed", run_opt.seed, "Master seed (default 1234567)");
  run->add_option("--out", run_opt.out, "Output directory");
  run->add_option("--record", run_opt.record, "Trajectory recording: none|ones|potential");
  run->add_option("--pot", run_opt.pot, "Recorded potential: identity|adaptive|refined");
  run->add_option("--alpha", run_opt.alpha, "Alpha of the adaptive potential");
  run->add_option("--thin", run_opt.thin, "Trajectory thinning interval");
  run->add_option("--jobs", run_opt.jobs, "Worker threads (0 = available cores)");

  std::string sweep_config;
  std::string sweep_out = "out";
  std::size_t sweep_jobs = 0;
  std::uint64_t sweep_seed = kDefaultSeed;
  auto* sweep = app.add_subcommand("sweep", "Run a campaign file");
  sweep->add_option("--config", sweep_config, "Campaign JSON file")->required();
  sweep->add_option("--out", sweep_out, "Output directory");
  sweep->add_option("--jobs", sweep_jobs, "Worker threads (0 = available cores)");
  auto* sweep_seed_opt =
      sweep->add_option("--seed", sweep_seed, "Master seed override (else from config)");

  std::size_t bounds_n = 100;
  double bounds_p = 0.01;
  double bounds_alpha = 0.0;
  double bounds_t = 1.0;
  bool bounds_json = false;
  auto* bounds = app.add_subcommand("bounds", "Print the closed-form bound table");
  bounds->add_option("--n", bounds_n, "Dimension")->check(CLI::PositiveNumber);
  bounds->add_option("--p", bounds_p, "Mutation probability");
  bounds->add_option("--alpha", bounds_alpha, "Alpha (default max(ln ln n, 1+1e-6))");
  bounds->add_option("--t", bounds_t, "Tail parameter");
  bounds->add_flag("--json", bounds_json, "Emit JSON instead of aligned text");

  std::string exact_what = "chain";
  std::size_t exact_n = 20;
  double exact_p = 0.05;
  std::size_t exact_i = 0;
  std::string exact_out;
  auto* exact = app.add_subcommand("exact", "Emit exact oracle tables as CSV");
  exact->add_option("--what", exact_what, "chain (hitting times) | dist (ones-count law)");
  exact->add_option("--n", exact_n, "Dimension")->check(CLI::PositiveNumber);
  exact->add_option("--p", exact_p, "Mutation probability");
  exact->add_option("--i", exact_i, "Source ones-count for --what dist");
  exact->add_option("--out", exact_out, "Output file (default stdout)");

  std::size_t verify_nmax = 12;
  std::size_t verify_samples = 20;
  std::uint64_t verify_seed = kDefaultSeed;
  auto* verify = app.add_subcommand(
      "verify", "Run the exact verification suite; nonzero exit on any violation");
  verify->add_option("--nmax", verify_nmax, "Largest dimension for drift enumeration")
      ->check(CLI::Range(std::size_t{4}, std::size_t{16}));
  verify->add_option("--samples", verify_samples, "Random points per drift check");
  verify->add_option("--seed", verify_seed, "Seed for sampled points and functions");

  std::string report_dir = "out";
  std::string report_config;
  auto* report = app.add_subcommand("report", "Rebuild summaries from JSONL records");
  report->add_option("--dir", report_dir, "Campaign output directory");
  report->add_option("--config", report_config,
                     "Campaign JSON (default <dir>/campaign.json)");

  std::vector<const char*> argv;
  argv.push_back("ealab");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_opt);
    if (sweep->parsed())
      return cmd_sweep(sweep_config, sweep_out, sweep_jobs, sweep_seed,
                       sweep_seed_opt->count() > 0);
    if (bounds->parsed())
      return cmd_bounds(bounds_n, bounds_p, bounds_alpha, bounds_t, bounds_json);
    if (exact->parsed())
      return cmd_exact(exact_what, exact_n, exact_p, exact_i, exact_out);
    if (verify->parsed()) return cmd_verify(verify_nmax, verify_samples, verify_seed);
    if (report->parsed()) return cmd_report(report_dir, report_config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace ealab::cli
