#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ealab/cli.hpp"

using ealab::cli::dispatch;
namespace fs = std::filesystem;

namespace {

struct CaptureStdout {
  std::ostringstream captured;
  std::streambuf* saved;
  CaptureStdout() : saved(std::cout.rdbuf(captured.rdbuf())) {}
  ~CaptureStdout() { std::cout.rdbuf(saved); }
  std::string str() const { return captured.str(); }
};

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ealab_cli_" + name);
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

}  // namespace

TEST_CASE("bounds subcommand prints the table") {
  CaptureStdout cap;
  const int rc =
      dispatch({"bounds", "--n", "100", "--p", "0.01", "--alpha", "2", "--t", "1"});
  CHECK(rc == ealab::cli::kExitOk);
  const auto out = cap.str();
  CHECK(out.find("5419.9") != std::string::npos);  // general bound b(1), approx 5420
  CHECK(out.find("1795.4") != std::string::npos);  // refined expectation bound
}

TEST_CASE("bounds subcommand emits JSON on request") {
  CaptureStdout cap;
  CHECK(dispatch({"bounds", "--n", "50", "--p", "0.02", "--json"}) == ealab::cli::kExitOk);
  CHECK(cap.str().find("\"general-upper-b(1)\"") != std::string::npos);
}

TEST_CASE("exact subcommand emits chain CSV") {
  CaptureStdout cap;
  CHECK(dispatch({"exact", "--what", "chain", "--n", "1", "--p", "0.5"}) ==
        ealab::cli::kExitOk);
  const auto out = cap.str();
  CHECK(out.find("i,expected_steps") != std::string::npos);
  CHECK(out.find("1,2,") != std::string::npos);  // E_1 = 2 at n=1, p=1/2
}

TEST_CASE("exact subcommand emits ones-count distribution CSV") {
  CaptureStdout cap;
  CHECK(dispatch({"exact", "--what", "dist", "--n", "2", "--p", "0.5", "--i", "1"}) ==
        ealab::cli::kExitOk);
  CHECK(cap.str().find("0,0.25,0.25") != std::string::npos);
}

TEST_CASE("verify subcommand passes at a small nmax") {
  CaptureStdout cap;
  CHECK(dispatch({"verify", "--nmax", "6", "--samples", "8"}) == ealab::cli::kExitOk);
  const auto out = cap.str();
  CHECK(out.find("cdf-monotonicity: ok") != std::string::npos);
  CHECK(out.find("adaptive-drift-condition: ok") != std::string::npos);
  CHECK(out.find("refined-drift-condition: ok") != std::string::npos);
  CHECK(out.find("onemax-drift-dominance: ok") != std::string::npos);
}

TEST_CASE("run subcommand is idempotent given a seed") {
  const auto dir1 = fresh_dir("run1");
  const auto dir2 = fresh_dir("run2");
  const std::vector<std::string> base{"run",    "--fn",   "onemax", "--n",  "15",
                                      "--p",    "0.07",   "--reps", "12",   "--seed",
                                      "321",    "--out",  ""};
  auto args1 = base;
  args1.back() = dir1.string();
  auto args2 = base;
  args2.back() = dir2.string();
  {
    CaptureStdout cap;
    CHECK(dispatch(args1) == ealab::cli::kExitOk);
  }
  {
    CaptureStdout cap;
    CHECK(dispatch(args2) == ealab::cli::kExitOk);
  }
  // identical record bytes, and the effective campaign config is echoed
  std::string rec1, rec2;
  for (const auto& entry : fs::directory_iterator(dir1))
    if (entry.path().extension() == ".jsonl") rec1 = slurp(entry.path());
  for (const auto& entry : fs::directory_iterator(dir2))
    if (entry.path().extension() == ".jsonl") rec2 = slurp(entry.path());
  CHECK(!rec1.empty());
  CHECK(rec1 == rec2);
  CHECK(fs::exists(dir1 / "campaign.json"));
  CHECK(fs::exists(dir1 / "summaries.csv"));
  CHECK(fs::exists(dir1 / "report.md"));
}

TEST_CASE("sweep and report work against a campaign file") {
  const auto dir = fresh_dir("sweep");
  const auto config = dir / "c.json";
  {
    std::ofstream out(config);
    out << R"({"master_seed": 5, "cells": [
      {"function": {"kind": "onemax", "n": 12, "seed": 0}, "c": 1.0, "reps": 8}
    ]})";
  }
  const auto outdir = dir / "out";
  {
    CaptureStdout cap;
    CHECK(dispatch({"sweep", "--config", config.string(), "--out", outdir.string()}) ==
          ealab::cli::kExitOk);
  }
  const auto csv_before = slurp(outdir / "summaries.csv");
  {
    CaptureStdout cap;
    CHECK(dispatch({"report", "--dir", outdir.string()}) == ealab::cli::kExitOk);
    CHECK(cap.str().find("onemax") != std::string::npos);
  }
  CHECK(slurp(outdir / "summaries.csv") == csv_before);
}

TEST_CASE("report on truncated JSONL fails with an I/O status") {
  const auto dir = fresh_dir("badreport");
  {
    std::ofstream out(dir / "campaign.json");
    out << R"({"master_seed": 5, "cells": [
      {"function": {"kind": "onemax", "n": 12, "seed": 0}, "c": 1.0, "reps": 2}
    ]})";
  }
  {
    std::ofstream out(dir / "records_onemax_n12_p0.0833333_mu1_elitist.jsonl");
    out << R"({"rep":0,"T":5,"capped":false,"init_ones":2,"seed":1})" << "\n";
    out << R"({"rep":1,"T":7,"cappe)";
  }
  CHECK(dispatch({"report", "--dir", dir.string()}) == ealab::cli::kExitIo);
}

TEST_CASE("usage errors exit with status 1") {
  CHECK(dispatch({"bounds", "--no-such-flag"}) == ealab::cli::kExitUsage);
  CHECK(dispatch({"nonsense"}) == ealab::cli::kExitUsage);
  CHECK(dispatch({}) == ealab::cli::kExitUsage);
  CHECK(dispatch({"sweep", "--config", "/nonexistent/file.json"}) == ealab::cli::kExitIo);
  // semantic errors in values are usage errors too
  CHECK(dispatch({"exact", "--what", "chain", "--n", "10", "--p", "1.5"}) ==
        ealab::cli::kExitUsage);
}

TEST_CASE("--help succeeds and lists the subcommands") {
  CaptureStdout cap;
  CHECK(dispatch({"--help"}) == ealab::cli::kExitOk);
  const auto out = cap.str();
  for (const char* sub : {"run", "sweep", "bounds", "exact", "verify", "report"})
    CHECK(out.find(sub) != std::string::npos);
}
