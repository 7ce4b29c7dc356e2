#include "ealab/ea_engine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "ealab/exact_sum.hpp"

namespace ealab {

namespace {

const char* recording_mode_name(RecordingPolicy::Mode m) {
  switch (m) {
    case RecordingPolicy::Mode::none: return "none";
    case RecordingPolicy::Mode::ones: return "ones";
    case RecordingPolicy::Mode::potential: return "potential";
  }
  throw std::logic_error("bad recording mode");
}

RecordingPolicy::Mode recording_mode_from_name(const std::string& s) {
  if (s == "none") return RecordingPolicy::Mode::none;
  if (s == "ones") return RecordingPolicy::Mode::ones;
  if (s == "potential") return RecordingPolicy::Mode::potential;
  throw std::invalid_argument("unknown recording mode: " + s);
}

void validate_common(const RunConfig& cfg) {
  if (cfg.mu < 1) throw std::invalid_argument("RunConfig: mu must be >= 1");
  if (cfg.step_cap < 1) throw std::invalid_argument("RunConfig: step_cap must be >= 1");
  if (cfg.recording.thin < 1)
    throw std::invalid_argument("RunConfig: recording thin must be >= 1");
  if (!(cfg.p > 0.0) || !(cfg.p < 1.0))
    throw std::invalid_argument("RunConfig: p must be in (0, 1)");
}

// Mutable search-point state with incremental f/potential updates.
struct SearchState {
  std::vector<std::uint8_t> bits;
  std::size_t ones = 0;
  double f = 0.0;
  double g = 0.0;

  void init_random(std::size_t n, SplitMix64& rng, const LinearFunction& fn,
                   const double* gw) {
    bits.assign(n, 0);
    ones = 0;
    f = 0.0;
    g = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (rng.next_bit()) {
        bits[k] = 1;
        ++ones;
        f += fn.weight(k);
        if (gw) g += gw[k];
      }
    }
  }
};

Potential build_recording_potential(const RecordingPolicy& rec, const LinearFunction& f,
                                    double p) {
  switch (rec.pot_kind) {
    case PotentialKind::identity: return identity_potential(f.n());
    case PotentialKind::adaptive: return build_adaptive_potential(f, p, rec.alpha);
    case PotentialKind::refined: return build_refined_potential(f);
  }
  throw std::logic_error("bad potential kind");
}

void record_point(std::vector<TrajectoryPoint>& traj, const RecordingPolicy& rec,
                  std::uint64_t step, const SearchState& s, bool with_potential) {
  if (rec.mode == RecordingPolicy::Mode::none) return;
  if (step % rec.thin != 0) return;
  traj.push_back(TrajectoryPoint{
      step, s.f,
      with_potential ? s.g : std::numeric_limits<double>::quiet_NaN(),
      static_cast<std::uint32_t>(s.ones)});
}

}  // namespace

std::size_t select_best_index(std::span<const double> fvalues, SplitMix64& rng) {
  if (fvalues.empty()) throw std::invalid_argument("select_best_index: empty input");
  std::size_t best = 0;
  std::size_t tie_count = 1;
  for (std::size_t i = 1; i < fvalues.size(); ++i) {
    if (fvalues[i] < fvalues[best]) {
      best = i;
      tie_count = 1;
    } else if (fvalues[i] == fvalues[best]) {
      // Reservoir draw keeps the selection uniform over all ties.
      ++tie_count;
      if (rng.next_below(tie_count) == 0) best = i;
    }
  }
  return best;
}

RunRecord run_oneone_ea_mu(const LinearFunction& fn, const RunConfig& cfg) {
  validate_common(cfg);
  const std::size_t n = fn.n();
  if (cfg.function.n != 0 && cfg.function.n != n && !cfg.function.weights)
    throw std::invalid_argument("run: function spec dimension mismatch");

  const bool with_pot = cfg.recording.mode == RecordingPolicy::Mode::potential;
  Potential pot;
  const double* gw = nullptr;
  if (with_pot) {
    pot = build_recording_potential(cfg.recording, fn, cfg.p);
    gw = pot.g.data();
  }

  RunRecord rec;
  rec.stream_key = replication_key(cfg.master_seed, cfg.replication);

  // Initialization phase, all from stream 0: mu uniform points, then an
  // f-minimal one with uniform tie-breaking (reservoir, so mu = 1 consumes
  // exactly the bits of one point).
  SplitMix64 init_rng = stream_for(cfg.master_seed, cfg.replication, 0);
  SearchState cur;
  SearchState cand;
  std::size_t best_index = 0;
  std::size_t tie_count = 1;
  std::size_t first_opt = cfg.mu;  // index of first optimal init, if any
  for (std::size_t i = 0; i < cfg.mu; ++i) {
    cand.init_random(n, init_rng, fn, gw);
    if (cand.ones == 0 && first_opt == cfg.mu) first_opt = i;
    if (i == 0) {
      cur = cand;
      best_index = 0;
      tie_count = 1;
    } else if (cand.f < cur.f) {
      cur = cand;
      best_index = i;
      tie_count = 1;
    } else if (cand.f == cur.f) {
      ++tie_count;
      if (init_rng.next_below(tie_count) == 0) {
        cur = cand;
        best_index = i;
      }
    }
  }
  rec.init_ones = static_cast<std::uint32_t>(cur.ones);
  rec.init_index = best_index;

  if (first_opt < cfg.mu) {
    // An optimal point appeared among the initial samples; it was evaluated
    // at position first_opt.
    rec.T = first_opt + 1;
    record_point(rec.trajectory, cfg.recording, 0, cur, with_pot);
    return rec;
  }

  record_point(rec.trajectory, cfg.recording, 0, cur, with_pot);

  const MutationParams params(n, cfg.p);
  std::vector<std::uint32_t> flips;
  flips.reserve(64);
  std::vector<double> terms;
  terms.reserve(64);
  std::uint64_t evals = cfg.mu;
  for (std::uint64_t step = 1; step <= cfg.step_cap; ++step) {
    SplitMix64 rng = stream_for(cfg.master_seed, cfg.replication, step);
    params.sample_flips(rng, flips);
    ++evals;

    // Accept iff f(x') <= f(x), decided on the exact sign of the weight
    // difference so that near-tie comparisons survive extreme weight spreads.
    terms.clear();
    double df = 0.0;
    double abs_sum = 0.0;
    for (auto posn : flips) {
      const double w = fn.weight(posn);
      const double term = cur.bits[posn] ? -w : w;
      terms.push_back(term);
      df += term;
      abs_sum += w;
    }

    if (sum_sign_filtered(terms, df, abs_sum) <= 0) {
      double dg = 0.0;
      std::ptrdiff_t dones = 0;
      for (auto posn : flips) {
        if (cur.bits[posn]) {
          --dones;
          if (gw) dg -= gw[posn];
        } else {
          ++dones;
          if (gw) dg += gw[posn];
        }
        cur.bits[posn] ^= 1;
      }
      cur.ones = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(cur.ones) + dones);
      cur.f += df;
      cur.g += dg;
    }

    record_point(rec.trajectory, cfg.recording, step, cur, with_pot);
    if (cur.ones == 0) {
      rec.T = evals;
      return rec;
    }
  }
  rec.T = evals;
  rec.capped = true;
  return rec;
}

RunRecord run_oneone_ea(const LinearFunction& fn, const RunConfig& cfg) {
  if (cfg.mu != 1) throw std::invalid_argument("run_oneone_ea: requires mu == 1");
  return run_oneone_ea_mu(fn, cfg);
}

RunRecord run_oneone_ea(const RunConfig& cfg) {
  return run_oneone_ea(resolve(cfg.function), cfg);
}

RunRecord run_oneone_ea_mu(const RunConfig& cfg) {
  return run_oneone_ea_mu(resolve(cfg.function), cfg);
}

RunRecord run_mutation_based_ea(const LinearFunction& fn, const RunConfig& cfg,
                                const ParentSelector& selector) {
  validate_common(cfg);
  if (cfg.p > 0.5)
    throw std::invalid_argument("run_mutation_based_ea: the scheme requires p <= 1/2");
  const std::size_t n = fn.n();

  const bool with_pot = cfg.recording.mode == RecordingPolicy::Mode::potential;
  Potential pot;
  const double* gw = nullptr;
  if (with_pot) {
    pot = build_recording_potential(cfg.recording, fn, cfg.p);
    gw = pot.g.data();
  }

  RunRecord rec;
  rec.stream_key = replication_key(cfg.master_seed, cfg.replication);

  std::vector<std::vector<std::uint8_t>> history;
  std::vector<double> fvalues;
  history.reserve(cfg.mu);
  fvalues.reserve(cfg.mu);

  SplitMix64 init_rng = stream_for(cfg.master_seed, cfg.replication, 0);
  SearchState tmp;
  double best_f = std::numeric_limits<double>::infinity();
  std::size_t best_index = 0;
  for (std::size_t t = 0; t < cfg.mu; ++t) {
    tmp.init_random(n, init_rng, fn, gw);
    history.push_back(tmp.bits);
    fvalues.push_back(tmp.f);
    record_point(rec.trajectory, cfg.recording, t, tmp, with_pot);
    if (tmp.f < best_f) {
      best_f = tmp.f;
      best_index = t;
      rec.init_ones = static_cast<std::uint32_t>(tmp.ones);
    }
    if (tmp.ones == 0) {
      rec.T = t + 1;
      rec.init_index = t;
      return rec;
    }
  }
  rec.init_index = best_index;

  const MutationParams params(n, cfg.p);
  std::vector<std::uint32_t> flips;
  for (std::uint64_t step = 1; step <= cfg.step_cap; ++step) {
    const std::uint64_t t = cfg.mu - 1 + step;  // index of the point being created
    SplitMix64 rng = stream_for(cfg.master_seed, cfg.replication, step);
    const std::size_t parent = selector.select(fvalues, rng);
    if (parent >= fvalues.size())
      throw std::out_of_range("run_mutation_based_ea: selector returned index " +
                              std::to_string(parent) + " with history size " +
                              std::to_string(fvalues.size()));

    params.sample_flips(rng, flips);
    std::vector<std::uint8_t> child = history[parent];
    for (auto posn : flips) child[posn] ^= 1;

    tmp.bits = std::move(child);
    tmp.ones = 0;
    tmp.f = 0.0;
    tmp.g = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (tmp.bits[k]) {
        ++tmp.ones;
        tmp.f += fn.weight(k);
        if (gw) tmp.g += gw[k];
      }
    }
    history.push_back(tmp.bits);
    fvalues.push_back(tmp.f);
    record_point(rec.trajectory, cfg.recording, t, tmp, with_pot);
    if (tmp.ones == 0) {
      rec.T = t + 1;  // one evaluation per history entry
      return rec;
    }
  }
  rec.T = cfg.mu + cfg.step_cap;
  rec.capped = true;
  return rec;
}

RunRecord run_mutation_based_ea(const RunConfig& cfg, const ParentSelector& selector) {
  return run_mutation_based_ea(resolve(cfg.function), cfg, selector);
}

namespace {

class BestParentSelector final : public ParentSelector {
 public:
  std::size_t select(std::span<const double> fvalues, SplitMix64&) const override {
    std::size_t best = 0;
    for (std::size_t i = 1; i < fvalues.size(); ++i)
      if (fvalues[i] < fvalues[best]) best = i;  // ties stay with the oldest
    return best;
  }
  std::string name() const override { return "best"; }
};

class UniformParentSelector final : public ParentSelector {
 public:
  std::size_t select(std::span<const double> fvalues, SplitMix64& rng) const override {
    return static_cast<std::size_t>(rng.next_below(fvalues.size()));
  }
  std::string name() const override { return "uniform"; }
};

}  // namespace

std::unique_ptr<ParentSelector> make_best_parent_selector() {
  return std::make_unique<BestParentSelector>();
}

std::unique_ptr<ParentSelector> make_uniform_parent_selector() {
  return std::make_unique<UniformParentSelector>();
}

std::unique_ptr<ParentSelector> make_parent_selector(const std::string& name) {
  if (name == "best") return make_best_parent_selector();
  if (name == "uniform") return make_uniform_parent_selector();
  throw std::invalid_argument("unknown parent selector: " + name);
}

std::string RunConfig::to_json() const {
  nlohmann::json j;
  j["function"] = nlohmann::json::parse(function.to_json());
  j["p"] = p;
  j["mu"] = mu;
  j["step_cap"] = step_cap;
  j["master_seed"] = master_seed;
  j["replication"] = replication;
  j["recording"]["mode"] = recording_mode_name(recording.mode);
  j["recording"]["thin"] = recording.thin;
  if (recording.mode == RecordingPolicy::Mode::potential) {
    j["recording"]["potential"] = potential_kind_name(recording.pot_kind);
    j["recording"]["alpha"] = recording.alpha;
  }
  return j.dump();
}

RunConfig RunConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  RunConfig cfg;
  cfg.function = FunctionSpec::from_json(j.at("function").dump());
  cfg.p = j.at("p").get<double>();
  cfg.mu = j.value("mu", std::size_t{1});
  cfg.step_cap = j.value("step_cap", std::uint64_t{10'000'000});
  cfg.master_seed = j.value("master_seed", std::uint64_t{0});
  cfg.replication = j.value("replication", std::uint64_t{0});
  if (j.contains("recording")) {
    const auto& r = j.at("recording");
    cfg.recording.mode = recording_mode_from_name(r.value("mode", std::string("none")));
    cfg.recording.thin = r.value("thin", std::size_t{1});
    if (r.contains("potential"))
      cfg.recording.pot_kind = potential_kind_from_name(r.at("potential").get<std::string>());
    cfg.recording.alpha = r.value("alpha", 2.0);
  }
  return cfg;
}

std::string RunRecord::to_jsonl(std::uint64_t rep) const {
  nlohmann::json j;
  j["rep"] = rep;
  j["T"] = T;
  j["capped"] = capped;
  j["init_ones"] = init_ones;
  j["seed"] = stream_key;
  return j.dump();
}

}  // namespace ealab
