#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ealab/linear_function.hpp"
#include "ealab/mutation.hpp"
#include "ealab/potentials.hpp"
#include "ealab/rng.hpp"

namespace ealab {

// What to record along a run.  `potential` rebuilds the potential of
// pot_kind from the run's function (alpha used for the adaptive kind), so the
// policy stays serializable.
struct RecordingPolicy {
  enum class Mode { none, ones, potential };
  Mode mode = Mode::none;
  std::size_t thin = 1;  // record every thin-th time step
  PotentialKind pot_kind = PotentialKind::identity;
  double alpha = 2.0;
};

struct TrajectoryPoint {
  std::uint64_t step;  // time index t (mutation steps for the elitist EAs)
  double f;
  double potential;  // NaN unless recording potential values
  std::uint32_t ones;
};

// One replication: which function, mutation probability, population size,
// cap, and the (master seed, replication index) pair that fully determines
// the run.
struct RunConfig {
  FunctionSpec function;
  double p = 0.0;
  std::size_t mu = 1;
  std::uint64_t step_cap = 10'000'000;  // mutation steps before giving up
  std::uint64_t master_seed = 0;
  std::uint64_t replication = 0;
  RecordingPolicy recording;

  std::string to_json() const;
  static RunConfig from_json(const std::string& text);
};

struct RunRecord {
  std::uint64_t T = 0;  // f-evaluations until the first optimal point
  bool capped = false;
  std::uint32_t init_ones = 0;   // ones-count of the best initial point
  std::size_t init_index = 0;    // which initial point was selected (mu EAs)
  std::uint64_t stream_key = 0;  // derived replication key, for reproduction
  std::vector<TrajectoryPoint> trajectory;

  std::string to_jsonl(std::uint64_t rep) const;  // {rep, T, capped, init_ones, seed}
};

// Behavioral interface of the mutation-based EA scheme: picks the parent
// index in [0, t] from the f-values f(x_0..x_t) seen so far.  Rules may use
// only those values (plus their own randomness).
class ParentSelector {
 public:
  virtual ~ParentSelector() = default;
  virtual std::size_t select(std::span<const double> fvalues, SplitMix64& rng) const = 0;
  virtual std::string name() const = 0;
};

std::unique_ptr<ParentSelector> make_best_parent_selector();     // ties -> oldest
std::unique_ptr<ParentSelector> make_uniform_parent_selector();  // uniform over history
std::unique_ptr<ParentSelector> make_parent_selector(const std::string& name);

// Uniform-tie-breaking argmin used by the mu-variant initialization.
std::size_t select_best_index(std::span<const double> fvalues, SplitMix64& rng);

// Elitist EA: uniform random init, then mutate and accept iff not worse.
// Requires cfg.mu == 1; T counts f-evaluations including the initial one.
RunRecord run_oneone_ea(const LinearFunction& f, const RunConfig& cfg);
RunRecord run_oneone_ea(const RunConfig& cfg);

// Elitist EA with mu uniform initial samples: picks an f-minimal one
// (breaking ties uniformly) and proceeds as above.  T counts all mu initial
// evaluations plus one per mutation step.  mu = 1 reduces exactly to
// run_oneone_ea, same stream consumption included.
RunRecord run_oneone_ea_mu(const LinearFunction& f, const RunConfig& cfg);
RunRecord run_oneone_ea_mu(const RunConfig& cfg);

// Mutation-based EA scheme: mu uniform initial points, then repeatedly
// select a parent from the whole history via `selector`, mutate, append.
// Stops at the first optimal history entry or after cfg.step_cap offspring.
// Requires p <= 1/2.
RunRecord run_mutation_based_ea(const LinearFunction& f, const RunConfig& cfg,
                                const ParentSelector& selector);
RunRecord run_mutation_based_ea(const RunConfig& cfg, const ParentSelector& selector);

}  // namespace ealab
