#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rmx/adversary.hpp"
#include "rmx/trace.hpp"

namespace rmx {

// Conjunction of (possibly negated) named atoms, e.g.
// "wins(i=1,k=2) & !new_values(k=2)". Known atoms: true, false, wins(i,k),
// participates(i,k), pcount(k,m), new_values(k), unique_max(k),
// round_complete(k), rnum_differs(k,j), rnum_equal(k,j), prefix.
// k may be @target, resolved from the trace mark "target_round".
struct PredicateAtom {
  bool negated = false;
  std::string name;
  std::map<std::string, std::string> args;
};

struct Predicate {
  std::vector<PredicateAtom> atoms;
  std::string source;
};

Predicate parse_predicate(const std::string& text);

struct AdversarySpec {
  std::string name;
  std::map<std::string, std::string> args;
};

struct ExperimentSpec {
  ProtocolParams params;
  AdversarySpec adversary;
  // Overrides the catalog factory when set (receives the per-trial seed).
  std::function<std::unique_ptr<Adversary>(uint64_t)> adversary_factory;
  long horizon = 10000;
  Predicate condition = parse_predicate("true");
  Predicate target = parse_predicate("true");
  Run prefix_pattern;  // consumed by the "prefix" atom
  long trials = 10000;
  uint64_t seed = 1;
  enum class Mode { MonteCarlo, Exact } mode = Mode::MonteCarlo;
  uint64_t max_leaves = 4000000;
  // Exact mode only: cut each path once this many rounds have completed
  // (sound for events measurable by then; 0 = off).
  int stop_after_rounds = 0;

  std::unique_ptr<Adversary> build_adversary(uint64_t adv_seed) const;
};

bool eval_predicate(const Predicate& p, const ExperimentSpec& spec, const ExecutionTrace& t,
                    const RoundsCache& rc);

struct EstimateResult {
  bool defined = false;  // false when no trial satisfied the condition
  double estimate = 0;
  double ci_lo = 0;  // Wilson 95%
  double ci_hi = 0;
  long trials = 0;
  long accepted = 0;
  long target_hits = 0;
  long horizon_exhausted = 0;
  uint64_t seed = 0;

  double standard_error() const;
};

struct ExactResult {
  bool defined = false;  // false when the conditioning mass is zero
  Rat probability;
  uint64_t leaves = 0;
  Rat cond_mass;
  Rat total_mass;
};

ExecutionTrace run_trial(const ProtocolParams& params, Adversary& adv, long horizon,
                         uint64_t seed);

// Rejection sampling over `trials` independent trials with per-trial seeds
// derived from the master seed by index; results do not depend on workers.
EstimateResult estimate(const ExperimentSpec& spec, int workers = 1);

using LeafHook =
    std::function<void(const ExecutionTrace& leaf, const Rat& mass, bool cond, bool target)>;

// Depth-first expansion of the execution tree. Lottery draws branch over the
// value domain with exact masses; round-number draws branch over the live
// equality pattern (each stored value at 1/r, one fresh symbol at (r-d)/r).
ExactResult enumerate_exact(const ExperimentSpec& spec, const LeafHook& hook = {});

struct Comparison {
  EstimateResult a;
  EstimateResult b;
  double ratio = 0;  // a.estimate / b.estimate
  double z = 0;      // two-proportion z statistic
};
Comparison compare_adversaries(const ExperimentSpec& a, const ExperimentSpec& b,
                               int workers = 1);

}  // namespace rmx
