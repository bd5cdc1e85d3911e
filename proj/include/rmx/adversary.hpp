#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rmx/trace.hpp"

namespace rmx {

struct Decision {
  bool halt = false;
  int pid = 0;
};

// A scheduling policy over visible runs only. Admissibility is structural:
// next() sees nothing but the run (plus the adversary's own state and seed).
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual Decision next(const Run& run) = 0;
  virtual std::unique_ptr<Adversary> clone() const = 0;
  // True when next() is a fixed function of the run (seed pinned), which is
  // what exact enumeration requires.
  virtual bool deterministic() const = 0;
  virtual std::string name() const = 0;
  virtual void publish_marks(std::map<std::string, long>& marks) const { (void)marks; }
};

std::unique_ptr<Adversary> round_robin_fair(int n);

// Target pid 1. Round 1 is a warm-up won by pid n; afterwards, per round:
// one step to 1 while occupied, drain the holder, two steps to each pid of
// `order` (aborting on entry), one trailing step to 1.
std::unique_ptr<Adversary> ordered_lockout(int n, std::vector<int> order = {});

struct SurvivorRecord {
  int pid = 0;
  int level_s = 0;
  int round_index = 0;
  std::vector<int> test_set;
};

struct SurvivorLevel {
  int s = 0;
  int count = 0;
};

// s = 2^(ceil(log2 n)+t) for t = -5..-1 with counts floor(n/20) for the four
// low levels and floor(6n/20) for the top one.
std::vector<SurvivorLevel> default_survivor_levels(int n);

struct SurvivorOptions {
  std::vector<SurvivorLevel> levels;  // empty -> defaults
  long fairness_interval = 0;         // 0 = pokes disabled
  int max_retries = 200000;  // per selection; guards livelock, not normal retries
  int target = 1;
  bool fair_completion = false;  // keep scheduling everyone after the passes
  bool prep_only = false;        // halt after the preparation phase
};

class SurvivorSelector;
std::unique_ptr<SurvivorSelector> survivor_selector(int n, SurvivorOptions opt, uint64_t seed);

enum class PostFreeOrder { Shuffled, Fixed };

// The restricted adversary: every member of participant_set steps once while
// the section is occupied, the holder is drained, then members are scheduled
// in passes until the round completes. When participant_set covers all pids
// the measured round is round 1 (free at start, no warm-up).
std::unique_ptr<Adversary> restricted_random(int n, std::vector<int> participant_set,
                                             uint64_t order_seed,
                                             PostFreeOrder order = PostFreeOrder::Shuffled,
                                             std::vector<int> fixed_order = {});

// Scripted scheduler: 2,1,1,3,3,4,4 / drain / 5,3,3 / halt (or keep
// scheduling round-robin when halt_at_measurement is false).
std::unique_ptr<Adversary> inference_script(int n = 5, bool halt_at_measurement = true);

// Boolean-variant script: 1,2,2,3,3 / drain / 4,1,1,5,5 / drain / 6,4,4 /
// probe 2,2 / halt (or continue fairly when halt_after_probe is false).
std::unique_ptr<Adversary> ben_or_lockout_script(int n = 6, bool halt_after_probe = true);

// True iff in every completed round every participant's first step of the
// round precedes f_k. Rounds with the section free at the start have no
// pre-free phase and are vacuously compliant.
bool is_restricted(const ExecutionTrace& t);

// Catalog access by name ("round-robin", "ordered-lockout", ...).
std::unique_ptr<Adversary> make_adversary(const std::string& name,
                                          const std::map<std::string, std::string>& args,
                                          const ProtocolParams& params, uint64_t seed);
std::vector<std::string> adversary_catalog();

class SurvivorSelector : public Adversary {
 public:
  virtual const std::vector<SurvivorRecord>& survivors() const = 0;
  virtual long target_round() const = 0;  // 0 while preparation is unfinished
  virtual std::vector<int> unstored_pool() const = 0;
};

}  // namespace rmx
