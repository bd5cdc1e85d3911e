#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmx/engine.hpp"

namespace rmx {

using Run = std::vector<Transition>;

struct ExecutionTrace {
  ProtocolParams params;
  uint64_t seed = 0;
  Run run;
  std::vector<StepMeta> meta;
  ChoiceLog choices;
  SystemState final_state;
  bool halted = false;  // the adversary signalled halt before the horizon
  std::map<std::string, long> marks;

  long steps() const { return static_cast<long>(run.size()); }
};

// One completed round. Step indices are 1-based; t_end = t(k).
struct RoundView {
  int k = 0;
  long t_start = 0;
  long t_end = 0;
  long f_k = 0;  // index of the round's Exit->Rem, or t_start when free at start
  bool free_at_start = false;
  std::vector<int> participants;  // sorted
  int winner = 0;
};

struct IncompleteFragment {
  long t_start = 0;
  std::vector<int> participants;
};

// Throws std::invalid_argument if some process's region sequence is not the
// cyclic Rem->Try->(Try)*->Crit->Exit->Rem.
void validate_run(const Run& run, int n);

std::vector<RoundView> rounds(const Run& run, int n);
std::optional<IncompleteFragment> incomplete_fragment(const Run& run, int n);

// Cached per-trace round structure for repeated predicate evaluation.
struct RoundsCache {
  std::vector<RoundView> completed;
  std::optional<IncompleteFragment> fragment;
};
RoundsCache make_rounds_cache(const ExecutionTrace& t);

std::vector<int> participants(const Run& run, int n, int k);  // empty past the last round
int winner(const Run& run, int n, int k);                     // 0 when incomplete
bool crit_free(const Run& run);

// N(k): every participant of round k redrew its lottery value within round k.
bool new_values_holds(const ExecutionTrace& t, int k);
bool new_values_holds(const ExecutionTrace& t, const RoundView& rv);

struct Starvation {
  int pid = 0;
  long from = 0;  // first starved step index
  long to = 0;    // last starved step index
};
std::vector<Starvation> fairness_violations(const Run& run, int n, long window);

bool prefix_matches(const Run& run, const Run& pattern);

// B_i just prior to round k's final step (the X(k) convention).
int lottery_value_at_round_end(const ExecutionTrace& t, int pid, const RoundView& rv);

// U(k): a unique maximizer of B_i(k) over the round's participants.
bool unique_max_holds(const ExecutionTrace& t, const RoundView& rv);

// Round number in effect during round k (as drawn at t(k-1) or at init);
// nullopt when round k never started. Values are representatives under
// enumeration: compare only for equality, and only between rounds whose
// values coexisted in the state.
std::optional<int> round_number_of(const ExecutionTrace& t, const RoundsCache& rc, int k);

}  // namespace rmx
