#pragma once

#include <optional>
#include <vector>

#include "rmx/choices.hpp"
#include "rmx/state.hpp"

namespace rmx {

struct Transition {
  int pid = 0;
  Region from = Region::Rem;
  Region to = Region::Try;
  bool operator==(const Transition&) const = default;
};

struct StepMeta {
  Transition transition;
  bool redraw = false;
  std::optional<int> drawn;  // lottery value when redraw happened
  bool entered_crit = false;
  SharedVariable v_before;
  SharedVariable v_after;
  int local_b_after = 0;
  int local_r_after = kNoRound;
};

enum class DrawNeed { None, Lottery, RoundNumber };

// Fresh state: V = (0, 0, random R); every process in Rem. The R draw is
// appended to the log with step index 0.
SystemState init(const ProtocolParams& params, ChoiceSource& cs, ChoiceLog& log);

// The draw, if any, that stepping `pid` in the current state will require.
DrawNeed step_requirement(const SystemState& st, int pid);

// One atomic lock..unlock section for `pid`. Entering Try from Rem is fused
// with the first trying access.
StepMeta step(SystemState& st, int pid, ChoiceSource& cs, ChoiceLog& log);

// Distinct round-number values still held in some R_i. The enumerator
// branches new round draws over these plus one fresh symbol.
std::vector<int> live_round_values(const SystemState& st);

}  // namespace rmx
