#include "rmx/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace rmx {

namespace {

bool would_enter(const SystemState& st, const LocalState& L) {
  return st.V.S == 0 && L.R != kNoRound && st.V.B == L.B && st.V.R == L.R;
}

bool would_redraw(const SystemState& st, const LocalState& L) {
  bool r_mismatch = (L.R == kNoRound) || (st.V.R != L.R);
  if (st.params.variant == Variant::RabinDeoptimized) return r_mismatch;
  return r_mismatch || (st.V.B < L.B);
}

}  // namespace

SystemState init(const ProtocolParams& params, ChoiceSource& cs, ChoiceLog& log) {
  params.validate();
  SystemState st;
  st.params = params;
  st.V.S = 0;
  st.V.B = 0;
  DrawResult r0 = cs.round_number(params);
  st.V.R = r0.value;
  log.push_back({0, DrawKind::RoundNumber, 0, r0.value, r0.mass});
  st.locals.resize(static_cast<size_t>(params.n) + 1);
  for (int pid = 1; pid <= params.n; ++pid) {
    LocalState& L = st.local(pid);
    L.B = params.is_ben_or() ? 0 : 1;
    L.R = kNoRound;
    L.region = Region::Rem;
  }
  st.step_count = 0;
  return st;
}

DrawNeed step_requirement(const SystemState& st, int pid) {
  const LocalState& L = st.local(pid);
  switch (L.region) {
    case Region::Rem:
    case Region::Try:
      if (would_enter(st, L)) return DrawNeed::RoundNumber;
      if (would_redraw(st, L)) return DrawNeed::Lottery;
      return DrawNeed::None;
    case Region::Crit:
      return DrawNeed::None;
    case Region::Exit:
      return DrawNeed::None;
  }
  return DrawNeed::None;
}

StepMeta step(SystemState& st, int pid, ChoiceSource& cs, ChoiceLog& log) {
  if (pid < 1 || pid > st.params.n) throw std::invalid_argument("step: bad pid");
  StepMeta m;
  m.v_before = st.V;
  LocalState& L = st.local(pid);
  long t = st.step_count + 1;
  Region from = L.region;

  switch (from) {
    case Region::Rem:
    case Region::Try: {
      if (would_enter(st, L)) {
        DrawResult fresh = cs.round_number(st.params);
        log.push_back({t, DrawKind::RoundNumber, pid, fresh.value, fresh.mass});
        st.V = {1, 0, fresh.value};
        L.region = Region::Crit;
        m.entered_crit = true;
      } else {
        if (would_redraw(st, L)) {
          DrawResult d = cs.lottery(st.params);
          log.push_back({t, DrawKind::Lottery, pid, d.value, d.mass});
          L.B = d.value;
          st.V.B = std::max(st.V.B, d.value);
          L.R = st.V.R;
          m.redraw = true;
          m.drawn = d.value;
        }
        L.region = Region::Try;
      }
      break;
    }
    case Region::Crit:
      L.region = Region::Exit;
      break;
    case Region::Exit:
      st.V.S = 0;
      L.R = kNoRound;
      L.B = 0;
      L.region = Region::Rem;
      break;
  }

  st.step_count = t;
  m.transition = {pid, from, L.region};
  m.v_after = st.V;
  m.local_b_after = L.B;
  m.local_r_after = L.R;
  return m;
}

std::vector<int> live_round_values(const SystemState& st) {
  std::vector<int> vals;
  for (int pid = 1; pid <= st.params.n; ++pid) {
    int r = st.local(pid).R;
    if (r == kNoRound) continue;
    if (std::find(vals.begin(), vals.end(), r) == vals.end()) vals.push_back(r);
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

}  // namespace rmx
