#include "rmx/trace.hpp"

#include <algorithm>
#include <stdexcept>

namespace rmx {

namespace {

bool legal_move(Region from, Region to) {
  if (from == Region::Rem && to == Region::Try) return true;
  if (from == Region::Try && (to == Region::Try || to == Region::Crit)) return true;
  if (from == Region::Crit && to == Region::Exit) return true;
  if (from == Region::Exit && to == Region::Rem) return true;
  return false;
}

bool is_try_step(const Transition& tr) {
  return tr.to == Region::Try || tr.to == Region::Crit;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

void validate_run(const Run& run, int n) {
  std::vector<Region> cur(static_cast<size_t>(n) + 1, Region::Rem);
  for (size_t i = 0; i < run.size(); ++i) {
    const Transition& tr = run[i];
    if (tr.pid < 1 || tr.pid > n)
      throw std::invalid_argument("run: pid out of range at step " + std::to_string(i + 1));
    if (tr.from != cur[static_cast<size_t>(tr.pid)] || !legal_move(tr.from, tr.to))
      throw std::invalid_argument("run: illegal transition at step " + std::to_string(i + 1));
    cur[static_cast<size_t>(tr.pid)] = tr.to;
  }
}

std::vector<RoundView> rounds(const Run& run, int n) {
  validate_run(run, n);
  std::vector<RoundView> out;
  long t_start = 1;
  bool round_free_at_start = true;
  long f_k = 0;
  std::vector<int> parts;
  int k = 1;
  for (size_t i = 0; i < run.size(); ++i) {
    const Transition& tr = run[i];
    long t = static_cast<long>(i) + 1;
    if (is_try_step(tr)) parts.push_back(tr.pid);
    if (tr.from == Region::Exit && tr.to == Region::Rem && f_k == 0) f_k = t;
    if (tr.to == Region::Crit) {
      RoundView rv;
      rv.k = k++;
      rv.t_start = t_start;
      rv.t_end = t;
      rv.free_at_start = round_free_at_start;
      rv.f_k = f_k != 0 ? f_k : t_start;
      rv.participants = sorted_unique(parts);
      rv.winner = tr.pid;
      out.push_back(std::move(rv));
      t_start = t + 1;
      parts.clear();
      f_k = 0;
      round_free_at_start = false;
    }
  }
  return out;
}

std::optional<IncompleteFragment> incomplete_fragment(const Run& run, int n) {
  auto rs = rounds(run, n);
  long t_start = rs.empty() ? 1 : rs.back().t_end + 1;
  if (t_start > static_cast<long>(run.size())) return std::nullopt;
  IncompleteFragment f;
  f.t_start = t_start;
  std::vector<int> parts;
  for (size_t i = static_cast<size_t>(t_start - 1); i < run.size(); ++i)
    if (is_try_step(run[i])) parts.push_back(run[i].pid);
  f.participants = sorted_unique(parts);
  return f;
}

RoundsCache make_rounds_cache(const ExecutionTrace& t) {
  RoundsCache rc;
  rc.completed = rounds(t.run, t.params.n);
  rc.fragment = incomplete_fragment(t.run, t.params.n);
  return rc;
}

std::vector<int> participants(const Run& run, int n, int k) {
  auto rs = rounds(run, n);
  if (k < 1 || k > static_cast<int>(rs.size())) return {};
  return rs[static_cast<size_t>(k - 1)].participants;
}

int winner(const Run& run, int n, int k) {
  auto rs = rounds(run, n);
  if (k < 1 || k > static_cast<int>(rs.size())) return 0;
  return rs[static_cast<size_t>(k - 1)].winner;
}

bool crit_free(const Run& run) {
  int occupant = 0;
  for (const Transition& tr : run) {
    if (tr.to == Region::Crit) occupant = tr.pid;
    if (tr.from == Region::Exit && tr.to == Region::Rem && tr.pid == occupant) occupant = 0;
  }
  return occupant == 0;
}

bool new_values_holds(const ExecutionTrace& t, const RoundView& rv) {
  for (int pid : rv.participants) {
    bool redrew = false;
    for (long i = rv.t_start; i <= rv.t_end; ++i) {
      const StepMeta& m = t.meta[static_cast<size_t>(i - 1)];
      if (m.transition.pid == pid && m.redraw) {
        redrew = true;
        break;
      }
    }
    if (!redrew) return false;
  }
  return true;
}

bool new_values_holds(const ExecutionTrace& t, int k) {
  auto rs = rounds(t.run, t.params.n);
  if (k < 1 || k > static_cast<int>(rs.size())) return false;
  return new_values_holds(t, rs[static_cast<size_t>(k - 1)]);
}

std::vector<Starvation> fairness_violations(const Run& run, int n, long window) {
  std::vector<Starvation> out;
  std::vector<Region> cur(static_cast<size_t>(n) + 1, Region::Rem);
  std::vector<long> last_step(static_cast<size_t>(n) + 1, 0);
  auto flush = [&](int pid, long from, long to) {
    if (to - from + 1 > window) out.push_back({pid, from, to});
  };
  for (size_t i = 0; i < run.size(); ++i) {
    long t = static_cast<long>(i) + 1;
    int pid = run[i].pid;
    if (cur[static_cast<size_t>(pid)] != Region::Rem && t - last_step[static_cast<size_t>(pid)] - 1 > window)
      flush(pid, last_step[static_cast<size_t>(pid)] + 1, t - 1);
    cur[static_cast<size_t>(pid)] = run[i].to;
    last_step[static_cast<size_t>(pid)] = t;
  }
  long end = static_cast<long>(run.size());
  for (int pid = 1; pid <= n; ++pid) {
    if (cur[static_cast<size_t>(pid)] != Region::Rem && end - last_step[static_cast<size_t>(pid)] > window)
      flush(pid, last_step[static_cast<size_t>(pid)] + 1, end);
  }
  std::sort(out.begin(), out.end(),
            [](const Starvation& a, const Starvation& b) { return a.from < b.from; });
  return out;
}

bool prefix_matches(const Run& run, const Run& pattern) {
  if (pattern.size() > run.size()) return false;
  return std::equal(pattern.begin(), pattern.end(), run.begin());
}

int lottery_value_at_round_end(const ExecutionTrace& t, int pid, const RoundView& rv) {
  for (long i = rv.t_end - 1; i >= 1; --i) {
    const StepMeta& m = t.meta[static_cast<size_t>(i - 1)];
    if (m.transition.pid == pid) return m.local_b_after;
  }
  return t.params.is_ben_or() ? 0 : 1;  // initial value
}

bool unique_max_holds(const ExecutionTrace& t, const RoundView& rv) {
  int best = -1, count = 0;
  for (int pid : rv.participants) {
    int v = lottery_value_at_round_end(t, pid, rv);
    if (v > best) {
      best = v;
      count = 1;
    } else if (v == best) {
      ++count;
    }
  }
  return count == 1;
}

std::optional<int> round_number_of(const ExecutionTrace& t, const RoundsCache& rc, int k) {
  if (k < 1) return std::nullopt;
  if (k > static_cast<int>(rc.completed.size()) + 1) return std::nullopt;
  if (k > 1) {
    long t_prev = rc.completed[static_cast<size_t>(k - 2)].t_end;
    for (const Draw& d : t.choices)
      if (d.kind == DrawKind::RoundNumber && d.step == t_prev) return d.value;
    return std::nullopt;
  }
  for (const Draw& d : t.choices)
    if (d.kind == DrawKind::RoundNumber && d.step == 0) return d.value;
  return std::nullopt;
}

}  // namespace rmx
