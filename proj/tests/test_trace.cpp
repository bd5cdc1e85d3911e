#include "doctest.h"
#include "rmx/experiment.hpp"
#include "rmx/trace.hpp"

using namespace rmx;

namespace {

Transition tr(int pid, Region a, Region b) { return {pid, a, b}; }

Run single_round_run() {
  // One process churns in Try, then enters at step 5.
  return {tr(1, Region::Rem, Region::Try), tr(1, Region::Try, Region::Try),
          tr(1, Region::Try, Region::Try), tr(1, Region::Try, Region::Try),
          tr(1, Region::Try, Region::Crit)};
}

}  // namespace

TEST_CASE("round boundaries") {
  Run r = single_round_run();
  auto rs = rounds(r, 1);
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].t_end == 5);
  CHECK(rs[0].t_start == 1);
  CHECK(rs[0].winner == 1);
  CHECK(rs[0].free_at_start);
  CHECK(rs[0].f_k == 1);
  CHECK_FALSE(incomplete_fragment(r, 1).has_value());

  Run no_entry = {tr(1, Region::Rem, Region::Try), tr(1, Region::Try, Region::Try)};
  CHECK(rounds(no_entry, 1).empty());
  auto frag = incomplete_fragment(no_entry, 1);
  REQUIRE(frag.has_value());
  CHECK(frag->t_start == 1);
  CHECK(frag->participants == std::vector<int>{1});

  Run two = single_round_run();
  two.push_back(tr(1, Region::Crit, Region::Exit));
  two.push_back(tr(2, Region::Rem, Region::Try));
  two.push_back(tr(1, Region::Exit, Region::Rem));
  two.push_back(tr(2, Region::Try, Region::Try));
  two.push_back(tr(2, Region::Try, Region::Try));
  two.push_back(tr(2, Region::Try, Region::Try));
  two.push_back(tr(2, Region::Try, Region::Crit));
  auto rs2 = rounds(two, 2);
  REQUIRE(rs2.size() == 2);
  CHECK(rs2[0].t_end == 5);
  CHECK(rs2[1].t_start == 6);
  CHECK(rs2[1].t_end == 12);
  CHECK(rs2[1].f_k == 8);  // the Exit->Rem inside round 2
  CHECK_FALSE(rs2[1].free_at_start);
  CHECK(rs2[1].participants == std::vector<int>{2});
}

TEST_CASE("malformed runs are rejected") {
  Run bad = {tr(1, Region::Crit, Region::Exit)};
  CHECK_THROWS_AS(rounds(bad, 1), std::invalid_argument);
  Run skip = {tr(1, Region::Rem, Region::Try), tr(1, Region::Exit, Region::Rem)};
  CHECK_THROWS_AS(validate_run(skip, 1), std::invalid_argument);
  Run badpid = {tr(3, Region::Rem, Region::Try)};
  CHECK_THROWS_AS(validate_run(badpid, 2), std::invalid_argument);
}

TEST_CASE("participants and winner") {
  Run r;
  r.push_back(tr(3, Region::Rem, Region::Try));
  r.push_back(tr(3, Region::Try, Region::Try));
  r.push_back(tr(3, Region::Try, Region::Crit));
  CHECK(participants(r, 3, 1) == std::vector<int>{3});
  CHECK(winner(r, 3, 1) == 3);
  CHECK(participants(r, 3, 2).empty());
  CHECK(winner(r, 3, 2) == 0);

  // The winning step is itself a trying step.
  for (const RoundView& rv : rounds(r, 3)) {
    bool found = false;
    for (int pid : rv.participants) found = found || pid == rv.winner;
    CHECK(found);
  }
}

TEST_CASE("critical-section occupancy from the run alone") {
  Run r;
  CHECK(crit_free(r));
  r.push_back(tr(2, Region::Rem, Region::Try));
  r.push_back(tr(2, Region::Try, Region::Crit));
  CHECK_FALSE(crit_free(r));
  r.push_back(tr(2, Region::Crit, Region::Exit));
  CHECK_FALSE(crit_free(r));
  r.push_back(tr(2, Region::Exit, Region::Rem));
  CHECK(crit_free(r));
}

TEST_CASE("fairness violations") {
  // Round-robin over three processes: no starvation for window >= n.
  ProtocolParams p = default_params(3, Variant::RabinOptimized);
  auto adv = round_robin_fair(3);
  ExecutionTrace t = run_trial(p, *adv, 120, 5);
  CHECK(fairness_violations(t.run, 3, 3).empty());

  // A process parked in Try starves once the window is exceeded.
  Run r = {tr(1, Region::Rem, Region::Try), tr(2, Region::Rem, Region::Try)};
  for (int i = 0; i < 20; ++i) r.push_back(tr(2, Region::Try, Region::Try));
  auto v = fairness_violations(r, 2, 10);
  REQUIRE(v.size() == 1);
  CHECK(v[0].pid == 1);
  CHECK(v[0].to - v[0].from + 1 > 10);

  // A process left in Rem is not starved; the busy one has no gaps.
  Run rem_only = {tr(2, Region::Rem, Region::Try)};
  for (int i = 0; i < 30; ++i) rem_only.push_back(tr(2, Region::Try, Region::Try));
  CHECK(fairness_violations(rem_only, 2, 5).empty());
}

TEST_CASE("prefix matching") {
  Run r = single_round_run();
  CHECK(prefix_matches(r, {}));
  CHECK(prefix_matches(r, r));
  Run longer = r;
  longer.push_back(tr(1, Region::Crit, Region::Exit));
  CHECK_FALSE(prefix_matches(r, longer));
  Run off = r;
  off[2] = tr(1, Region::Try, Region::Crit);
  CHECK_FALSE(prefix_matches(r, off));
}

TEST_CASE("new-values predicate") {
  // Fresh competitors always redraw.
  ProtocolParams p = default_params(2, Variant::RabinOptimized);
  auto adv = round_robin_fair(2);
  ExecutionTrace t = run_trial(p, *adv, 40, 9);
  auto rs = rounds(t.run, 2);
  REQUIRE(!rs.empty());
  CHECK(new_values_holds(t, 1));

  // Deoptimized round-number collision: replay a fixed choice log in which
  // the round-2 number equals the loser's remembered one, so it never
  // redraws in round 2.
  ProtocolParams dp = default_params(2, Variant::RabinDeoptimized);
  ChoiceLog forced;
  forced.push_back({0, DrawKind::RoundNumber, 0, 5, Rat(1, 100)});  // initial R
  forced.push_back({1, DrawKind::Lottery, 1, 1, Rat(1, 2)});        // 1 redraws 1
  forced.push_back({2, DrawKind::Lottery, 2, 1, Rat(1, 2)});        // 2 redraws 1
  forced.push_back({3, DrawKind::RoundNumber, 2, 5, Rat(1, 100)});  // R(2) collides
  forced.push_back({7, DrawKind::Lottery, 2, 1, Rat(1, 2)});        // 2 rejoins in round 2
  forced.push_back({8, DrawKind::RoundNumber, 2, 7, Rat(1, 100)});  // R(3) at 2's re-entry
  ReplayChoices cs(forced);
  ChoiceLog log;
  SystemState st = init(dp, cs, log);
  ExecutionTrace ft;
  ft.params = dp;
  for (int pid : {1, 2, 2, 1, 2, 2, 2, 2}) {
    StepMeta m = step(st, pid, cs, log);
    ft.run.push_back(m.transition);
    ft.meta.push_back(m);
  }
  ft.choices = log;
  ft.final_state = st;
  auto frs = rounds(ft.run, 2);
  REQUIRE(frs.size() == 2);
  CHECK(frs[0].winner == 2);
  CHECK(frs[1].winner == 2);
  CHECK(frs[1].participants == std::vector<int>{1, 2});
  CHECK(new_values_holds(ft, 1));
  CHECK_FALSE(new_values_holds(ft, 2));  // pid 1 kept its stale value

  // Single participant with a redraw.
  ProtocolParams sp = default_params(1, Variant::RabinOptimized);
  auto solo = round_robin_fair(1);
  ExecutionTrace st1 = run_trial(sp, *solo, 6, 4);
  CHECK(new_values_holds(st1, 1));
}

TEST_CASE("run-derived rounds agree with the engine metadata") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    ProtocolParams p = default_params(4, Variant::RabinOptimized);
    auto adv = round_robin_fair(4);
    ExecutionTrace t = run_trial(p, *adv, 150, seed);
    auto rs = rounds(t.run, 4);
    long entries = 0;
    for (size_t i = 0; i < t.meta.size(); ++i) {
      if (!t.meta[i].entered_crit) continue;
      ++entries;
      REQUIRE(entries <= static_cast<long>(rs.size()));
      CHECK(rs[static_cast<size_t>(entries - 1)].t_end == static_cast<long>(i) + 1);
      CHECK(rs[static_cast<size_t>(entries - 1)].winner == t.meta[i].transition.pid);
    }
    CHECK(entries == static_cast<long>(rs.size()));
  }
}

TEST_CASE("round numbers from the choice log") {
  ProtocolParams p = default_params(2, Variant::RabinOptimized);
  auto adv = round_robin_fair(2);
  ExecutionTrace t = run_trial(p, *adv, 60, 21);
  RoundsCache rc = make_rounds_cache(t);
  REQUIRE(rc.completed.size() >= 2);
  auto r1 = round_number_of(t, rc, 1);
  auto r2 = round_number_of(t, rc, 2);
  REQUIRE(r1.has_value());
  REQUIRE(r2.has_value());
  CHECK(*r1 == t.choices[0].value);
  CHECK_FALSE(round_number_of(t, rc, 99).has_value());
}
