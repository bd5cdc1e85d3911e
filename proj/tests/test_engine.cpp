#include <set>

#include "doctest.h"
#include "rmx/engine.hpp"

using namespace rmx;

namespace {

SystemState fresh_state(const ProtocolParams& p, uint64_t seed, ChoiceLog& log) {
  RandomChoices cs(seed);
  return init(p, cs, log);
}

}  // namespace

TEST_CASE("default parameters") {
  ProtocolParams a = default_params(16, Variant::RabinOptimized);
  CHECK(a.b == 8);
  CHECK(a.r == 100);
  CHECK(default_params(2, Variant::RabinOptimized).b == 5);
  CHECK(default_params(1024, Variant::RabinDeoptimized).b == 14);
  ProtocolParams bo = default_params(6, Variant::BenOr);
  CHECK(bo.b == 1);
  CHECK(bo.r == 2);
  CHECK(bo.ben_or_p1 == Rat(1, 2));
  CHECK_THROWS_AS(default_params(0, Variant::RabinOptimized), std::invalid_argument);
}

TEST_CASE("initial state") {
  ProtocolParams p = default_params(4, Variant::RabinOptimized);
  std::set<int> seen;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    ChoiceLog log;
    SystemState st = fresh_state(p, seed, log);
    CHECK(st.V.S == 0);
    CHECK(st.V.B == 0);
    CHECK(st.V.R >= 0);
    CHECK(st.V.R < 100);
    seen.insert(st.V.R);
    CHECK(st.step_count == 0);
    for (int pid = 1; pid <= 4; ++pid) {
      CHECK(st.local(pid).B == 1);
      CHECK(st.local(pid).R == kNoRound);
      CHECK(st.local(pid).region == Region::Rem);
    }
    REQUIRE(log.size() == 1);
    CHECK(log[0].kind == DrawKind::RoundNumber);
    CHECK(log[0].step == 0);
    CHECK(log[0].mass == Rat(1, 100));
  }
  CHECK(seen.size() > 10);  // the initial round number really is random

  ChoiceLog l1, l2;
  SystemState s1 = fresh_state(p, 7, l1), s2 = fresh_state(p, 7, l2);
  CHECK(s1.V == s2.V);

  ChoiceLog lb;
  SystemState sb = fresh_state(default_params(2, Variant::BenOr), 3, lb);
  CHECK(sb.local(1).B == 0);
  CHECK((sb.V.R == 0 || sb.V.R == 1));
}

TEST_CASE("lottery masses") {
  ProtocolParams p = default_params(2, Variant::RabinOptimized);  // b = 5
  CHECK(lottery_mass(p, 1) == Rat(1, 2));
  CHECK(lottery_mass(p, 4) == Rat(1, 16));
  CHECK(lottery_mass(p, 5) == Rat(1, 16));  // folded tail
  Rat sum = 0;
  for (int v = 1; v <= 5; ++v) sum += lottery_mass(p, v);
  CHECK(sum == Rat(1));

  // The sampler hits every value and logs the right mass.
  Rng rng(11);
  std::vector<long> counts(6, 0);
  for (int i = 0; i < 40000; ++i) ++counts[static_cast<size_t>(rng.trunc_geom(5))];
  CHECK(counts[1] > 18500);
  CHECK(counts[1] < 21500);
  CHECK(counts[4] > 1900);
  CHECK(counts[5] > 1900);

  ProtocolParams bo = default_params(2, Variant::BenOr);
  CHECK(lottery_mass(bo, 1) == Rat(1, 2));
  CHECK(lottery_mass(bo, 0) == Rat(1, 2));
}

TEST_CASE("step: redraw on round-number mismatch while occupied") {
  ProtocolParams p = default_params(2, Variant::RabinOptimized);
  ChoiceLog log;
  SystemState st = fresh_state(p, 5, log);
  st.V = {1, 0, 17};
  st.local(2).region = Region::Crit;  // keep the semaphore flag honest
  StepMeta m = step(st, 1, *std::make_unique<RandomChoices>(9), log);
  CHECK(m.transition == Transition{1, Region::Rem, Region::Try});
  CHECK(m.redraw);
  CHECK(st.local(1).R == 17);
  CHECK(st.V.B == *m.drawn);
  CHECK_FALSE(m.entered_crit);
}

TEST_CASE("step: matching process enters and reinitializes the shared variable") {
  ProtocolParams p = default_params(2, Variant::RabinOptimized);
  ChoiceLog log;
  SystemState st = fresh_state(p, 5, log);
  st.V = {0, 3, 42};
  st.local(1).region = Region::Try;
  st.local(1).B = 3;
  st.local(1).R = 42;
  RandomChoices cs(1);
  StepMeta m = step(st, 1, cs, log);
  CHECK(m.entered_crit);
  CHECK(st.V.S == 1);
  CHECK(st.V.B == 0);
  CHECK(st.local(1).region == Region::Crit);
  CHECK(m.transition == Transition{1, Region::Try, Region::Crit});
}

TEST_CASE("step: exit clears the semaphore and the locals") {
  ProtocolParams p = default_params(2, Variant::RabinOptimized);
  ChoiceLog log;
  SystemState st = fresh_state(p, 5, log);
  st.V = {1, 0, 9};
  st.local(1).region = Region::Exit;
  st.local(1).B = 0;
  st.local(1).R = 9;
  RandomChoices cs(1);
  StepMeta m = step(st, 1, cs, log);
  CHECK(st.V.S == 0);
  CHECK(st.local(1).B == 0);
  CHECK(st.local(1).R == kNoRound);
  CHECK(m.transition == Transition{1, Region::Exit, Region::Rem});
}

TEST_CASE("step: deoptimized variant ignores a smaller shared maximum") {
  ProtocolParams p = default_params(2, Variant::RabinDeoptimized);
  ChoiceLog log;
  SystemState st = fresh_state(p, 5, log);
  st.V = {0, 1, 30};
  st.local(2).region = Region::Try;
  st.local(2).B = 4;  // above V.B, but the round numbers match
  st.local(2).R = 30;
  RandomChoices cs(1);
  CHECK(step_requirement(st, 2) == DrawNeed::None);
  StepMeta m = step(st, 2, cs, log);
  CHECK_FALSE(m.redraw);
  CHECK_FALSE(m.entered_crit);
  CHECK(st.V.B == 1);
  CHECK(st.local(2).B == 4);

  // The optimized test would redraw here.
  st.params.variant = Variant::RabinOptimized;
  CHECK(step_requirement(st, 2) == DrawNeed::Lottery);
}

TEST_CASE("boolean variant first access always redraws") {
  ProtocolParams p = default_params(6, Variant::BenOr);
  ChoiceLog log;
  SystemState st = fresh_state(p, 12, log);
  CHECK(step_requirement(st, 1) == DrawNeed::Lottery);
  RandomChoices cs(4);
  StepMeta m = step(st, 1, cs, log);
  CHECK(m.redraw);
  CHECK(st.local(1).R == st.V.R);

  // A matching boolean state enters like the integer variant.
  st.local(2).region = Region::Try;
  st.local(2).B = st.V.B;
  st.local(2).R = st.V.R;
  CHECK(step_requirement(st, 2) == DrawNeed::RoundNumber);
  StepMeta e = step(st, 2, cs, log);
  CHECK(e.entered_crit);
}

TEST_CASE("step requirements agree with the applied step") {
  for (Variant var : {Variant::RabinOptimized, Variant::RabinDeoptimized, Variant::BenOr}) {
    ProtocolParams p = default_params(3, var);
    ChoiceLog log;
    SystemState st = fresh_state(p, 77, log);
    RandomChoices cs(78);
    Rng sched(79);
    for (int i = 0; i < 400; ++i) {
      int pid = 1 + sched.uniform_below(3);
      DrawNeed need = step_requirement(st, pid);
      size_t draws_before = log.size();
      StepMeta m = step(st, pid, cs, log);
      size_t new_draws = log.size() - draws_before;
      switch (need) {
        case DrawNeed::None:
          CHECK(new_draws == 0);
          break;
        case DrawNeed::Lottery:
          CHECK(new_draws == 1);
          CHECK(m.redraw);
          break;
        case DrawNeed::RoundNumber:
          CHECK(new_draws == 1);
          CHECK(m.entered_crit);
          break;
      }
      CHECK(st.mutex_ok());
    }
  }
}

TEST_CASE("choice log replay reproduces the trace") {
  ProtocolParams p = default_params(3, Variant::RabinOptimized);
  ChoiceLog log;
  RandomChoices cs(123);
  SystemState st = init(p, cs, log);
  Rng sched(321);
  std::vector<Transition> run;
  for (int i = 0; i < 200; ++i) {
    StepMeta m = step(st, 1 + sched.uniform_below(3), cs, log);
    run.push_back(m.transition);
  }
  ReplayChoices replay(log);
  ChoiceLog log2;
  SystemState st2 = init(p, replay, log2);
  for (const Transition& tr : run) {
    StepMeta m = step(st2, tr.pid, replay, log2);
    CHECK(m.transition == tr);
  }
  CHECK(st2.V == st.V);
  CHECK(replay.consumed() == log.size());
}
