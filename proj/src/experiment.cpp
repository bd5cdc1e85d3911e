#include "rmx/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rmx {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

}  // namespace

Predicate parse_predicate(const std::string& text) {
  Predicate p;
  p.source = text;
  std::string rest = text;
  while (!rest.empty()) {
    size_t amp = rest.find('&');
    std::string tok = trim(amp == std::string::npos ? rest : rest.substr(0, amp));
    rest = amp == std::string::npos ? "" : rest.substr(amp + 1);
    if (tok.empty()) continue;
    PredicateAtom atom;
    if (tok[0] == '!') {
      atom.negated = true;
      tok = trim(tok.substr(1));
    }
    size_t paren = tok.find('(');
    if (paren == std::string::npos) {
      atom.name = tok;
    } else {
      if (tok.back() != ')') throw std::invalid_argument("predicate: missing ')' in " + tok);
      atom.name = trim(tok.substr(0, paren));
      std::string inner = tok.substr(paren + 1, tok.size() - paren - 2);
      std::string item;
      std::stringstream ss(inner);
      while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t eq = item.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("predicate: want key=value in " + tok);
        atom.args[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
      }
    }
    p.atoms.push_back(std::move(atom));
  }
  if (p.atoms.empty()) p.atoms.push_back({false, "true", {}});
  return p;
}

namespace {

// Resolves an integer argument; "@target" reads the trace mark.
std::optional<long> atom_arg(const PredicateAtom& atom, const std::string& key,
                             const ExecutionTrace& t) {
  auto it = atom.args.find(key);
  if (it == atom.args.end()) return std::nullopt;
  if (it->second == "@target") {
    auto mk = t.marks.find("target_round");
    if (mk == t.marks.end() || mk->second <= 0) return std::nullopt;
    return mk->second;
  }
  return std::stol(it->second);
}

bool eval_atom(const PredicateAtom& atom, const ExperimentSpec& spec, const ExecutionTrace& t,
               const RoundsCache& rc) {
  const auto& name = atom.name;
  auto round_of = [&](long k) -> const RoundView* {
    if (k < 1 || k > static_cast<long>(rc.completed.size())) return nullptr;
    return &rc.completed[static_cast<size_t>(k - 1)];
  };
  if (name == "true") return true;
  if (name == "false") return false;
  if (name == "prefix") return prefix_matches(t.run, spec.prefix_pattern);
  if (name == "round_complete") {
    auto k = atom_arg(atom, "k", t);
    return k && round_of(*k) != nullptr;
  }
  if (name == "wins") {
    auto i = atom_arg(atom, "i", t);
    auto k = atom_arg(atom, "k", t);
    if (!i || !k) return false;
    const RoundView* rv = round_of(*k);
    return rv && rv->winner == static_cast<int>(*i);
  }
  if (name == "participates") {
    auto i = atom_arg(atom, "i", t);
    auto k = atom_arg(atom, "k", t);
    if (!i || !k) return false;
    const RoundView* rv = round_of(*k);
    return rv && std::binary_search(rv->participants.begin(), rv->participants.end(),
                                    static_cast<int>(*i));
  }
  if (name == "pcount") {
    auto k = atom_arg(atom, "k", t);
    auto m = atom_arg(atom, "m", t);
    if (!k || !m) return false;
    const RoundView* rv = round_of(*k);
    return rv && static_cast<long>(rv->participants.size()) == *m;
  }
  if (name == "new_values") {
    auto k = atom_arg(atom, "k", t);
    if (!k) return false;
    const RoundView* rv = round_of(*k);
    return rv && new_values_holds(t, *rv);
  }
  if (name == "unique_max") {
    auto k = atom_arg(atom, "k", t);
    if (!k) return false;
    const RoundView* rv = round_of(*k);
    return rv && unique_max_holds(t, *rv);
  }
  if (name == "rnum_differs" || name == "rnum_equal") {
    auto k = atom_arg(atom, "k", t);
    auto j = atom_arg(atom, "j", t);
    if (!k || !j) return false;
    auto a = round_number_of(t, rc, static_cast<int>(*k));
    auto b = round_number_of(t, rc, static_cast<int>(*j));
    if (!a || !b) return false;
    return (name == "rnum_differs") ? (*a != *b) : (*a == *b);
  }
  throw std::invalid_argument("unknown predicate atom: " + name);
}

}  // namespace

bool eval_predicate(const Predicate& p, const ExperimentSpec& spec, const ExecutionTrace& t,
                    const RoundsCache& rc) {
  for (const PredicateAtom& atom : p.atoms) {
    bool v = eval_atom(atom, spec, t, rc);
    if (atom.negated) v = !v;
    if (!v) return false;
  }
  return true;
}

std::unique_ptr<Adversary> ExperimentSpec::build_adversary(uint64_t adv_seed) const {
  if (adversary_factory) return adversary_factory(adv_seed);
  return make_adversary(adversary.name, adversary.args, params, adv_seed);
}

double EstimateResult::standard_error() const {
  if (accepted <= 0) return 0;
  double p = estimate;
  return std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(accepted));
}

ExecutionTrace run_trial(const ProtocolParams& params, Adversary& adv, long horizon,
                         uint64_t seed) {
  ExecutionTrace t;
  t.params = params;
  t.seed = seed;
  RandomChoices cs(seed);
  SystemState st = init(params, cs, t.choices);
  while (st.step_count < horizon) {
    Decision d = adv.next(t.run);
    if (d.halt) {
      t.halted = true;
      break;
    }
    if (d.pid < 1 || d.pid > params.n)
      throw std::runtime_error("adversary returned invalid pid");
    StepMeta m = step(st, d.pid, cs, t.choices);
    t.run.push_back(m.transition);
    t.meta.push_back(m);
  }
  t.final_state = std::move(st);
  adv.publish_marks(t.marks);
  return t;
}

namespace {

struct TrialCounts {
  long accepted = 0;
  long hits = 0;
  long exhausted = 0;
};

TrialCounts run_range(const ExperimentSpec& spec, long lo, long hi) {
  TrialCounts c;
  for (long i = lo; i < hi; ++i) {
    uint64_t protocol_seed = mix_seed(spec.seed, static_cast<uint64_t>(2 * i + 1));
    uint64_t adv_seed = mix_seed(spec.seed ^ 0xADA0ADA0ADA0ADA0ULL,
                                 static_cast<uint64_t>(2 * i + 2));
    auto adv = spec.build_adversary(adv_seed);
    ExecutionTrace t = run_trial(spec.params, *adv, spec.horizon, protocol_seed);
    if (!t.halted && t.steps() >= spec.horizon) ++c.exhausted;
    RoundsCache rc = make_rounds_cache(t);
    if (!eval_predicate(spec.condition, spec, t, rc)) continue;
    ++c.accepted;
    if (eval_predicate(spec.target, spec, t, rc)) ++c.hits;
  }
  return c;
}

}  // namespace

EstimateResult estimate(const ExperimentSpec& spec, int workers) {
  if (spec.mode != ExperimentSpec::Mode::MonteCarlo)
    throw std::invalid_argument("estimate: spec mode is not montecarlo");
  EstimateResult r;
  r.trials = spec.trials;
  r.seed = spec.seed;
  TrialCounts total;
  if (workers <= 1) {
    total = run_range(spec, 0, spec.trials);
  } else {
    std::vector<TrialCounts> parts(static_cast<size_t>(workers));
    std::vector<std::thread> threads;
    long chunk = (spec.trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      long lo = w * chunk, hi = std::min<long>(spec.trials, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back(
          [&, w, lo, hi] { parts[static_cast<size_t>(w)] = run_range(spec, lo, hi); });
    }
    for (auto& th : threads) th.join();
    for (const auto& p : parts) {
      total.accepted += p.accepted;
      total.hits += p.hits;
      total.exhausted += p.exhausted;
    }
  }
  r.accepted = total.accepted;
  r.target_hits = total.hits;
  r.horizon_exhausted = total.exhausted;
  if (r.accepted == 0) {
    r.defined = false;
    return r;
  }
  r.defined = true;
  double a = static_cast<double>(r.accepted);
  double p = static_cast<double>(r.target_hits) / a;
  r.estimate = p;
  const double z = 1.959963984540054;
  double z2 = z * z;
  double center = (p + z2 / (2 * a)) / (1 + z2 / a);
  double half = z * std::sqrt(p * (1 - p) / a + z2 / (4 * a * a)) / (1 + z2 / a);
  // Clamp against rounding so the interval always contains the estimate.
  r.ci_lo = std::min(std::max(0.0, center - half), p);
  r.ci_hi = std::max(std::min(1.0, center + half), p);
  return r;
}

namespace {

struct EnumAccum {
  Rat total = 0;
  Rat cond = 0;
  Rat target = 0;
  uint64_t leaves = 0;
};

struct EnumFrame {
  SystemState st;
  std::unique_ptr<Adversary> adv;
  ExecutionTrace trace;  // run/meta/choices so far
  int next_round_rep = 0;
  int entries = 0;
};

void enum_leaf(const ExperimentSpec& spec, EnumFrame& f, const Rat& mass, EnumAccum& acc,
               const LeafHook& hook) {
  f.trace.final_state = f.st;
  f.adv->publish_marks(f.trace.marks);
  acc.total += mass;
  ++acc.leaves;
  if (acc.leaves > spec.max_leaves)
    throw std::runtime_error("enumerate_exact: leaf cap exceeded");
  RoundsCache rc = make_rounds_cache(f.trace);
  bool cond = eval_predicate(spec.condition, spec, f.trace, rc);
  bool targ = false;
  if (cond) {
    acc.cond += mass;
    targ = eval_predicate(spec.target, spec, f.trace, rc);
    if (targ) acc.target += mass;
  }
  if (hook) hook(f.trace, mass, cond, targ);
}

void enum_apply(EnumFrame& f, int pid, DrawResult injected, bool has_draw) {
  InjectedChoice cs(injected.value, has_draw ? injected.mass : Rat(0));
  StepMeta m = step(f.st, pid, cs, f.trace.choices);
  f.trace.run.push_back(m.transition);
  f.trace.meta.push_back(m);
  if (m.entered_crit) ++f.entries;
}

void enum_dfs(const ExperimentSpec& spec, EnumFrame f, Rat mass, EnumAccum& acc,
              const LeafHook& hook) {
  for (;;) {
    if (f.st.step_count >= spec.horizon ||
        (spec.stop_after_rounds > 0 && f.entries >= spec.stop_after_rounds)) {
      enum_leaf(spec, f, mass, acc, hook);
      return;
    }
    Decision d = f.adv->next(f.trace.run);
    if (d.halt) {
      f.trace.halted = true;
      enum_leaf(spec, f, mass, acc, hook);
      return;
    }
    if (d.pid < 1 || d.pid > spec.params.n)
      throw std::runtime_error("adversary returned invalid pid");
    DrawNeed need = step_requirement(f.st, d.pid);
    if (need == DrawNeed::None) {
      enum_apply(f, d.pid, {}, false);
      continue;
    }
    auto fork = [&]() {
      EnumFrame child;
      child.st = f.st;
      child.adv = f.adv->clone();
      child.trace = f.trace;
      child.next_round_rep = f.next_round_rep;
      child.entries = f.entries;
      return child;
    };
    if (need == DrawNeed::Lottery) {
      std::vector<int> domain;
      if (spec.params.is_ben_or()) {
        domain = {0, 1};
      } else {
        for (int v = 1; v <= spec.params.b; ++v) domain.push_back(v);
      }
      for (int v : domain) {
        Rat m = lottery_mass(spec.params, v);
        if (m == 0) continue;
        EnumFrame child = fork();
        enum_apply(child, d.pid, {v, m}, true);
        enum_dfs(spec, std::move(child), mass * m, acc, hook);
      }
      return;
    }
    // Round-number draw: branch over the live equality pattern.
    std::vector<int> live = live_round_values(f.st);
    int dcount = static_cast<int>(live.size());
    Rat each(1, spec.params.r);
    for (int v : live) {
      EnumFrame child = fork();
      enum_apply(child, d.pid, {v, each}, true);
      enum_dfs(spec, std::move(child), mass * each, acc, hook);
    }
    if (dcount < spec.params.r) {
      Rat fresh_mass = Rat(spec.params.r - dcount, spec.params.r);
      EnumFrame child = fork();
      int rep = child.next_round_rep++;
      enum_apply(child, d.pid, {rep, fresh_mass}, true);
      enum_dfs(spec, std::move(child), mass * fresh_mass, acc, hook);
    }
    return;
  }
}

}  // namespace

ExactResult enumerate_exact(const ExperimentSpec& spec, const LeafHook& hook) {
  auto proto = spec.build_adversary(spec.seed);
  if (!proto->deterministic())
    throw std::invalid_argument("enumerate_exact: adversary is not deterministic");
  EnumAccum acc;
  EnumFrame root;
  root.trace.params = spec.params;
  root.next_round_rep = 0;
  {
    // Initial round-number draw: no stored values yet, one fresh branch.
    InjectedChoice cs(root.next_round_rep++, Rat(1));
    root.st = init(spec.params, cs, root.trace.choices);
  }
  root.adv = std::move(proto);
  enum_dfs(spec, std::move(root), Rat(1), acc, hook);
  if (acc.total != 1) throw std::runtime_error("enumerate_exact: leaf masses do not sum to 1");
  ExactResult r;
  r.leaves = acc.leaves;
  r.total_mass = acc.total;
  r.cond_mass = acc.cond;
  if (acc.cond == 0) {
    r.defined = false;
    r.probability = 0;
    return r;
  }
  r.defined = true;
  r.probability = acc.target / acc.cond;
  return r;
}

Comparison compare_adversaries(const ExperimentSpec& a, const ExperimentSpec& b, int workers) {
  Comparison c;
  c.a = estimate(a, workers);
  c.b = estimate(b, workers);
  if (!c.a.defined || !c.b.defined) throw std::runtime_error("compare: undefined estimate");
  c.ratio = c.b.estimate == 0 ? std::numeric_limits<double>::infinity()
                              : c.a.estimate / c.b.estimate;
  double p1 = c.a.estimate, p2 = c.b.estimate;
  double n1 = static_cast<double>(c.a.accepted), n2 = static_cast<double>(c.b.accepted);
  double pool = (p1 * n1 + p2 * n2) / (n1 + n2);
  double se = std::sqrt(std::max(pool * (1 - pool) * (1 / n1 + 1 / n2), 1e-300));
  c.z = (p1 - p2) / se;
  return c;
}

}  // namespace rmx
