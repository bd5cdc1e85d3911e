#include "rmx/adversary.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <stdexcept>

#include "rmx/choices.hpp"

namespace rmx {

namespace {

int parse_int(const std::map<std::string, std::string>& args, const std::string& key,
              int fallback) {
  auto it = args.find(key);
  return it == args.end() ? fallback : std::stoi(it->second);
}

std::vector<int> parse_pid_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stoi(item));
  return out;
}

// Run-observation bookkeeping shared by the catalog: the current holder and
// section state, derived from the visible run alone.
struct RunWatcher {
  size_t seen = 0;
  int holder = 0;  // pid currently in Crit or Exit
  bool free_now = true;
  long entries = 0;        // completed rounds so far
  long last_entry_at = 0;  // 1-based run index of the latest Try->Crit
  int last_entrant = 0;

  template <typename OnEntry>
  void observe(const Run& run, OnEntry on_entry) {
    for (; seen < run.size(); ++seen) {
      const Transition& tr = run[seen];
      if (tr.to == Region::Crit) {
        holder = tr.pid;
        free_now = false;
        ++entries;
        last_entry_at = static_cast<long>(seen) + 1;
        last_entrant = tr.pid;
        on_entry(tr.pid);
      } else if (tr.from == Region::Exit && tr.to == Region::Rem) {
        holder = 0;
        free_now = true;
      }
    }
  }
  void observe(const Run& run) {
    observe(run, [](int) {});
  }
};

class RoundRobin final : public Adversary {
 public:
  explicit RoundRobin(int n) : n_(n) {}
  Decision next(const Run& run) override {
    return {false, static_cast<int>(run.size() % static_cast<size_t>(n_)) + 1};
  }
  std::unique_ptr<Adversary> clone() const override { return std::make_unique<RoundRobin>(*this); }
  bool deterministic() const override { return true; }
  std::string name() const override { return "round-robin"; }

 private:
  int n_;
};

class OrderedLockout final : public Adversary {
 public:
  OrderedLockout(int n, std::vector<int> order) : n_(n), order_(std::move(order)) {
    if (order_.empty())
      for (int p = 2; p <= n; ++p) order_.push_back(p);
  }

  Decision next(const Run& run) override {
    w_.observe(run);
    for (;;) {
      switch (phase_) {
        case Phase::Warmup:
          if (warm_ < 2) {
            ++warm_;
            return {false, n_};
          }
          phase_ = Phase::Open1;
          break;
        case Phase::Open1:
          cycle_start_ = static_cast<long>(run.size());
          phase_ = Phase::Drain;
          return {false, 1};
        case Phase::Drain:
          if (!w_.free_now) return {false, w_.holder};
          phase_ = Phase::Pass;
          pass_idx_ = 0;
          pass_rep_ = 0;
          break;
        case Phase::Pass:
          if (w_.last_entry_at > cycle_start_) {
            phase_ = Phase::Open1;  // round over; start the next cycle
            break;
          }
          if (pass_idx_ >= order_.size()) {
            phase_ = Phase::Trail1;
            break;
          }
          {
            int pid = order_[pass_idx_];
            if (++pass_rep_ == 2) {
              pass_rep_ = 0;
              ++pass_idx_;
            }
            return {false, pid};
          }
        case Phase::Trail1:
          phase_ = Phase::Pass;
          pass_idx_ = 0;
          pass_rep_ = 0;
          return {false, 1};
      }
    }
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<OrderedLockout>(*this);
  }
  bool deterministic() const override { return true; }
  std::string name() const override { return "ordered-lockout"; }
  void publish_marks(std::map<std::string, long>& marks) const override {
    marks["measured_round"] = 2;
  }

 private:
  enum class Phase { Warmup, Open1, Drain, Pass, Trail1 };
  int n_;
  std::vector<int> order_;
  Phase phase_ = Phase::Warmup;
  int warm_ = 0;
  size_t pass_idx_ = 0;
  int pass_rep_ = 0;
  long cycle_start_ = 0;
  RunWatcher w_;
};

class RestrictedRandom final : public Adversary {
 public:
  RestrictedRandom(int n, std::vector<int> set, uint64_t seed, PostFreeOrder mode,
                   std::vector<int> fixed_order)
      : n_(n), set_(std::move(set)), rng_(seed), mode_(mode), fixed_(std::move(fixed_order)) {
    std::sort(set_.begin(), set_.end());
    if (set_.empty()) throw std::invalid_argument("restricted-random: empty participant set");
    full_ = static_cast<int>(set_.size()) == n_;
    if (!full_) {
      for (int p = 1; p <= n_; ++p)
        if (!std::binary_search(set_.begin(), set_.end(), p)) {
          warm_ = p;
          break;
        }
    }
    if (mode_ == PostFreeOrder::Fixed && fixed_.empty()) fixed_ = set_;
    phase_ = full_ ? Phase::PostFree : Phase::Warmup;
    if (full_) members_ = set_;
  }

  Decision next(const Run& run) override {
    w_.observe(run);
    for (;;) {
      switch (phase_) {
        case Phase::Warmup:
          if (warm_steps_ < 2) {
            ++warm_steps_;
            return {false, warm_};
          }
          begin_round();
          break;
        case Phase::Occupied:
          if (occ_pos_ < members_.size()) return {false, members_[occ_pos_++]};
          phase_ = Phase::Drain;
          break;
        case Phase::Drain:
          if (!w_.free_now) return {false, w_.holder};
          phase_ = Phase::PostFree;
          order_.clear();
          ord_pos_ = 0;
          break;
        case Phase::PostFree:
          if (w_.entries > round_start_entries_) {
            begin_round();  // round over; set up the next one
            break;
          }
          if (ord_pos_ >= order_.size()) new_pass();
          return {false, order_[ord_pos_++]};
      }
    }
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<RestrictedRandom>(*this);
  }
  bool deterministic() const override { return true; }  // seed-pinned function of the run
  std::string name() const override { return "restricted-random"; }
  void publish_marks(std::map<std::string, long>& marks) const override {
    marks["measured_round"] = full_ ? 1 : 2;
    marks["target_round"] = full_ ? 1 : 2;
  }

 private:
  void begin_round() {
    members_.clear();
    for (int p : set_)
      if (p != w_.holder) members_.push_back(p);
    occ_pos_ = 0;
    order_.clear();
    ord_pos_ = 0;
    round_start_entries_ = w_.entries;
    phase_ = w_.free_now ? Phase::PostFree : Phase::Occupied;
  }

  void new_pass() {
    if (mode_ == PostFreeOrder::Fixed) {
      order_ = fixed_;
    } else {
      order_ = members_;
      for (size_t i = order_.size(); i > 1; --i)
        std::swap(order_[i - 1],
                  order_[static_cast<size_t>(rng_.uniform_below(static_cast<int>(i)))]);
    }
    ord_pos_ = 0;
  }

  enum class Phase { Warmup, Occupied, Drain, PostFree };
  int n_;
  std::vector<int> set_;
  Rng rng_;
  PostFreeOrder mode_;
  std::vector<int> fixed_;
  bool full_ = false;
  int warm_ = 0;
  int warm_steps_ = 0;
  Phase phase_ = Phase::Warmup;
  std::vector<int> members_;
  size_t occ_pos_ = 0;
  std::vector<int> order_;
  size_t ord_pos_ = 0;
  long round_start_entries_ = 0;
  RunWatcher w_;
};

class InferenceScript final : public Adversary {
 public:
  InferenceScript(int n, bool halt_at_measurement) : n_(n), halt_(halt_at_measurement) {
    if (n_ < 5) throw std::invalid_argument("inference-script needs n >= 5");
  }

  Decision next(const Run& run) override {
    w_.observe(run);
    for (;;) {
      switch (phase_) {
        case Phase::Round1:
          if (pos_ < kRound1.size()) return {false, kRound1[pos_++]};
          phase_ = Phase::Drain;
          break;
        case Phase::Drain:
          if (!w_.free_now) return {false, w_.holder};
          phase_ = Phase::Round2;
          pos_ = 0;
          break;
        case Phase::Round2:
          if (pos_ < kRound2.size()) return {false, kRound2[pos_++]};
          phase_ = Phase::Tail;
          break;
        case Phase::Tail:
          if (halt_) return {true, 0};
          return {false, static_cast<int>(run.size() % static_cast<size_t>(n_)) + 1};
      }
    }
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<InferenceScript>(*this);
  }
  bool deterministic() const override { return true; }
  std::string name() const override { return "inference-script"; }
  void publish_marks(std::map<std::string, long>& marks) const override {
    marks["measured_round"] = 2;
  }

 private:
  enum class Phase { Round1, Drain, Round2, Tail };
  static constexpr std::array<int, 7> kRound1 = {2, 1, 1, 3, 3, 4, 4};
  static constexpr std::array<int, 3> kRound2 = {5, 3, 3};
  int n_;
  bool halt_;
  Phase phase_ = Phase::Round1;
  size_t pos_ = 0;
  RunWatcher w_;
};

class BenOrLockoutScript final : public Adversary {
 public:
  BenOrLockoutScript(int n, bool halt_after_probe) : n_(n), halt_(halt_after_probe) {
    if (n_ < 6) throw std::invalid_argument("ben-or-lockout needs n >= 6");
  }

  Decision next(const Run& run) override {
    w_.observe(run);
    for (;;) {
      switch (phase_) {
        case Phase::Sched: {
          const auto& q = kScheds[static_cast<size_t>(sched_)];
          if (pos_ < q.size()) return {false, q[pos_++]};
          if (sched_ < 2) {
            phase_ = Phase::Drain;
          } else {
            phase_ = Phase::Probe;
            pos_ = 0;
          }
          break;
        }
        case Phase::Drain:
          if (!w_.free_now) return {false, w_.holder};
          ++sched_;
          pos_ = 0;
          phase_ = Phase::Sched;
          break;
        case Phase::Probe:
          if (pos_ < 2) {
            ++pos_;
            return {false, 2};
          }
          phase_ = Phase::Tail;
          break;
        case Phase::Tail:
          if (halt_) return {true, 0};
          return {false, static_cast<int>(run.size() % static_cast<size_t>(n_)) + 1};
      }
    }
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<BenOrLockoutScript>(*this);
  }
  bool deterministic() const override { return true; }
  std::string name() const override { return "ben-or-lockout"; }
  void publish_marks(std::map<std::string, long>& marks) const override {
    marks["measured_round"] = 3;
  }

 private:
  enum class Phase { Sched, Drain, Probe, Tail };
  static const std::array<std::vector<int>, 3> kScheds;
  int n_;
  bool halt_;
  Phase phase_ = Phase::Sched;
  int sched_ = 0;
  size_t pos_ = 0;
  RunWatcher w_;
};

const std::array<std::vector<int>, 3> BenOrLockoutScript::kScheds = {
    std::vector<int>{1, 2, 2, 3, 3}, std::vector<int>{4, 1, 1, 5, 5}, std::vector<int>{6, 4, 4}};

// Preparation phase: selection blocks (candidate + two steps per test
// process) run right after the section frees, so the running max starts at
// zero. A successful block stores the candidate; the round is then finished
// off by sacrificing fresh pool processes until one takes the section, which
// keeps later blocks clean. A block where a test process entered collapses
// and is retried. After the last reset the entrant is kept in Crit and the
// target round runs: sweep the unstored set while occupied, drain, then two
// passes over the stored survivors.
class SurvivorSelectorImpl final : public SurvivorSelector {
 public:
  SurvivorSelectorImpl(int n, SurvivorOptions opt, uint64_t seed)
      : n_(n), opt_(std::move(opt)), rng_(seed) {
    if (opt_.levels.empty()) opt_.levels = default_survivor_levels(n_);
    for (size_t i = 0; i < opt_.levels.size(); ++i) {
      if (opt_.levels[i].s < 1 || opt_.levels[i].count < 0)
        throw std::invalid_argument("survivor-selector: bad level");
      for (size_t j = 0; j < i; ++j)
        if (opt_.levels[j].s == opt_.levels[i].s)
          throw std::invalid_argument("survivor-selector: duplicate level");
      int stored_before = 0;
      for (size_t j = 0; j < i; ++j) stored_before += opt_.levels[j].count;
      int pool_at_last = n_ - (stored_before + opt_.levels[i].count - 1);
      if (opt_.levels[i].count > 0 && pool_at_last < opt_.levels[i].s + 1)
        throw std::invalid_argument("survivor-selector: pool smaller than s+1");
    }
    stored_flag_.assign(static_cast<size_t>(n_) + 1, 0);
    stepped_.assign(static_cast<size_t>(n_) + 1, 0);
  }

  Decision next(const Run& run) override {
    w_.observe(run, [&](int entrant) {
      std::fill(stepped_.begin(), stepped_.end(), 0);
      if (stored_flag_[static_cast<size_t>(entrant)]) remove_record(entrant);
    });
    for (;;) {
      switch (phase_) {
        case Phase::Block: {
          if (block_sched_.empty()) {
            if (!w_.free_now) {
              phase_ = Phase::Drive;
              break;
            }
            if (poke_due()) return sched(next_poke_pid());
            if (!start_block()) break;  // preparation finished
          }
          if (w_.last_entry_at > block_start_run_) {
            // Collapse: a scheduled process took the section; retry.
            block_sched_.clear();
            bump_retry();
            phase_ = Phase::Drive;
            break;
          }
          if (block_pos_ < block_sched_.size()) return sched(block_sched_[block_pos_++]);
          store_candidate();
          phase_ = Phase::Reset;
          break;
        }
        case Phase::Drive:
          if (!w_.free_now) return {false, w_.holder};
          phase_ = Phase::Block;
          break;
        case Phase::Reset: {
          if (w_.last_entry_at > reset_marker_) {
            retries_ = 0;  // the stored survivor was kept; budget is per selection
            reset_steps_left_ = 0;
            phase_ = prep_done() ? (opt_.prep_only ? Phase::DrivePrepOnly : Phase::TargetSweep)
                                 : Phase::Drive;
            break;
          }
          if (reset_steps_left_ > 0) {
            --reset_steps_left_;
            return sched(reset_pid_);
          }
          if (!pick_reset_pid()) {
            // Nobody fresh is left; sacrifice the stored candidate itself.
            bump_retry();
            remove_record(cand_);
            reset_pid_ = cand_;
            stepped_[static_cast<size_t>(cand_)] = 0;
            reset_steps_left_ = 1;
            return sched(reset_pid_);
          }
          reset_steps_left_ = 1;
          return sched(reset_pid_);
        }
        case Phase::DrivePrepOnly:
          if (!w_.free_now) return {false, w_.holder};
          phase_ = Phase::Halted;
          break;
        case Phase::TargetSweep: {
          if (target_round_ == 0) {
            target_round_ = w_.entries + 1;
            sweep_.clear();
            for (int p = 1; p <= n_; ++p)
              if (!stored_flag_[static_cast<size_t>(p)] && p != w_.holder) sweep_.push_back(p);
            sweep_pos_ = 0;
          }
          if (sweep_pos_ < sweep_.size()) return sched(sweep_[sweep_pos_++]);
          phase_ = Phase::TargetDrain;
          break;
        }
        case Phase::TargetDrain:
          if (!w_.free_now) return {false, w_.holder};
          phase_ = Phase::SurvivorPass;
          pass_ = 0;
          pass_pos_ = 0;
          break;
        case Phase::SurvivorPass:
          if (w_.entries >= target_round_) {
            phase_ = Phase::Halted;  // measured round over
            break;
          }
          if (pass_pos_ < stored_.size()) return sched(stored_[pass_pos_++].pid);
          if (++pass_ < 2) {
            pass_pos_ = 0;
            break;
          }
          phase_ = opt_.fair_completion ? Phase::FairTail : Phase::Halted;
          break;
        case Phase::FairTail:
          if (w_.entries >= target_round_) {
            phase_ = Phase::Halted;
            break;
          }
          return {false, static_cast<int>(run.size() % static_cast<size_t>(n_)) + 1};
        case Phase::Halted:
          return {true, 0};
      }
    }
  }

  std::unique_ptr<Adversary> clone() const override {
    return std::make_unique<SurvivorSelectorImpl>(*this);
  }
  bool deterministic() const override { return false; }  // Monte Carlo only
  std::string name() const override { return "survivor-selector"; }
  void publish_marks(std::map<std::string, long>& marks) const override {
    marks["target_round"] = target_round_;
  }

  const std::vector<SurvivorRecord>& survivors() const override { return stored_; }
  long target_round() const override { return target_round_; }
  std::vector<int> unstored_pool() const override {
    std::vector<int> pool;
    for (int p = 1; p <= n_; ++p)
      if (!stored_flag_[static_cast<size_t>(p)]) pool.push_back(p);
    return pool;
  }

 private:
  Decision sched(int pid) {
    stepped_[static_cast<size_t>(pid)] = 1;
    ++steps_given_;
    return {false, pid};
  }

  int stored_count(int s) const {
    int c = 0;
    for (const auto& rec : stored_)
      if (rec.level_s == s) ++c;
    return c;
  }

  bool prep_done() const {
    for (const auto& lv : opt_.levels)
      if (stored_count(lv.s) < lv.count) return false;
    return true;
  }

  bool poke_due() {
    if (opt_.fairness_interval <= 0 || stored_.empty()) return false;
    if (steps_given_ - last_poke_ < opt_.fairness_interval) return false;
    last_poke_ = steps_given_;
    return true;
  }

  int next_poke_pid() {
    int pid = stored_[poke_idx_ % stored_.size()].pid;
    ++poke_idx_;
    return pid;
  }

  // Picks candidate + tests and lays out the block schedule. Returns false
  // when every level already has its count.
  bool start_block() {
    const SurvivorLevel* need = nullptr;
    for (const auto& lv : opt_.levels)
      if (stored_count(lv.s) < lv.count) {
        need = &lv;
        break;
      }
    if (!need) {
      phase_ = opt_.prep_only ? Phase::DrivePrepOnly : Phase::TargetSweep;
      return false;
    }
    int s = need->s;
    cur_level_ = s;
    std::vector<int> pool = unstored_pool();
    std::vector<int> cand_pool;
    for (int p : pool)
      if (p != opt_.target) cand_pool.push_back(p);
    if (static_cast<int>(pool.size()) < s + 1 || cand_pool.empty())
      throw std::invalid_argument("survivor-selector: pool smaller than s+1");
    cand_ = cand_pool[static_cast<size_t>(rng_.uniform_below(static_cast<int>(cand_pool.size())))];
    std::vector<int> rest;
    for (int p : pool)
      if (p != cand_) rest.push_back(p);
    tests_.clear();
    for (int i = 0; i < s; ++i) {
      size_t j = static_cast<size_t>(rng_.uniform_below(static_cast<int>(rest.size())));
      tests_.push_back(rest[j]);
      rest.erase(rest.begin() + static_cast<long>(j));
    }
    block_sched_.clear();
    block_sched_.push_back(cand_);
    for (int t : tests_) {
      block_sched_.push_back(t);
      block_sched_.push_back(t);
    }
    block_pos_ = 0;
    block_start_run_ = w_.last_entry_at;
    return true;
  }

  void store_candidate() {
    stored_.push_back(
        {cand_, cur_level_, static_cast<int>(w_.entries) + 1, tests_});
    stored_flag_[static_cast<size_t>(cand_)] = 1;
    block_sched_.clear();
    reset_marker_ = w_.last_entry_at;
    reset_steps_left_ = 0;
  }

  void remove_record(int pid) {
    for (size_t i = 0; i < stored_.size(); ++i)
      if (stored_[i].pid == pid) {
        stored_.erase(stored_.begin() + static_cast<long>(i));
        break;
      }
    stored_flag_[static_cast<size_t>(pid)] = 0;
  }

  // A useful sacrifice has not stepped in the current round (its redraw is
  // still available). The target is spared only for the final reset, whose
  // entrant holds the section when the target round starts.
  bool pick_reset_pid() {
    bool final_reset = prep_done();
    std::vector<int> pool;
    for (int p = 1; p <= n_; ++p) {
      if (stored_flag_[static_cast<size_t>(p)]) continue;
      if (final_reset && p == opt_.target) continue;
      if (stepped_[static_cast<size_t>(p)]) continue;
      pool.push_back(p);
    }
    if (!final_reset) {
      std::erase(pool, opt_.target);
      if (pool.empty() && !stepped_[static_cast<size_t>(opt_.target)] &&
          !stored_flag_[static_cast<size_t>(opt_.target)])
        pool.push_back(opt_.target);
    }
    if (pool.empty()) return false;
    reset_pid_ = pool[static_cast<size_t>(rng_.uniform_below(static_cast<int>(pool.size())))];
    return true;
  }

  void bump_retry() {
    if (++retries_ > opt_.max_retries)
      throw std::runtime_error("survivor-selector: max_retries exceeded");
  }

  enum class Phase {
    Block,
    Drive,
    Reset,
    DrivePrepOnly,
    TargetSweep,
    TargetDrain,
    SurvivorPass,
    FairTail,
    Halted
  };

  int n_;
  SurvivorOptions opt_;
  Rng rng_;
  Phase phase_ = Phase::Block;
  RunWatcher w_;

  int retries_ = 0;
  int cand_ = 0;
  int cur_level_ = 0;
  std::vector<int> tests_;
  std::vector<int> block_sched_;
  size_t block_pos_ = 0;
  long block_start_run_ = 0;

  int reset_pid_ = 0;
  int reset_steps_left_ = 0;
  long reset_marker_ = 0;

  std::vector<SurvivorRecord> stored_;
  std::vector<char> stored_flag_;
  std::vector<char> stepped_;

  long steps_given_ = 0;
  long last_poke_ = 0;
  size_t poke_idx_ = 0;

  long target_round_ = 0;
  std::vector<int> sweep_;
  size_t sweep_pos_ = 0;
  int pass_ = 0;
  size_t pass_pos_ = 0;
};

}  // namespace

std::unique_ptr<Adversary> round_robin_fair(int n) {
  if (n < 1) throw std::invalid_argument("round-robin: n must be >= 1");
  return std::make_unique<RoundRobin>(n);
}

std::unique_ptr<Adversary> ordered_lockout(int n, std::vector<int> order) {
  if (n < 2) throw std::invalid_argument("ordered-lockout: n must be >= 2");
  return std::make_unique<OrderedLockout>(n, std::move(order));
}

std::vector<SurvivorLevel> default_survivor_levels(int n) {
  std::vector<SurvivorLevel> out;
  int lg = ceil_log2(n);
  for (int t = -5; t <= -1; ++t) {
    int e = lg + t;
    if (e < 0) continue;
    int s = 1 << e;
    int count = (t == -1) ? (6 * n) / 20 : n / 20;
    out.push_back({s, count});
  }
  return out;
}

std::unique_ptr<SurvivorSelector> survivor_selector(int n, SurvivorOptions opt, uint64_t seed) {
  if (n < 2) throw std::invalid_argument("survivor-selector: n must be >= 2");
  return std::make_unique<SurvivorSelectorImpl>(n, std::move(opt), seed);
}

std::unique_ptr<Adversary> restricted_random(int n, std::vector<int> participant_set,
                                             uint64_t order_seed, PostFreeOrder order,
                                             std::vector<int> fixed_order) {
  return std::make_unique<RestrictedRandom>(n, std::move(participant_set), order_seed, order,
                                            std::move(fixed_order));
}

std::unique_ptr<Adversary> inference_script(int n, bool halt_at_measurement) {
  return std::make_unique<InferenceScript>(n, halt_at_measurement);
}

std::unique_ptr<Adversary> ben_or_lockout_script(int n, bool halt_after_probe) {
  return std::make_unique<BenOrLockoutScript>(n, halt_after_probe);
}

bool is_restricted(const ExecutionTrace& t) {
  auto rs = rounds(t.run, t.params.n);
  for (const RoundView& rv : rs) {
    if (rv.free_at_start) continue;  // no pre-free phase to violate
    for (int pid : rv.participants) {
      long first = 0;
      for (long i = rv.t_start; i <= rv.t_end; ++i) {
        const Transition& tr = t.run[static_cast<size_t>(i - 1)];
        if (tr.pid == pid && (tr.to == Region::Try || tr.to == Region::Crit)) {
          first = i;
          break;
        }
      }
      if (first == 0 || first >= rv.f_k) return false;
    }
  }
  return true;
}

std::unique_ptr<Adversary> make_adversary(const std::string& name,
                                          const std::map<std::string, std::string>& args,
                                          const ProtocolParams& params, uint64_t seed) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '_', '-');
  if (key == "round-robin") return round_robin_fair(params.n);
  if (key == "ordered-lockout") {
    std::vector<int> order;
    if (auto it = args.find("order"); it != args.end()) order = parse_pid_list(it->second);
    return ordered_lockout(params.n, std::move(order));
  }
  if (key == "survivor-selector") {
    SurvivorOptions opt;
    if (auto it = args.find("levels"); it != args.end()) {
      std::stringstream ss(it->second);
      std::string item;
      while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
          throw std::invalid_argument("survivor-selector levels: want s:count");
        opt.levels.push_back(
            {std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1))});
      }
    }
    opt.fairness_interval = parse_int(args, "fairness-interval", 0);
    opt.max_retries = parse_int(args, "max-retries", 200000);
    opt.target = parse_int(args, "target", 1);
    opt.fair_completion = parse_int(args, "fair-completion", 0) != 0;
    opt.prep_only = parse_int(args, "prep-only", 0) != 0;
    return survivor_selector(params.n, std::move(opt), seed);
  }
  if (key == "restricted-random") {
    std::vector<int> set;
    if (auto it = args.find("set"); it != args.end()) {
      set = parse_pid_list(it->second);
    } else if (auto im = args.find("m"); im != args.end()) {
      int m = std::stoi(im->second);
      for (int p = 1; p <= m; ++p) set.push_back(p);
    } else {
      for (int p = 1; p <= params.n; ++p) set.push_back(p);
    }
    PostFreeOrder mode = PostFreeOrder::Shuffled;
    std::vector<int> fixed;
    if (auto it = args.find("order"); it != args.end() && it->second != "random") {
      mode = PostFreeOrder::Fixed;
      if (it->second != "fixed") fixed = parse_pid_list(it->second);
    }
    return restricted_random(params.n, std::move(set), seed, mode, std::move(fixed));
  }
  if (key == "inference-script")
    return inference_script(params.n, parse_int(args, "halt", 1) != 0);
  if (key == "ben-or-lockout")
    return ben_or_lockout_script(params.n, parse_int(args, "halt", 1) != 0);
  throw std::invalid_argument("unknown adversary: " + name);
}

std::vector<std::string> adversary_catalog() {
  return {"round-robin",       "ordered-lockout",  "survivor-selector",
          "restricted-random", "inference-script", "ben-or-lockout"};
}

}  // namespace rmx
