#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rmx/params.hpp"

namespace rmx {

// Deterministic seed derivation (splitmix64 over seed + index*golden).
uint64_t mix_seed(uint64_t seed, uint64_t index);

// Portable draws on top of mt19937_64; never uses std distributions,
// whose output is not pinned by the standard.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  uint64_t next_u64() { return gen_(); }
  int uniform_below(int n);        // unbiased, by rejection
  bool bernoulli(const Rat& p);    // exact rational coin
  int trunc_geom(int b);           // P[l] = 2^-l for l < b, P[b] = 2^(1-b)
 private:
  std::mt19937_64 gen_;
};

enum class DrawKind : uint8_t { Lottery, RoundNumber };

struct Draw {
  long step = 0;  // step index being executed when drawn (0 = during init)
  DrawKind kind = DrawKind::Lottery;
  int pid = 0;    // 0 = none (initialization draw)
  int value = 0;
  Rat mass;       // exact probability mass of this draw (or branch)
};

using ChoiceLog = std::vector<Draw>;

struct DrawResult {
  int value = 0;
  Rat mass;
};

class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;
  virtual DrawResult lottery(const ProtocolParams& p) = 0;
  virtual DrawResult round_number(const ProtocolParams& p) = 0;
};

// Exact mass of a lottery value under the given params.
Rat lottery_mass(const ProtocolParams& p, int value);

// Live sampling from a seeded stream.
class RandomChoices final : public ChoiceSource {
 public:
  explicit RandomChoices(uint64_t seed) : rng_(seed) {}
  DrawResult lottery(const ProtocolParams& p) override;
  DrawResult round_number(const ProtocolParams& p) override;
 private:
  Rng rng_;
};

// Replays a recorded log; throws on kind mismatch or exhaustion.
class ReplayChoices final : public ChoiceSource {
 public:
  explicit ReplayChoices(const ChoiceLog& log) : log_(&log) {}
  DrawResult lottery(const ProtocolParams& p) override;
  DrawResult round_number(const ProtocolParams& p) override;
  size_t consumed() const { return pos_; }
 private:
  DrawResult take(DrawKind kind);
  const ChoiceLog* log_;
  size_t pos_ = 0;
};

// Hands out one predetermined draw; used by the exact enumerator.
class InjectedChoice final : public ChoiceSource {
 public:
  InjectedChoice(int value, Rat mass) : res_{value, std::move(mass)} {}
  DrawResult lottery(const ProtocolParams&) override { return take(); }
  DrawResult round_number(const ProtocolParams&) override { return take(); }
 private:
  DrawResult take();
  DrawResult res_;
  bool used_ = false;
};

}  // namespace rmx
