#include "rmx/choices.hpp"

#include <stdexcept>

namespace rmx {

uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

int Rng::uniform_below(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_below: n must be positive");
  uint64_t un = static_cast<uint64_t>(n);
  uint64_t limit = UINT64_MAX - UINT64_MAX % un;
  uint64_t u;
  do {
    u = gen_();
  } while (u >= limit);
  return static_cast<int>(u % un);
}

bool Rng::bernoulli(const Rat& p) {
  // Exact for rational p with a denominator that fits an int.
  BigInt den = denominator(p);
  BigInt num = numerator(p);
  if (den > 1000000000) throw std::invalid_argument("bernoulli denominator too large");
  int d = den.convert_to<int>();
  int m = num.convert_to<int>();
  return uniform_below(d) < m;
}

int Rng::trunc_geom(int b) {
  if (b < 1 || b > 62) throw std::invalid_argument("trunc_geom: bad b");
  uint64_t bits = gen_();
  for (int l = 1; l < b; ++l) {
    if (bits & 1) return l;
    bits >>= 1;
  }
  return b;
}

Rat lottery_mass(const ProtocolParams& p, int value) {
  if (p.is_ben_or()) {
    if (value == 1) return p.ben_or_p1;
    if (value == 0) return Rat(1) - p.ben_or_p1;
    throw std::invalid_argument("ben-or lottery value must be 0 or 1");
  }
  if (value < 1 || value > p.b) throw std::invalid_argument("lottery value out of range");
  if (value == p.b) return pow2_inv(static_cast<unsigned>(p.b - 1));
  return pow2_inv(static_cast<unsigned>(value));
}

DrawResult RandomChoices::lottery(const ProtocolParams& p) {
  int v;
  if (p.is_ben_or()) {
    v = rng_.bernoulli(p.ben_or_p1) ? 1 : 0;
  } else {
    v = rng_.trunc_geom(p.b);
  }
  return {v, lottery_mass(p, v)};
}

DrawResult RandomChoices::round_number(const ProtocolParams& p) {
  int v = rng_.uniform_below(p.r);
  return {v, Rat(1, p.r)};
}

DrawResult ReplayChoices::take(DrawKind kind) {
  if (pos_ >= log_->size()) throw std::runtime_error("choice log exhausted during replay");
  const Draw& d = (*log_)[pos_++];
  if (d.kind != kind) throw std::runtime_error("choice log kind mismatch during replay");
  return {d.value, d.mass};
}

DrawResult ReplayChoices::lottery(const ProtocolParams&) { return take(DrawKind::Lottery); }
DrawResult ReplayChoices::round_number(const ProtocolParams&) {
  return take(DrawKind::RoundNumber);
}

DrawResult InjectedChoice::take() {
  if (used_) throw std::runtime_error("injected choice consumed twice");
  used_ = true;
  return res_;
}

}  // namespace rmx
