#pragma once

#include <string>

#include "rmx/rational.hpp"

namespace rmx {

enum class Variant { RabinOptimized, RabinDeoptimized, BenOr };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& s);

inline int ceil_log2(int n) {
  int k = 0;
  while ((1LL << k) < n) ++k;
  return k;
}

// Protocol configuration. For the boolean variant the lottery is {0,1}
// (b is fixed to 1 as a marker) and the round alphabet is {0,1}.
struct ProtocolParams {
  int n = 1;
  int b = 2;
  int r = 100;
  Variant variant = Variant::RabinOptimized;
  Rat ben_or_p1 = Rat(1, 2);  // P[lottery draw = 1], boolean variant only

  bool is_ben_or() const { return variant == Variant::BenOr; }
  void validate() const;  // throws std::invalid_argument
};

// b = ceil(log2 n) + 4 and r = 100 for the rabin variants; boolean lottery
// and r = 2 for ben-or.
ProtocolParams default_params(int n, Variant variant);

}  // namespace rmx
