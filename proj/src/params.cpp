#include "rmx/params.hpp"

#include <stdexcept>

#include "rmx/state.hpp"

namespace rmx {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::RabinOptimized: return "rabin-optimized";
    case Variant::RabinDeoptimized: return "rabin-deoptimized";
    case Variant::BenOr: return "ben-or";
  }
  return "?";
}

Variant variant_from_name(const std::string& s) {
  if (s == "rabin-optimized") return Variant::RabinOptimized;
  if (s == "rabin-deoptimized") return Variant::RabinDeoptimized;
  if (s == "ben-or") return Variant::BenOr;
  throw std::invalid_argument("unknown variant: " + s);
}

void ProtocolParams::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (is_ben_or()) {
    if (r != 2) throw std::invalid_argument("ben-or requires r = 2");
    if (b != 1) throw std::invalid_argument("ben-or uses the boolean lottery (b = 1)");
    if (ben_or_p1 < 0 || ben_or_p1 > 1)
      throw std::invalid_argument("ben_or_p1 must be in [0,1]");
  } else {
    if (r < 2) throw std::invalid_argument("r must be >= 2");
    if (b < 2) throw std::invalid_argument("b must be >= 2");
    if (b > 62) throw std::invalid_argument("b must be <= 62");
  }
}

ProtocolParams default_params(int n, Variant variant) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  ProtocolParams p;
  p.n = n;
  p.variant = variant;
  if (variant == Variant::BenOr) {
    p.b = 1;
    p.r = 2;
  } else {
    p.b = ceil_log2(n) + 4;
    p.r = 100;
  }
  p.validate();
  return p;
}

std::string region_name(Region r) {
  switch (r) {
    case Region::Rem: return "Rem";
    case Region::Try: return "Try";
    case Region::Crit: return "Crit";
    case Region::Exit: return "Exit";
  }
  return "?";
}

Region region_from_name(const std::string& s) {
  if (s == "Rem") return Region::Rem;
  if (s == "Try") return Region::Try;
  if (s == "Crit") return Region::Crit;
  if (s == "Exit") return Region::Exit;
  throw std::invalid_argument("unknown region: " + s);
}

int SystemState::crit_or_exit_count() const {
  int c = 0;
  for (int pid = 1; pid <= params.n; ++pid) {
    Region r = local(pid).region;
    if (r == Region::Crit || r == Region::Exit) ++c;
  }
  return c;
}

bool SystemState::mutex_ok() const {
  int c = crit_or_exit_count();
  return c <= 1 && (V.S == 1) == (c == 1);
}

Rat rat_parse(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(BigInt(s));
  return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

}  // namespace rmx
