#include "rmx/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rmx {

void Dist::validate() const {
  if (support.size() != masses.size() || support.empty())
    throw std::invalid_argument("Dist: support/masses mismatch");
  Rat sum = 0;
  for (size_t i = 0; i < support.size(); ++i) {
    if (i > 0 && support[i] <= support[i - 1])
      throw std::invalid_argument("Dist: support must be strictly increasing");
    if (masses[i] <= 0) throw std::invalid_argument("Dist: masses must be positive");
    sum += masses[i];
  }
  if (sum != 1) throw std::invalid_argument("Dist: masses must sum to 1");
}

Rat Dist::mass_at(int v) const {
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i] == v) return masses[i];
  return Rat(0);
}

Rat Dist::cdf(int v) const {
  Rat sum = 0;
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i] <= v) sum += masses[i];
  return sum;
}

Rat Dist::tail(int v) const {
  Rat sum = 0;
  for (size_t i = 0; i < support.size(); ++i)
    if (support[i] >= v) sum += masses[i];
  return sum;
}

Dist trunc_geom(int b) {
  if (b < 1) throw std::invalid_argument("trunc_geom: b must be >= 1");
  Dist d;
  for (int l = 1; l <= b; ++l) {
    d.support.push_back(l);
    d.masses.push_back(l < b ? pow2_inv(static_cast<unsigned>(l))
                             : pow2_inv(static_cast<unsigned>(b - 1)));
  }
  d.validate();
  return d;
}

Dist max_of_iid(const Dist& d, int s) {
  if (s < 1) throw std::invalid_argument("max_of_iid: s must be >= 1");
  Dist out;
  Rat prev_cdf_pow = 0;
  for (size_t i = 0; i < d.support.size(); ++i) {
    Rat c = d.cdf(d.support[i]);
    Rat cp = rat_pow(c, static_cast<unsigned long>(s));
    Rat mass = cp - prev_cdf_pow;
    if (mass > 0) {
      out.support.push_back(d.support[i]);
      out.masses.push_back(mass);
    }
    prev_cdf_pow = cp;
  }
  out.validate();
  return out;
}

Rat max_tail_exact(long long s, int v, std::optional<int> b) {
  if (s < 1) throw std::invalid_argument("max_tail_exact: s must be >= 1");
  if (v <= 1) return Rat(1);
  if (b && v > *b) return Rat(0);
  Rat single_below = Rat(1) - pow2_inv(static_cast<unsigned>(v - 1));
  return Rat(1) - rat_pow(single_below, static_cast<unsigned long>(s));
}

ApproxTail max_tail_approx(double s, double x) {
  double z = std::pow(2.0, 1.0 - x);
  if (z / s > 0.5) throw std::invalid_argument("max_tail_approx: requires 2^(1-x)/s <= 1/2");
  ApproxTail out;
  out.approx = 1.0 - std::exp(-z);
  out.error_bound = std::exp(-z) * std::pow(4.0, 1.0 - x) / s;
  return out;
}

Rat max_point_mass(long long s, int v, std::optional<int> b) {
  return max_tail_exact(s, v, b) - max_tail_exact(s, v + 1, b);
}

Rat unique_max_prob(int m, int b) {
  if (m < 1) throw std::invalid_argument("unique_max_prob: m must be >= 1");
  Dist d = trunc_geom(b);
  Rat total = 0;
  Rat cdf_below = 0;
  for (size_t i = 0; i < d.support.size(); ++i) {
    total += Rat(m) * d.masses[i] * rat_pow(cdf_below, static_cast<unsigned long>(m - 1));
    cdf_below += d.masses[i];
  }
  return total;
}

bool stochastically_leq(const Dist& X, const Dist& Y) {
  std::vector<int> points;
  points.insert(points.end(), X.support.begin(), X.support.end());
  points.insert(points.end(), Y.support.begin(), Y.support.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  for (int v : points)
    if (X.tail(v) > Y.tail(v)) return false;
  return true;
}

bool cond_tail_check(const Dist& B, const Dist& A) {
  // P[B <= A] and, per threshold x, P[B >= x and B <= A]; all exact.
  Rat p_le = 0;
  for (size_t i = 0; i < B.support.size(); ++i)
    p_le += B.masses[i] * A.tail(B.support[i]);
  for (int x : B.support) {
    Rat joint = 0;
    for (size_t i = 0; i < B.support.size(); ++i)
      if (B.support[i] >= x) joint += B.masses[i] * A.tail(B.support[i]);
    // 0/0 = 0 convention when the conditioning event is null.
    Rat lhs_num = joint;
    Rat rhs = B.tail(x);
    if (p_le == 0) {
      if (!(Rat(0) <= rhs)) return false;
      continue;
    }
    if (lhs_num > rhs * p_le) return false;  // joint/p_le <= rhs
  }
  return true;
}

SeriesBound t34_series_bound(int n, int r, double eta) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("t34_series_bound: n must be a power of two");
  if (r < 2) throw std::invalid_argument("t34_series_bound: r must be >= 2");
  if (eta <= 0 || eta > 1) throw std::invalid_argument("t34_series_bound: eta in (0,1]");
  SeriesBound out;
  double sum = 0;
  for (int x = 6;; ++x) {
    double z = std::pow(2.0, 1.0 - x);
    double term = (z / n) * std::pow(1.0 - z / r, eta * n);
    sum += term;
    if (term < 1e-18 * std::max(sum, 1e-300) && x > 70) break;
    if (x > 4000) break;
  }
  out.series = sum;
  out.bound = static_cast<double>(r) / (eta * static_cast<double>(n) * static_cast<double>(n));
  out.holds = out.series <= out.bound;
  return out;
}

}  // namespace rmx
