#pragma once

#include <optional>
#include <vector>

#include "rmx/rational.hpp"

namespace rmx {

// Finite discrete distribution with exact rational masses.
struct Dist {
  std::vector<int> support;  // strictly increasing
  std::vector<Rat> masses;   // positive, sum exactly 1

  void validate() const;  // throws std::invalid_argument
  Rat mass_at(int v) const;
  Rat cdf(int v) const;   // P[X <= v]
  Rat tail(int v) const;  // P[X >= v]
};

// Support 1..b, mass 2^-l for l < b and 2^(1-b) at b.
Dist trunc_geom(int b);

// Distribution of the maximum of s iid draws.
Dist max_of_iid(const Dist& d, int s);

// P[Max_s beta >= v] for iid geometric draws, truncated at b when given:
// 1 for v <= 1, 0 for v > b, else 1 - (1 - 2^(1-v))^s.
Rat max_tail_exact(long long s, int v, std::optional<int> b = std::nullopt);

struct ApproxTail {
  double approx = 0;       // 1 - e^(-2^(1-x))
  double error_bound = 0;  // e^(-2^(1-x)) * 4^(1-x) / s, on the complement
};
// Requires 2^(1-x)/s <= 1/2.
ApproxTail max_tail_approx(double s, double x);

// P[Max_s beta = v].
Rat max_point_mass(long long s, int v, std::optional<int> b = std::nullopt);

// Probability that m iid draws from trunc_geom(b) have a unique maximizer.
Rat unique_max_prob(int m, int b);

// X <=_L Y: P[X >= x] <= P[Y >= x] at every point.
bool stochastically_leq(const Dist& X, const Dist& Y);

// For independent A, B: P[B >= x | B <= A] <= P[B >= x] at every x in B's
// support, with the 0/0 = 0 convention when P[B <= A] = 0.
bool cond_tail_check(const Dist& B, const Dist& A);

struct SeriesBound {
  double series = 0;
  double bound = 0;
  bool holds = false;
};
// series = sum_{x>=6} (2^(1-x)/n) (1 - 2^(1-x)/r)^(eta n); bound = r/(eta n^2).
SeriesBound t34_series_bound(int n, int r, double eta);

}  // namespace rmx
