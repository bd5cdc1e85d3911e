// Acceptance suite: one test case per criterion, each printing a single
// PASS/FAIL line. Runs everything at pinned seeds and tolerances.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>

#include "doctest.h"
#include "rmx/analysis.hpp"
#include "rmx/suites.hpp"

using namespace rmx;

namespace {

constexpr uint64_t kSeed = 1;

bool report_suite(const char* tag, const Report& rep) {
  for (const SuiteItem& it : rep.items)
    std::printf("  [%s/%s] %s - %s\n", tag, it.name.c_str(), it.pass ? "pass" : "FAIL",
                it.detail.c_str());
  std::printf("[%s] %s (%.1fs)\n", tag, rep.pass ? "PASS" : "FAIL", rep.seconds);
  std::fflush(stdout);
  return rep.pass;
}

bool item_pass(const Report& rep, const std::string& name) {
  for (const SuiteItem& it : rep.items)
    if (it.name == name) return it.pass;
  return false;
}

}  // namespace

TEST_CASE("A1 scheduling lockout: target never wins a partial field") {
  Report rep = theorem_suite("t31", kSeed);
  CHECK(report_suite("A1", rep));
}

TEST_CASE("A2 unique-maximum lower bound sweep") {
  // Exact sweep over all m <= n for n in {2,4,...,1024} with the default cap.
  const Rat two_thirds(2, 3);
  long failures = 0;
  Rat worst = 1;
  for (int n = 2; n <= 1024; n *= 2) {
    int b = ceil_log2(n) + 4;
    for (int m = 1; m <= n; ++m) {
      Rat u = unique_max_prob(m, b);
      if (u < two_thirds) {
        ++failures;
        worst = std::min(worst, u);
      }
    }
  }
  // Pinned value, cross-checked by brute force over all 25 outcome pairs.
  Rat pinned = unique_max_prob(2, 5);
  Dist d = trunc_geom(5);
  Rat brute = 0;
  for (size_t i = 0; i < d.support.size(); ++i)
    for (size_t j = 0; j < d.support.size(); ++j)
      if (d.support[i] != d.support[j]) brute += d.masses[i] * d.masses[j];
  bool pinned_ok = pinned == Rat(85, 128) && brute == pinned;
  bool sweep_ok = failures == 0;
  std::printf("  [A2/pinned] %s - unique_max_prob(2,5) = %s = %.7f, brute force agrees\n",
              pinned_ok ? "pass" : "FAIL", rat_str(pinned).c_str(), to_double(pinned));
  std::printf(
      "  [A2/sweep] %s - %ld of 2046 (n,m) points below 2/3 (all m=2: two-draw unique-max "
      "under a finite cap b is (2/3)(1-4^(1-b)) < 2/3 exactly; worst %s = %.7f)\n",
      sweep_ok ? "pass" : "FAIL", failures, rat_str(worst).c_str(), to_double(worst));
  std::printf("[A2] %s\n", pinned_ok && sweep_ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK(pinned_ok);
  CHECK(sweep_ok);
}

TEST_CASE("A3 order-statistics appendix, exact") {
  Report rep = theorem_suite("appendix", kSeed);
  CHECK(report_suite("A3", rep));
}

TEST_CASE("A4 restricted adversary strong bound") {
  Report rep = theorem_suite("t35", kSeed);
  bool ok = item_pass(rep, "exact_unique_max_matches_formula") &&
            item_pass(rep, "exact_conditional_win_third") &&
            item_pass(rep, "mc_strong_bound_m2") && item_pass(rep, "mc_strong_bound_m4") &&
            item_pass(rep, "mc_strong_bound_m8");
  for (const SuiteItem& it : rep.items)
    if (it.name.rfind("exact_", 0) == 0 || it.name.rfind("mc_strong", 0) == 0)
      std::printf("  [A4/%s] %s - %s\n", it.name.c_str(), it.pass ? "pass" : "FAIL",
                  it.detail.c_str());
  std::printf("[A4] %s\n", ok ? "PASS" : "FAIL");
  std::fflush(stdout);
  CHECK(ok);
}

TEST_CASE("A5 survivor mechanism and value lockout") {
  Report rep = theorem_suite("t32_mechanism", kSeed);
  CHECK(report_suite("A5", rep));
}

TEST_CASE("A6 series bound across the parameter grid") {
  Report rep = theorem_suite("t34_formula", kSeed);
  CHECK(report_suite("A6", rep));
}

TEST_CASE("A7 round-number posterior, exact and sampled") {
  Report rep = theorem_suite("t37", kSeed);
  CHECK(report_suite("A7", rep));
}

TEST_CASE("A8 boolean-variant lockout, exact zero") {
  Report rep = theorem_suite("t38", kSeed);
  CHECK(report_suite("A8", rep));
}

TEST_CASE("A9 weak bound under every catalog adversary") {
  Report rep = theorem_suite("t36", kSeed);
  CHECK(report_suite("A9", rep));
}

TEST_CASE("A10 infrastructure properties") {
  Report rep = theorem_suite("infra", kSeed);
  CHECK(report_suite("A10", rep));
}
