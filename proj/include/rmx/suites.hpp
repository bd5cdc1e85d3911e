#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmx/report.hpp"

namespace rmx {

// Canonical desk-scale verification suites. Ids: t31, t32_mechanism,
// t34_formula, t35, t36, t37, t38, appendix, infra.
std::vector<std::string> suite_ids();
Report theorem_suite(const std::string& id, uint64_t seed, int workers = 1);

}  // namespace rmx
