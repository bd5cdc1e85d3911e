#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rmx/params.hpp"

namespace rmx {

enum class Region : uint8_t { Rem, Try, Crit, Exit };

std::string region_name(Region r);
Region region_from_name(const std::string& s);

// Sentinel for "no remembered round number".
constexpr int kNoRound = -1;

struct SharedVariable {
  int S = 0;
  int B = 0;
  int R = 0;
  bool operator==(const SharedVariable&) const = default;
};

struct LocalState {
  int B = 1;
  int R = kNoRound;
  Region region = Region::Rem;
};

struct SystemState {
  ProtocolParams params;
  SharedVariable V;
  std::vector<LocalState> locals;  // index 0 unused, pids are 1..n
  long step_count = 0;

  const LocalState& local(int pid) const { return locals[static_cast<size_t>(pid)]; }
  LocalState& local(int pid) { return locals[static_cast<size_t>(pid)]; }

  int crit_or_exit_count() const;
  // At most one process in Crit/Exit, and V.S = 1 exactly when there is one.
  bool mutex_ok() const;
};

}  // namespace rmx
