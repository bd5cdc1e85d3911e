#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rmx/experiment.hpp"

namespace rmx {

using Json = nlohmann::ordered_json;

Json rat_json(const Rat& q);
Json estimate_json(const EstimateResult& r);
Json exact_json(const ExactResult& r);
Json params_json(const ProtocolParams& p);
ProtocolParams params_from_json(const Json& j, int default_n, Variant default_variant);

struct SuiteItem {
  std::string name;
  bool pass = false;
  std::string detail;
  Json data = Json::object();
};

struct Report {
  std::string suite;
  Json config = Json::object();
  std::vector<SuiteItem> items;
  bool pass = true;
  double seconds = 0;

  Json to_json() const;
};

// Line-delimited JSON trace: a header object with params and seed, then one
// object per step. Byte-identical for identical traces.
std::string trace_to_jsonl(const ExecutionTrace& t);
void write_trace(const ExecutionTrace& t, const std::string& path);

}  // namespace rmx
