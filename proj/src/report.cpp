#include "rmx/report.hpp"

#include <fstream>
#include <stdexcept>

namespace rmx {

Json rat_json(const Rat& q) {
  Json j = Json::object();
  j["num"] = numerator(q).str();
  j["den"] = denominator(q).str();
  j["float"] = to_double(q);
  return j;
}

Json estimate_json(const EstimateResult& r) {
  Json j = Json::object();
  j["defined"] = r.defined;
  j["estimate"] = r.estimate;
  j["ci95"] = Json::array({r.ci_lo, r.ci_hi});
  j["trials"] = r.trials;
  j["accepted"] = r.accepted;
  j["target_hits"] = r.target_hits;
  j["horizon_exhausted"] = r.horizon_exhausted;
  j["seed"] = r.seed;
  return j;
}

Json exact_json(const ExactResult& r) {
  Json j = Json::object();
  j["defined"] = r.defined;
  j["probability"] = rat_json(r.probability);
  j["leaves"] = r.leaves;
  j["cond_mass"] = rat_json(r.cond_mass);
  j["total_mass"] = rat_json(r.total_mass);
  return j;
}

Json params_json(const ProtocolParams& p) {
  Json j = Json::object();
  j["n"] = p.n;
  j["b"] = p.b;
  j["r"] = p.r;
  j["variant"] = variant_name(p.variant);
  if (p.is_ben_or()) j["ben_or_p1"] = rat_str(p.ben_or_p1);
  return j;
}

ProtocolParams params_from_json(const Json& j, int default_n, Variant default_variant) {
  int n = j.contains("n") ? j["n"].get<int>() : default_n;
  Variant v = j.contains("variant") ? variant_from_name(j["variant"].get<std::string>())
                                    : default_variant;
  ProtocolParams p = default_params(n, v);
  if (j.contains("b")) p.b = j["b"].get<int>();
  if (j.contains("r")) p.r = j["r"].get<int>();
  if (j.contains("ben_or_p1")) p.ben_or_p1 = rat_parse(j["ben_or_p1"].get<std::string>());
  p.validate();
  return p;
}

Json Report::to_json() const {
  Json j = Json::object();
  j["suite"] = suite;
  j["pass"] = pass;
  j["seconds"] = seconds;
  j["config"] = config;
  Json arr = Json::array();
  for (const SuiteItem& it : items) {
    Json e = Json::object();
    e["name"] = it.name;
    e["pass"] = it.pass;
    e["detail"] = it.detail;
    if (!it.data.empty()) e["data"] = it.data;
    arr.push_back(e);
  }
  j["items"] = arr;
  return j;
}

std::string trace_to_jsonl(const ExecutionTrace& t) {
  std::string out;
  Json header = Json::object();
  header["params"] = params_json(t.params);
  header["seed"] = t.seed;
  out += header.dump();
  out += "\n";
  for (size_t i = 0; i < t.run.size(); ++i) {
    const StepMeta& m = t.meta[i];
    Json j = Json::object();
    j["t"] = static_cast<long>(i) + 1;
    j["pid"] = m.transition.pid;
    j["old"] = region_name(m.transition.from);
    j["new"] = region_name(m.transition.to);
    j["redraw"] = m.redraw;
    if (m.drawn)
      j["drawn"] = *m.drawn;
    else
      j["drawn"] = nullptr;
    Json v = Json::object();
    v["S"] = m.v_after.S;
    v["B"] = m.v_after.B;
    v["R"] = m.v_after.R;
    j["V"] = v;
    out += j.dump();
    out += "\n";
  }
  return out;
}

void write_trace(const ExecutionTrace& t, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << trace_to_jsonl(t);
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace rmx
