#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "rmx/analysis.hpp"
#include "rmx/suites.hpp"

namespace {

using namespace rmx;

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
  int n = 8;
  int b = 0;  // 0 = default for n/variant
  int r = 0;
  std::string variant = "rabin-optimized";
  std::string adversary = "round-robin";
  std::vector<std::string> adversary_args;
  std::string target;
  std::string condition;
  int k = 0;
  int i = 0;
  int m = 0;
  long trials = 10000;
  long horizon = 10000;
  uint64_t seed = 1;
  bool seed_set = false;
  int workers = 1;
  std::string config_path;
  std::string out;
  std::string format = "json";
};

uint64_t env_default_seed() {
  if (const char* s = std::getenv("RMX_SEED")) return std::strtoull(s, nullptr, 10);
  return 1;
}

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--n", o.n, "process count");
  cmd->add_option("--b", o.b, "lottery value cap (default: ceil(log2 n)+4)");
  cmd->add_option("--r", o.r, "round-number alphabet size (default: 100)");
  cmd->add_option("--variant", o.variant,
                  "rabin-optimized | rabin-deoptimized | ben-or");
  cmd->add_option("--adversary", o.adversary, "scheduler from the catalog (see `list`)");
  cmd->add_option("--adversary-arg", o.adversary_args, "extra key=value for the adversary")
      ->take_all();
  cmd->add_option("--target", o.target, "target event predicate");
  cmd->add_option("--condition", o.condition, "conditioning predicate");
  cmd->add_option("--k", o.k, "round index shorthand for --target/--condition");
  cmd->add_option("--i", o.i, "process id shorthand");
  cmd->add_option("--m", o.m, "participant count shorthand");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cmd->add_option("--horizon", o.horizon, "max steps per trial");
  cmd->add_option("--seed", o.seed, "master seed (default: $RMX_SEED or 1)")
      ->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_option("--workers", o.workers, "parallel workers (never changes results)");
  cmd->add_option("--config", o.config_path, "JSON config file; flags override it");
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "json | csv");
}

void apply_config_file(CommonOpts& o, const CLI::App* cmd) {
  if (o.config_path.empty()) return;
  std::ifstream f(o.config_path);
  if (!f) throw std::runtime_error("cannot read config: " + o.config_path);
  Json j = Json::parse(f);
  auto unset = [&](const std::string& flag) { return cmd->count(flag) == 0; };
  if (j.contains("n") && unset("--n")) o.n = j["n"].get<int>();
  if (j.contains("b") && unset("--b")) o.b = j["b"].get<int>();
  if (j.contains("r") && unset("--r")) o.r = j["r"].get<int>();
  if (j.contains("variant") && unset("--variant")) o.variant = j["variant"].get<std::string>();
  if (j.contains("adversary") && unset("--adversary")) {
    if (j["adversary"].is_object()) {
      o.adversary = j["adversary"]["name"].get<std::string>();
      if (j["adversary"].contains("args"))
        for (auto& [key, val] : j["adversary"]["args"].items())
          o.adversary_args.push_back(key + "=" + val.get<std::string>());
    } else {
      o.adversary = j["adversary"].get<std::string>();
    }
  }
  if (j.contains("target") && unset("--target")) o.target = j["target"].get<std::string>();
  if (j.contains("condition") && unset("--condition"))
    o.condition = j["condition"].get<std::string>();
  if (j.contains("trials") && unset("--trials")) o.trials = j["trials"].get<long>();
  if (j.contains("horizon") && unset("--horizon")) o.horizon = j["horizon"].get<long>();
  if (j.contains("seed") && unset("--seed")) {
    o.seed = j["seed"].get<uint64_t>();
    o.seed_set = true;
  }
  if (j.contains("workers") && unset("--workers")) o.workers = j["workers"].get<int>();
  if (j.contains("out") && unset("--out")) o.out = j["out"].get<std::string>();
  if (j.contains("format") && unset("--format")) o.format = j["format"].get<std::string>();
}

ExperimentSpec build_spec(const CommonOpts& o) {
  ExperimentSpec spec;
  spec.params = default_params(o.n, variant_from_name(o.variant));
  if (o.b > 0) spec.params.b = o.b;
  if (o.r > 0) spec.params.r = o.r;
  spec.params.validate();
  spec.adversary.name = o.adversary;
  for (const std::string& kv : o.adversary_args) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--adversary-arg wants key=value, got " + kv);
    spec.adversary.args[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  spec.horizon = o.horizon;
  spec.trials = o.trials;
  spec.seed = o.seed_set ? o.seed : env_default_seed();

  std::string target = o.target;
  std::string condition = o.condition;
  if (target.empty() && o.i > 0 && o.k > 0)
    target = "wins(i=" + std::to_string(o.i) + ",k=" + std::to_string(o.k) + ")";
  if (condition.empty()) {
    std::string c;
    if (o.i > 0 && o.k > 0)
      c = "participates(i=" + std::to_string(o.i) + ",k=" + std::to_string(o.k) + ")";
    if (o.m > 0 && o.k > 0)
      c += std::string(c.empty() ? "" : " & ") + "pcount(k=" + std::to_string(o.k) +
           ",m=" + std::to_string(o.m) + ")";
    condition = c;
  }
  if (!target.empty()) spec.target = parse_predicate(target);
  if (!condition.empty()) spec.condition = parse_predicate(condition);
  return spec;
}

Json spec_config_json(const ExperimentSpec& spec, const CommonOpts& o) {
  Json j = Json::object();
  j["params"] = params_json(spec.params);
  Json adv = Json::object();
  adv["name"] = spec.adversary.name;
  Json args = Json::object();
  for (auto& [k, v] : spec.adversary.args) args[k] = v;
  adv["args"] = args;
  j["adversary"] = adv;
  j["condition"] = spec.condition.source;
  j["target"] = spec.target.source;
  j["horizon"] = spec.horizon;
  j["trials"] = spec.trials;
  j["seed"] = spec.seed;
  j["workers"] = o.workers;
  return j;
}

void emit(const std::string& text, const CommonOpts& o) {
  if (o.out.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + o.out);
  f << text << "\n";
}

std::string csv_from_flat_json(const Json& j) {
  std::string head, row;
  for (auto& [key, val] : j.items()) {
    if (val.is_object() || val.is_array()) continue;
    if (!head.empty()) {
      head += ",";
      row += ",";
    }
    head += key;
    row += val.is_string() ? val.get<std::string>() : val.dump();
  }
  return head + "\n" + row;
}

int cmd_simulate(CommonOpts& o) {
  ExperimentSpec spec = build_spec(o);
  auto adv = spec.build_adversary(mix_seed(spec.seed ^ 0xADA0ADA0ADA0ADA0ULL, 2));
  ExecutionTrace t = run_trial(spec.params, *adv, spec.horizon, spec.seed);
  std::string text = trace_to_jsonl(t);
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + o.out);
    f << text;
  }
  return kExitPass;
}

int cmd_estimate(CommonOpts& o) {
  ExperimentSpec spec = build_spec(o);
  EstimateResult r = estimate(spec, o.workers);
  Json j = Json::object();
  j["config"] = spec_config_json(spec, o);
  j["result"] = estimate_json(r);
  emit(o.format == "csv" ? csv_from_flat_json(j["result"]) : j.dump(2), o);
  if (!r.defined) {
    std::cerr << "estimate undefined: no trial satisfied the condition\n";
    return kExitRuntime;
  }
  return kExitPass;
}

int cmd_exact(CommonOpts& o, uint64_t max_leaves) {
  ExperimentSpec spec = build_spec(o);
  spec.mode = ExperimentSpec::Mode::Exact;
  spec.max_leaves = max_leaves;
  ExactResult r = enumerate_exact(spec);
  Json j = Json::object();
  j["config"] = spec_config_json(spec, o);
  j["result"] = exact_json(r);
  emit(o.format == "csv" ? csv_from_flat_json(j["result"]["probability"]) : j.dump(2), o);
  if (!r.defined) {
    std::cerr << "exact result undefined: conditioning mass is zero\n";
    return kExitRuntime;
  }
  return kExitPass;
}

int cmd_verify(const std::string& id, CommonOpts& o) {
  Report rep = theorem_suite(id, o.seed_set ? o.seed : env_default_seed(), o.workers);
  for (const SuiteItem& it : rep.items)
    std::cout << "[" << rep.suite << "/" << it.name << "] " << (it.pass ? "PASS" : "FAIL")
              << " - " << it.detail << "\n";
  std::cout << "[" << rep.suite << "] " << (rep.pass ? "PASS" : "FAIL") << " ("
            << rep.items.size() << " checks, " << rep.seconds << "s)\n";
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + o.out);
    f << rep.to_json().dump(2) << "\n";
  }
  return rep.pass ? kExitPass : kExitCheckFailed;
}

int cmd_list() {
  std::cout << "adversaries:\n";
  for (const std::string& a : adversary_catalog()) std::cout << "  " << a << "\n";
  std::cout << "predicates:\n"
            << "  wins(i,k) participates(i,k) pcount(k,m) new_values(k) unique_max(k)\n"
            << "  round_complete(k) rnum_differs(k,j) rnum_equal(k,j) prefix true false\n"
            << "  (k accepts @target; atoms join with '&', negate with '!')\n";
  std::cout << "verify suites:\n ";
  for (const std::string& s : suite_ids()) std::cout << " " << s;
  std::cout << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "rmx - randomized mutual-exclusion laboratory: simulator, adversary catalog,\n"
      "Monte Carlo estimation and exact probability enumeration"};
  app.require_subcommand(1);

  CommonOpts sim_o, est_o, exa_o, ver_o;
  uint64_t max_leaves = 4000000;

  CLI::App* sim = app.add_subcommand("simulate", "run one trace and emit it as JSON lines");
  add_common(sim, sim_o);

  CLI::App* est = app.add_subcommand("estimate", "Monte Carlo conditional estimate");
  add_common(est, est_o);

  CLI::App* exa = app.add_subcommand("exact", "exact conditional probability by enumeration");
  add_common(exa, exa_o);
  exa->add_option("--max-leaves", max_leaves, "enumeration leaf cap");

  CLI::App* dist = app.add_subcommand("dist", "distribution and bound queries");
  dist->require_subcommand(1);
  struct DistOpts {
    long long s = 1;
    int v = 2;
    int b = 0;
    int m = 2;
    int n = 1024;
    int r = 100;
    double eta = 0.3;
    int ab = 5;
    int bb = 5;
    std::string out, format = "json";
  } d_o;
  CLI::App* dg = dist->add_subcommand("trunc-geom", "the truncated lottery distribution");
  dg->add_option("--b", d_o.b)->required();
  CLI::App* mt = dist->add_subcommand("max-tail", "P[max of s draws >= v]");
  mt->add_option("--s", d_o.s)->required();
  mt->add_option("--v", d_o.v)->required();
  mt->add_option("--b", d_o.b);
  CLI::App* mp = dist->add_subcommand("max-point", "P[max of s draws = v]");
  mp->add_option("--s", d_o.s)->required();
  mp->add_option("--v", d_o.v)->required();
  mp->add_option("--b", d_o.b);
  CLI::App* um = dist->add_subcommand("unique-max", "P[unique maximizer among m draws]");
  um->add_option("--m", d_o.m)->required();
  um->add_option("--b", d_o.b)->required();
  CLI::App* tb = dist->add_subcommand("t34-bound", "dyadic series vs r/(eta n^2)");
  tb->add_option("--n", d_o.n)->required();
  tb->add_option("--r", d_o.r)->required();
  tb->add_option("--eta", d_o.eta);
  CLI::App* ct = dist->add_subcommand("cond-tail", "conditional tail check for two lotteries");
  ct->add_option("--bb", d_o.bb, "cap of the conditioned lottery B")->required();
  ct->add_option("--ab", d_o.ab, "cap of the bounding lottery A")->required();

  CLI::App* ver = app.add_subcommand("verify", "run a named verification suite");
  std::string suite_id;
  ver->add_option("suite", suite_id, "one of the suite ids (see `list`)")->required();
  add_common(ver, ver_o);

  app.add_subcommand("list", "list adversaries, predicates and suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (sim->parsed()) {
      apply_config_file(sim_o, sim);
      return cmd_simulate(sim_o);
    }
    if (est->parsed()) {
      apply_config_file(est_o, est);
      return cmd_estimate(est_o);
    }
    if (exa->parsed()) {
      apply_config_file(exa_o, exa);
      return cmd_exact(exa_o, max_leaves);
    }
    if (dist->parsed()) {
      Json j = Json::object();
      bool holds = true;
      if (dg->parsed()) {
        Dist d = trunc_geom(d_o.b);
        Json arr = Json::array();
        for (size_t idx = 0; idx < d.support.size(); ++idx) {
          Json e = Json::object();
          e["value"] = d.support[idx];
          e["mass"] = rat_json(d.masses[idx]);
          arr.push_back(e);
        }
        j["dist"] = arr;
      } else if (mt->parsed()) {
        std::optional<int> b = d_o.b > 0 ? std::optional<int>(d_o.b) : std::nullopt;
        j["tail"] = rat_json(max_tail_exact(d_o.s, d_o.v, b));
      } else if (mp->parsed()) {
        std::optional<int> b = d_o.b > 0 ? std::optional<int>(d_o.b) : std::nullopt;
        j["mass"] = rat_json(max_point_mass(d_o.s, d_o.v, b));
      } else if (um->parsed()) {
        j["unique_max"] = rat_json(unique_max_prob(d_o.m, d_o.b));
      } else if (tb->parsed()) {
        SeriesBound sb = t34_series_bound(d_o.n, d_o.r, d_o.eta);
        j["series"] = sb.series;
        j["bound"] = sb.bound;
        j["holds"] = sb.holds;
        holds = sb.holds;
      } else if (ct->parsed()) {
        bool ok = cond_tail_check(trunc_geom(d_o.bb), trunc_geom(d_o.ab));
        j["holds"] = ok;
        holds = ok;
      }
      std::cout << j.dump(2) << "\n";
      return holds ? kExitPass : kExitCheckFailed;
    }
    if (ver->parsed()) {
      apply_config_file(ver_o, ver);
      return cmd_verify(suite_id, ver_o);
    }
    return cmd_list();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
