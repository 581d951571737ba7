#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "genlab/runner.hpp"

using nlohmann::json;

namespace {

struct Common {
  std::string config, profile, out_dir = "genlab-out";
  std::uint64_t seed = 0, budget = 0, trials = 0;
  unsigned workers = 1;
};

// Flag values patched into the experiment params; unset flags leave the config alone.
struct ExperimentFlags {
  std::string model, phi;
  std::vector<std::string> gens;
  json params = json::object();
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "JSON experiment config")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "seed for every experiment");
  app->add_option("--profile", c.profile, "ledger profile: scaled or paper-faithful");
  app->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  app->add_option("--budget-nodes", c.budget, "node budget for enumeration and census loops");
  app->add_option("--trials", c.trials, "instances per lemma for verify-lemmas");
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_model(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--model", f.model, "model id: free:k, z2z3, braid3, ...");
  app->add_option("--gens", f.gens, "generating words")->expected(1, -1);
  app->add_option("--phi", f.phi, "loxodromic element for the tree action");
}

template <class T>
void add_param(CLI::App* app, ExperimentFlags& f, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<T>(flag, [&f, key](const T& v) { f.params[key] = v; }, help);
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw genlab::ValidationError("config", std::string("not valid JSON: ") + e.what());
  }
}

// Keeps the config's experiments of this kind, or makes one, and applies the flags to each.
json single_kind(json cfg, const std::string& kind, const ExperimentFlags& f) {
  json kept = json::array();
  if (cfg.contains("experiments") && cfg["experiments"].is_array())
    for (const auto& e : cfg["experiments"])
      if (e.is_object() && e.value("kind", "") == kind) kept.push_back(e);
  if (kept.empty()) kept.push_back({{"kind", kind}});
  for (auto& e : kept) {
    if (!f.model.empty()) e["model"] = f.model;
    if (!f.gens.empty()) e["generators"] = f.gens;
    if (!f.phi.empty()) e["phi"] = f.phi;
    e.merge_patch(f.params);
  }
  cfg["experiments"] = kept;
  if (!cfg.contains("model")) cfg["model"] = "free:2";
  return cfg;
}

int execute(const json& raw, const Common& c) {
  genlab::RunOverrides ov;
  if (c.seed) ov.seed = c.seed;
  if (!c.profile.empty()) ov.profile = c.profile;
  if (c.budget) ov.budget_nodes = c.budget;
  if (c.trials) ov.trials = c.trials;
  const json eff = genlab::effective_config(raw, ov);
  const auto result = genlab::run_config(eff, c.workers, c.out_dir);
  for (const auto& e : result.experiments) {
    std::printf("%-28s %s%s\n", e.name.c_str(), e.kind.c_str(),
                e.suite_failed ? "  [suite failure]" : e.partial ? "  [partial]" : "");
    for (const auto& line : e.summary) std::printf("    %s\n", line.c_str());
  }
  std::printf("manifest: %s/manifest.json (%s)\n", c.out_dir.c_str(), result.manifest["status"].get<std::string>().c_str());
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Experiments on generic elements of groups acting on hyperbolic spaces"};
  app.require_subcommand(1);

  Common common;
  CLI::App* run = app.add_subcommand("run", "run every experiment in the config");
  add_common(run, common);
  run->get_option("--config")->required();

  struct Sub {
    CLI::App* app;
    std::string kind;
    ExperimentFlags flags;
  };
  std::vector<Sub> subs;
  subs.reserve(genlab::experiment_kinds().size());
  for (const auto& kind : genlab::experiment_kinds()) {
    subs.push_back({app.add_subcommand(kind, "run a single experiment of kind " + kind), kind, {}});
    Sub& s = subs.back();
    add_common(s.app, common);
    add_model(s.app, s.flags);
    if (kind == "enumerate" || kind == "classify") add_param<std::int64_t>(s.app, s.flags, "--radius", "radius", "ball radius");
    if (kind == "genericity") {
      add_param<std::int64_t>(s.app, s.flags, "--R-max", "R_max", "largest radius");
      add_param<std::string>(s.app, s.flags, "--tau-c", "tau_c", "tree translation threshold");
      add_param<std::string>(s.app, s.flags, "--tau-s", "tau_s", "word translation threshold per unit radius");
    }
    if (kind == "fibers" || kind == "probe-negligibility") {
      add_param<std::int64_t>(s.app, s.flags, "--n-lo", "n_lo", "first radius");
      add_param<std::int64_t>(s.app, s.flags, "--n-hi", "n_hi", "last radius");
    }
    if (kind == "fibers") add_param<std::int64_t>(s.app, s.flags, "--perturbation", "thick_perturbation", "A_thick base perturbation");
    if (kind == "verify-lemmas") {
      add_param<std::string>(s.app, s.flags, "--K", "K", "alignment constant");
      add_param<std::int64_t>(s.app, s.flags, "--appendix-trials", "appendix_trials", "random tree configurations");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : genlab::kExitValidation;
  }

  try {
    json cfg = read_config(common.config);
    if (!run->parsed())
      for (const auto& s : subs)
        if (s.app->parsed()) cfg = single_kind(std::move(cfg), s.kind, s.flags);
    return execute(cfg, common);
  } catch (const genlab::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return genlab::kExitValidation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
