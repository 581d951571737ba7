#include "genlab/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "genlab/census.hpp"
#include "genlab/contraction.hpp"
#include "genlab/lemma_verify.hpp"

namespace genlab {

using nlohmann::json;

namespace {

// ---- config validation

std::string field(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "expected an object");
  return j;
}

void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ValidationError(field(path, key), "unknown field");
}

std::int64_t get_int(const json& j, const std::string& key, const std::string& path, std::int64_t def,
                     std::int64_t lo = 0) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(field(path, key), "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < lo) throw ValidationError(field(path, key), "must be at least " + std::to_string(lo));
  return x;
}

bool get_bool(const json& j, const std::string& key, const std::string& path, bool def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_boolean()) throw ValidationError(field(path, key), "expected a boolean");
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const std::string& key, const std::string& path, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_string()) throw ValidationError(field(path, key), "expected a string");
  return j.at(key).get<std::string>();
}

Rational get_rational(const json& j, const std::string& key, const std::string& path, const Rational& def) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return parse_rational(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ValidationError(field(path, key), e.what());
  }
  throw ValidationError(field(path, key), "expected an integer or a rational string such as \"1/5\"");
}

json merged(const json& base, const json& over) {
  json out = base.is_null() ? json::object() : base;
  if (!over.is_null()) out.merge_patch(over);
  return out;
}

struct KindSpec {
  std::string kind;
  json params;          // defaults
  json ledger;          // kind-specific ledger defaults
  bool needs_lab = true;
};

const std::vector<KindSpec>& kind_specs() {
  static const std::vector<KindSpec> specs = {
      {"enumerate", {{"radius", 8}}, json::object(), false},
      {"classify", {{"radius", 6}}, json::object(), true},
      {"genericity", {{"R_max", 8}, {"tau_c", "0"}, {"tau_s", nullptr}, {"translation_power", 8}}, json::object(), true},
      {"fibers", {{"n_lo", 8}, {"n_hi", 14}, {"thick_perturbation", 0}, {"exclude_thick", true}}, json::object(), true},
      {"verify-lemmas",
       {{"instances", 1000},
        {"K", "3"},
        {"max_segments", 4},
        {"extra_length", 3},
        {"appendix_trials", 10000},
        {"appendix_exhaustive", true}},
       {{"L_map", 8}, {"block_length", 20}},
       true},
      {"probe-negligibility", {{"n_lo", 4}, {"n_hi", 12}}, json::object(), true},
  };
  return specs;
}

const KindSpec& spec_for(const std::string& kind, const std::string& path) {
  for (const auto& s : kind_specs())
    if (s.kind == kind) return s;
  throw ValidationError(path, "unknown experiment kind '" + kind + "'");
}

// The braid metric has no closed form, so its norm oracle uses a smaller ball and search radius.
json default_ledger(const std::string& model) {
  const bool braid = model == "braid3";
  const int radius = braid ? 5 : 6;
  return {{"K_map", "auto"},
          {"L_map", 2},
          {"block_length", 3},
          {"threshold_rule", {{"midpoint", "2"}, {"chain", "3"}, {"exponent", 1}}},
          {"measure",
           {{"ball_radius", radius},
            {"r_max", braid ? 14 : 30},
            {"sample_radius", radius},
            {"segment_length", 3},
            {"samples", 50},
            {"wpd_radius", radius}}}};
}

json normalize_ledger(const json& raw, const std::string& path) {
  require_object(raw, path);
  reject_unknown(raw, path, {"K_map", "L_map", "block_length", "threshold_rule", "measure"});
  json out;
  if (raw.at("K_map") == "auto")
    out["K_map"] = "auto";
  else
    out["K_map"] = to_string(get_rational(raw, "K_map", path, 0));
  out["L_map"] = get_int(raw, "L_map", path, 2, 1);
  out["block_length"] = get_int(raw, "block_length", path, 3, 1);
  const std::string rp = field(path, "threshold_rule");
  const json& rule = require_object(raw.at("threshold_rule"), rp);
  reject_unknown(rule, rp, {"midpoint", "chain", "exponent"});
  out["threshold_rule"] = {{"midpoint", to_string(get_rational(rule, "midpoint", rp, 2))},
                           {"chain", to_string(get_rational(rule, "chain", rp, 3))},
                           {"exponent", get_int(rule, "exponent", rp, 1)}};
  const std::string mp = field(path, "measure");
  const json& m = require_object(raw.at("measure"), mp);
  reject_unknown(m, mp, {"ball_radius", "r_max", "sample_radius", "segment_length", "samples", "wpd_radius"});
  json mo;
  for (const char* key : {"ball_radius", "r_max", "sample_radius", "segment_length", "samples", "wpd_radius"})
    mo[key] = get_int(m, key, mp, 0, 1);
  out["measure"] = mo;
  return out;
}

Windows profile_windows(LedgerProfile p) {
  Windows w;
  if (p == LedgerProfile::kScaled) {
    w.replace_lo = Rational(1, 5);
    w.replace_hi = Rational(2, 5);
  }
  return w;
}

// Generator words must parse and be nontrivial; reported with the offending word.
void validate_generators(const GroupModel& group, const json& gens, const std::string& path) {
  if (!gens.is_array()) throw ValidationError(path, "expected a list of words");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string p = index(path, i);
    if (!gens[i].is_string()) throw ValidationError(p, "expected a word");
    const auto word = gens[i].get<std::string>();
    Word w;
    try {
      w = group.alphabet().parse(word);
    } catch (const std::exception& e) {
      throw ValidationError(p, e.what());
    }
    if (group.normalize(w).empty()) throw ValidationError(p, "generator word '" + word + "' is trivial");
  }
}

json normalize_experiment(const json& top, const json& raw, std::size_t i, const RunOverrides& ov) {
  const std::string path = index("experiments", i);
  require_object(raw, path);
  const std::string kind = get_string(raw, "kind", path, "");
  if (kind.empty()) throw ValidationError(field(path, "kind"), "missing experiment kind");
  const KindSpec& spec = spec_for(kind, field(path, "kind"));

  std::set<std::string> allowed{"kind", "name", "model", "generators", "phi", "profile", "ledger", "windows", "seed",
                                "budget_nodes"};
  for (const auto& [key, value] : spec.params.items()) allowed.insert(key);
  reject_unknown(raw, path, allowed);

  json e;
  e["kind"] = kind;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu-", i);
  e["name"] = get_string(raw, "name", path, buf + kind);
  const std::string name = e["name"];
  if (name.empty() || name.find_first_of("/\\") != std::string::npos || name[0] == '.')
    throw ValidationError(field(path, "name"), "must be a plain file stem");

  static const json absent;
  auto inherit = [&](const char* key) -> const json& {
    return raw.contains(key) ? raw.at(key) : top.contains(key) ? top.at(key) : absent;
  };
  auto where = [&](const char* key) { return raw.contains(key) ? field(path, key) : std::string(key); };

  const json& model = inherit("model");
  if (!model.is_string()) throw ValidationError(where("model"), "expected a model id such as \"free:2\"");
  e["model"] = model;
  std::unique_ptr<GroupModel> group;
  try {
    group = make_model(model.get<std::string>());
  } catch (const std::exception& ex) {
    throw ValidationError(where("model"), ex.what());
  }
  const json& gens = inherit("generators");
  e["generators"] = gens.is_null() ? json::array() : gens;
  validate_generators(*group, e["generators"], where("generators"));
  const json& phi = inherit("phi");
  e["phi"] = phi.is_null() ? "" : phi;
  if (!e["phi"].is_string()) throw ValidationError(where("phi"), "expected a word");
  if (spec.needs_lab) {
    try {
      Lab::make(e["model"], e["generators"].get<std::vector<std::string>>(), e["phi"]);
    } catch (const std::exception& ex) {
      throw ValidationError(path, ex.what());
    }
  }

  const json& profile = ov.profile ? json(*ov.profile) : inherit("profile");
  e["profile"] = profile.is_null() ? "scaled" : profile;
  LedgerProfile lp;
  try {
    lp = parse_profile(e["profile"].get<std::string>());
  } catch (const std::exception& ex) {
    throw ValidationError(where("profile"), ex.what());
  }

  json ledger = merged(merged(default_ledger(e["model"]), spec.ledger), top.value("ledger", json()));
  ledger = merged(ledger, raw.value("ledger", json()));
  e["ledger"] = normalize_ledger(ledger, where("ledger"));

  Windows w;
  try {
    w = Windows::from_json(merged(top.value("windows", json()), raw.value("windows", json())), profile_windows(lp));
  } catch (const std::exception& ex) {
    throw ValidationError(where("windows"), ex.what());
  }
  e["windows"] = w.to_json();

  if (ov.seed)
    e["seed"] = *ov.seed;
  else
    e["seed"] = get_int(raw, "seed", path, get_int(top, "seed", "", 1));
  std::uint64_t budget = 0;
  if (top.contains("budgets")) budget = get_int(require_object(top.at("budgets"), "budgets"), "nodes", "budgets", 0);
  budget = get_int(raw, "budget_nodes", path, static_cast<std::int64_t>(budget));
  if (ov.budget_nodes) budget = *ov.budget_nodes;
  e["budget_nodes"] = budget;

  for (const auto& [key, def] : spec.params.items()) {
    if (key == "tau_c" || key == "K" || key == "tau_s") {
      if (key == "tau_s" && (!raw.contains(key) || raw.at(key).is_null())) {
        e[key] = nullptr;
        continue;
      }
      e[key] = to_string(get_rational(raw, key, path, parse_rational(def.get<std::string>())));
    } else if (def.is_boolean()) {
      e[key] = get_bool(raw, key, path, def.get<bool>());
    } else {
      e[key] = get_int(raw, key, path, def.get<std::int64_t>());
    }
  }
  if (kind == "verify-lemmas" && ov.trials) e["instances"] = *ov.trials;

  auto check_range = [&](const char* lo_key, const char* hi_key) {
    if (e[lo_key].get<std::int64_t>() > e[hi_key].get<std::int64_t>())
      throw ValidationError(field(path, lo_key), "range is empty");
  };
  if (kind == "fibers") {
    check_range("n_lo", "n_hi");
    if (!w.allow_degenerate)
      for (std::int64_t n = e["n_lo"]; n <= e["n_hi"].get<std::int64_t>(); ++n) {
        const std::int64_t lo = std::max<std::int64_t>(1, ceil_i64(w.replace_lo * n)), hi = floor_i64(w.replace_hi * n);
        if (lo > hi)
          throw ValidationError(where("windows"), "replacement window is empty at n = " + std::to_string(n) +
                                                      "; set allow_degenerate to run anyway");
      }
  }
  if (kind == "probe-negligibility") {
    check_range("n_lo", "n_hi");
    if (e["n_lo"].get<std::int64_t>() < 1) throw ValidationError(field(path, "n_lo"), "must be at least 1");
  }
  return e;
}

// ---- output formatting

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// CSV field quoting for words that may contain commas.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::unique_ptr<Lab> make_lab(const json& e) {
  return Lab::make(e["model"], e["generators"].get<std::vector<std::string>>(), e["phi"]);
}

EnumerationOptions enumeration(const json& e, unsigned workers) {
  EnumerationOptions o;
  o.workers = workers;
  o.node_budget = e["budget_nodes"];
  return o;
}

ExperimentResult run_enumerate(const json& e, unsigned workers) {
  auto group = make_model(e["model"]);
  const auto gens = e["generators"].empty() ? GeneratingSet::standard(*group)
                                            : GeneratingSet::parse(*group, e["generators"].get<std::vector<std::string>>());
  const WordMetric metric(gens);
  const auto c = metric.enumerate_ball(e["radius"], false, enumeration(e, workers));
  const auto balls = c.ball_counts();
  ExperimentResult r;
  r.partial = c.truncated;
  json out = {{"model", e["model"]},
              {"generating_set", gens.labels()},
              {"radius", c.radius},
              {"complete_radius", c.complete_radius},
              {"truncated", c.truncated},
              {"sphere_counts", c.sphere_counts},
              {"ball_counts", balls}};
  std::string csv = "radius,sphere,ball\n", dat = "# radius ball\n";
  for (std::size_t k = 0; k < balls.size(); ++k) {
    csv += std::to_string(k) + "," + std::to_string(c.sphere_counts[k]) + "," + std::to_string(balls[k]) + "\n";
    dat += std::to_string(k) + " " + std::to_string(balls[k]) + "\n";
  }
  r.files = {{".json", dump(out)}, {".csv", csv}, {".dat", dat}};
  r.summary.push_back("ball sizes up to R=" + std::to_string(c.complete_radius) + ": #B=" +
                      std::to_string(balls.empty() ? 0 : balls.back()) + (c.truncated ? " (truncated)" : ""));
  return r;
}

ExperimentResult run_classify(const json& e, unsigned workers) {
  const auto lab = make_lab(e);
  const Ball ball = lab->metric().ball(e["radius"], enumeration(e, workers));
  const std::int64_t top = ball.truncated() ? ball.radius() - 1 : ball.radius();
  const std::size_t count = top < 0 ? 0 : ball.sphere_end(top);
  std::vector<std::optional<Classification>> verdicts(count);
  std::vector<std::string> errors(count);
  const unsigned nthreads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count / 64 + 1)));
  auto work = [&](unsigned t) {
    for (std::size_t idx = count * t / nthreads; idx < count * (t + 1) / nthreads; ++idx) try {
        verdicts[idx] = classify(lab->group(), lab->action(), ball.elements()[idx]);
      } catch (const std::exception& ex) {
        errors[idx] = ex.what();
      }
  };
  if (nthreads == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < nthreads; ++t) threads.emplace_back(work, t);
    for (auto& th : threads) th.join();
  }
  for (std::size_t idx = 0; idx < count; ++idx)
    if (!verdicts[idx]) throw std::runtime_error("classification failed: " + errors[idx]);

  std::map<std::string, std::vector<std::uint64_t>> by_verdict;
  std::vector<std::uint64_t> totals(static_cast<std::size_t>(std::max<std::int64_t>(top + 1, 0)));
  std::string csv = "index,radius,element,verdict,trace,translation_length\n";
  for (std::size_t idx = 0; idx < count; ++idx) {
    const auto& c = *verdicts[idx];
    const auto rad = static_cast<std::size_t>(ball.norm_at(idx));
    auto& row = by_verdict[to_string(c.verdict)];
    row.resize(totals.size());
    for (std::size_t k = rad; k < totals.size(); ++k) ++row[k];
    for (std::size_t k = rad; k < totals.size(); ++k) ++totals[k];
    std::ostringstream trace;
    if (c.trace) trace << *c.trace;
    csv += std::to_string(idx) + "," + std::to_string(rad) + "," + csv_field(lab->group().format(c.element)) + "," +
           to_string(c.verdict) + "," + trace.str() + "," + (c.translation_length ? to_string(*c.translation_length) : "") +
           "\n";
  }
  json counts = json::object();
  for (auto& [verdict, row] : by_verdict) {
    row.resize(totals.size());
    counts[verdict] = row;
  }
  std::string dat = "# radius loxodromic_fraction\n";
  for (std::size_t k = 0; k < totals.size(); ++k) {
    std::uint64_t lox = 0;
    for (const char* v : {"contracting-loxodromic", "pseudoAnosov"})
      if (by_verdict.count(v)) lox += by_verdict[v][k];
    dat += std::to_string(k) + " " + fmt_double(double(lox) / double(totals[k])) + "\n";
  }
  ExperimentResult r;
  r.partial = ball.truncated();
  json out = {{"model", e["model"]},
              {"generating_set", lab->gens().labels()},
              {"radius", e["radius"]},
              {"complete_radius", top},
              {"truncated", ball.truncated()},
              {"ball_counts", totals},
              {"verdict_counts", counts}};
  r.files = {{".json", dump(out)}, {".csv", csv}, {".dat", dat}};
  for (const auto& [verdict, row] : by_verdict)
    r.summary.push_back(verdict + ": " + std::to_string(row.empty() ? 0 : row.back()) + " of " +
                        std::to_string(totals.empty() ? 0 : totals.back()));
  return r;
}

ExperimentResult run_genericity(const json& e, unsigned workers) {
  const auto lab = make_lab(e);
  GenericityOptions o;
  o.R_max = e["R_max"];
  o.tau_c = parse_rational(e["tau_c"].get<std::string>());
  if (!e["tau_s"].is_null()) o.tau_s = parse_rational(e["tau_s"].get<std::string>());
  o.translation_power = e["translation_power"];
  o.enumeration = enumeration(e, workers);
  const auto c = genericity_experiment(*lab, o);
  ExperimentResult r;
  r.partial = static_cast<std::int64_t>(c.radii.size()) < o.R_max + 1;
  std::string csv = "R,count,total,ratio,ratio_decimal,undecided\n", dat = "# R ratio\n";
  for (std::size_t k = 0; k < c.radii.size(); ++k) {
    csv += std::to_string(c.radii[k]) + "," + std::to_string(c.counts[k]) + "," + std::to_string(c.totals[k]) + "," +
           to_string(c.ratios[k]) + "," + fmt_double(to_double(c.ratios[k])) + "," + std::to_string(c.undecided[k]) + "\n";
    dat += std::to_string(c.radii[k]) + " " + fmt_double(to_double(c.ratios[k])) + "\n";
  }
  r.files = {{".json", dump(c.to_json())}, {".csv", csv}, {".dat", dat}};
  r.summary.push_back(c.measure + " ratio at R=" + std::to_string(c.radii.empty() ? 0 : c.radii.back()) + ": " +
                      (c.ratios.empty() ? "-" : to_string(c.ratios.back())) + ", slope " +
                      (c.decay_exponent ? fmt_double(*c.decay_exponent) : "n/a") +
                      (c.tail_monotone ? ", tail monotone" : ", tail NOT monotone"));
  return r;
}

ExperimentResult run_fibers(const json& e, unsigned) {
  const auto lab = make_lab(e);
  const auto ledger = build_ledger(*lab, e);
  FiberOptions o;
  o.thick_perturbation = e["thick_perturbation"];
  o.exclude_thick = e["exclude_thick"];
  o.element_budget = e["budget_nodes"];
  std::vector<FiberReport> reports;
  ExperimentResult r;
  std::string csv = "n,domain,image,max_fiber,excluded_thick,truncated_elements,sqrt_constant\n",
              dat = "# n max_fiber_over_sqrt_n\n";
  json list = json::array();
  for (std::int64_t n = e["n_lo"]; n <= e["n_hi"].get<std::int64_t>(); ++n) {
    auto rep = fiber_census(*lab, ledger, n, o);
    r.partial = r.partial || rep.truncated();
    csv += std::to_string(n) + "," + std::to_string(rep.domain_size) + "," + std::to_string(rep.image_size) + "," +
           std::to_string(rep.max_fiber) + "," + std::to_string(rep.excluded_thick) + "," +
           std::to_string(rep.truncated_elements) + "," + fmt_double(rep.sqrt_constant()) + "\n";
    dat += std::to_string(n) + " " + fmt_double(rep.sqrt_constant()) + "\n";
    list.push_back(rep.to_json());
    reports.push_back(std::move(rep));
  }
  const double C = least_sqrt_constant(reports);
  json out = {{"model", e["model"]}, {"ledger", ledger.to_json()}, {"reports", list}, {"sqrt_constant", C}};
  r.files = {{".json", dump(out)}, {".csv", csv}, {".dat", dat}};
  r.summary.push_back("max fiber / sqrt(n) over n in [" + std::to_string(e["n_lo"].get<std::int64_t>()) + "," +
                      std::to_string(e["n_hi"].get<std::int64_t>()) + "]: " + fmt_double(C));
  return r;
}

ExperimentResult run_verify(const json& e, unsigned) {
  const auto lab = make_lab(e);
  const auto ledger = build_ledger(*lab, e);
  SuiteOptions o;
  o.instances = e["instances"];
  o.seed = e["seed"];
  o.K = parse_rational(e["K"].get<std::string>());
  o.max_segments = e["max_segments"];
  o.extra_length = e["extra_length"];
  // Concatenation instances need exact tree-group distances; quadratic instances are braid-specific.
  ExperimentResult r;
  std::vector<LemmaSummary> suites;
  if (lab->id() == "braid3") {
    suites.push_back(run_quadratic_suite(*lab, ledger, o));
    r.summary.push_back("concatenation suites skipped: they run on the tree groups");
  } else {
    suites = run_concat_suite(*lab, ledger, o);
    r.summary.push_back("quadratic-length skipped: instances need the braid model");
  }
  json list = json::array();
  std::string csv = "lemma,model,generated,certified,passed,failed\n";
  for (const auto& s : suites) {
    list.push_back(s.to_json());
    csv += s.lemma + "," + s.model + "," + std::to_string(s.generated) + "," + std::to_string(s.certified) + "," +
           std::to_string(s.passed) + "," + std::to_string(s.failed) + "\n";
    r.suite_failed = r.suite_failed || s.failed > 0;
    char row[160];
    std::snprintf(row, sizeof row, "%-20s certified %6llu  passed %6llu  failed %4llu", s.lemma.c_str(),
                  static_cast<unsigned long long>(s.certified), static_cast<unsigned long long>(s.passed),
                  static_cast<unsigned long long>(s.failed));
    r.summary.push_back(row);
  }
  json out = {{"model", e["model"]}, {"ledger", ledger.to_json()}, {"suites", list}};
  auto appendix = [&](const AppendixReport& rep, const char* key) {
    out[key] = rep.to_json();
    for (const auto& t : rep.lemmas) {
      csv += "appendix-" + t.lemma + "," + rep.space + "," + std::to_string(t.tested) + "," +
             std::to_string(t.tested - t.vacuous) + "," + std::to_string(t.passed) + "," + std::to_string(t.failed) + "\n";
      r.suite_failed = r.suite_failed || t.failed > 0;
    }
    r.summary.push_back(std::string(key) + ": " + (rep.ok() ? "all hold" : "FAILURES"));
  };
  if (e["appendix_trials"].get<std::int64_t>() > 0)
    appendix(appendix_random(*lab, e["appendix_trials"], e["seed"]), "appendix_random");
  if (e["appendix_exhaustive"].get<bool>()) appendix(appendix_exhaustive(FiniteGraph::cycle(6)), "appendix_exhaustive");
  r.files = {{".json", dump(out)}, {".csv", csv}};
  return r;
}

ExperimentResult run_negligibility(const json& e, unsigned) {
  const auto lab = make_lab(e);
  const auto ledger = build_ledger(*lab, e);
  const auto rep = exponential_negligibility_probe(*lab, ledger, e["n_lo"], e["n_hi"], e["budget_nodes"]);
  ExperimentResult r;
  r.partial = rep.truncated;
  std::string csv = "n,annulus_size,decomposable,ratio,ratio_decimal\n", dat = "# n ratio\n";
  for (const auto& p : rep.points) {
    csv += std::to_string(p.n) + "," + std::to_string(p.annulus_size) + "," + std::to_string(p.decomposable) + "," +
           to_string(p.ratio) + "," + fmt_double(to_double(p.ratio)) + "\n";
    dat += std::to_string(p.n) + " " + fmt_double(to_double(p.ratio)) + "\n";
  }
  r.files = {{".json", dump(rep.to_json())}, {".csv", csv}, {".dat", dat}};
  r.summary.push_back("fitted rate " + (rep.rate ? fmt_double(*rep.rate) : std::string("n/a")));
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds = [] {
    std::vector<std::string> out;
    for (const auto& s : kind_specs()) out.push_back(s.kind);
    return out;
  }();
  return kinds;
}

json effective_config(const json& raw, const RunOverrides& overrides) {
  const json top = raw.is_null() ? json::object() : raw;
  require_object(top, "config");
  reject_unknown(top, "", {"model", "generators", "phi", "profile", "ledger", "windows", "seed", "budgets", "experiments"});
  json out;
  out["seed"] = overrides.seed ? static_cast<std::int64_t>(*overrides.seed) : get_int(top, "seed", "", 1);
  out["experiments"] = json::array();
  if (!top.contains("experiments")) return out;
  const json& list = top.at("experiments");
  if (!list.is_array()) throw ValidationError("experiments", "expected a list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < list.size(); ++i) {
    json e = normalize_experiment(top, list[i], i, overrides);
    if (!names.insert(e["name"].get<std::string>()).second)
      throw ValidationError(field(index("experiments", i), "name"), "duplicate experiment name");
    out["experiments"].push_back(std::move(e));
  }
  return out;
}

ConstantLedger build_ledger(const Lab& lab, const json& e) {
  const json& L = e.at("ledger");
  const json& mj = L.at("measure");
  NormOracle norms(lab.metric(), mj.at("ball_radius"), mj.at("r_max"));
  MeasurementOptions mo;
  mo.sample_radius = mj.at("sample_radius");
  mo.wpd_radius = mj.at("wpd_radius");
  mo.segment_length = mj.at("segment_length");
  mo.samples = mj.at("samples");
  mo.seed = e.at("seed");
  const MeasuredConstants m = measure_ledger(norms, lab.action(), lab.phi(), mo).constants;
  const Windows w = Windows::from_json(e.at("windows"));
  if (parse_profile(e.at("profile")) == LedgerProfile::kPaperFaithful) return ConstantLedger::paper_faithful(m, w);
  const Rational K = L.at("K_map") == "auto" ? least_kmap(m) : parse_rational(L.at("K_map").get<std::string>());
  const json& rule = L.at("threshold_rule");
  const ThresholdRule tr{parse_rational(rule.at("midpoint").get<std::string>()),
                         parse_rational(rule.at("chain").get<std::string>()), rule.at("exponent").get<unsigned>()};
  return ConstantLedger::scaled(m, K, L.at("L_map"), L.at("block_length"), tr, w);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

ExperimentResult run_experiment(const json& e, unsigned workers) {
  const std::string kind = e.at("kind");
  ExperimentResult r;
  if (kind == "enumerate") r = run_enumerate(e, workers);
  else if (kind == "classify") r = run_classify(e, workers);
  else if (kind == "genericity") r = run_genericity(e, workers);
  else if (kind == "fibers") r = run_fibers(e, workers);
  else if (kind == "verify-lemmas") r = run_verify(e, workers);
  else if (kind == "probe-negligibility") r = run_negligibility(e, workers);
  else throw ValidationError("kind", "unknown experiment kind '" + kind + "'");
  r.name = e.at("name");
  r.kind = kind;
  for (auto& f : r.files) f.name = r.name + f.name;
  return r;
}

RunResult run_config(const json& effective, unsigned workers, const std::filesystem::path& out_dir) {
  RunResult result;
  json& m = result.manifest;
  m["config_sha256"] = sha256_hex(effective.dump());
  m["seed"] = effective.at("seed");
  m["config"] = effective;
  m["experiments"] = json::array();
  bool partial = false, failed = false;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  for (const auto& e : effective.at("experiments")) {
    ExperimentResult r = run_experiment(e, workers);
    json entry = {{"name", r.name},     {"kind", r.kind},        {"seed", e.at("seed")},
                  {"partial", r.partial}, {"suite_failed", r.suite_failed}, {"outputs", json::array()}};
    for (const auto& f : r.files) {
      entry["outputs"].push_back({{"path", f.name}, {"sha256", sha256_hex(f.contents)}, {"bytes", f.contents.size()}});
      if (!out_dir.empty()) {
        std::ofstream os(out_dir / f.name, std::ios::binary);
        os << f.contents;
        if (!os) throw std::runtime_error("cannot write " + (out_dir / f.name).string());
      }
    }
    partial = partial || r.partial;
    failed = failed || r.suite_failed;
    m["experiments"].push_back(std::move(entry));
    result.experiments.push_back(std::move(r));
  }
  m["partial"] = partial;
  m["status"] = failed ? "suite-failure" : partial ? "partial" : "ok";
  result.exit_code = failed ? kExitSuiteFailure : partial ? kExitBudgetPartial : kExitOk;
  if (!out_dir.empty()) {
    std::ofstream os(out_dir / "manifest.json", std::ios::binary);
    os << dump(m);
    if (!os) throw std::runtime_error("cannot write manifest");
  }
  return result;
}

}  // namespace genlab
