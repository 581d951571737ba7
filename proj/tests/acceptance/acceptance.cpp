// One [PASS]/[FAIL] line per acceptance criterion; exit status 1 when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "genlab/census.hpp"
#include "genlab/contraction.hpp"
#include "genlab/lemma_verify.hpp"
#include "genlab/runner.hpp"
#include "oracles.hpp"

using namespace genlab;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Effective experiment config, so the ledgers match what the command-line runner builds.
json experiment(json e, const std::string& model) {
  return effective_config({{"model", model}, {"experiments", json::array({std::move(e)})}})["experiments"][0];
}

// Least-squares slope of ln y on ln x over all points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// Median of the pairwise slopes of ln y on ln x; one outlying point cannot move it far.
double theil_sen_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> slopes;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      slopes.push_back((std::log(y[j]) - std::log(y[i])) / (std::log(x[j]) - std::log(x[i])));
  std::sort(slopes.begin(), slopes.end());
  const std::size_t m = slopes.size() / 2;
  return slopes.size() % 2 ? slopes[m] : (slopes[m - 1] + slopes[m]) / 2;
}

// ---- 1

Outcome free_ball_counts() {
  auto group = make_model("free:3");
  const auto gens = GeneratingSet::standard(*group);
  const WordMetric metric(gens);
  const auto t0 = std::chrono::steady_clock::now();
  const auto census = metric.enumerate_ball(8, false, EnumerationOptions{1, 0});
  const double secs = seconds_since(t0);
  const auto balls = census.ball_counts();
  bool ok = !census.truncated && balls.size() == 9;
  std::uint64_t closed = 1, sphere = 6;
  for (std::size_t r = 0; ok && r <= 8; ++r) {
    if (r > 0) closed += sphere, sphere *= 5;
    ok = balls[r] == closed;
  }
  const auto bfs = oracle::free_sphere_counts(3, 6);
  for (std::size_t r = 0; ok && r <= 6; ++r) ok = census.sphere_counts[r] == bfs[r];
  ok = ok && balls[1] == 7 && balls[2] == 37 && secs < 60;
  return {ok, "#B(1)=" + std::to_string(balls[1]) + " #B(2)=" + std::to_string(balls[2]) +
                  " #B(8)=" + std::to_string(balls[8]) + ", R=8 in " + fmt("%.2f", secs) + " s"};
}

// ---- 2

Outcome threshold_inequality_census() {
  const auto c = free_cycle_census(3, 12);
  std::uint64_t checked = 0, violations = 0;
  for (std::int64_t n = 1; n <= 12; ++n)
    for (std::int64_t T = 0; T < n; ++T) {
      const auto q = threshold_inequality(c, n, T);
      ++checked;
      if (!q.single_holds || !q.binomial_holds) ++violations;
    }
  // Independent count of words by cyclic length.
  bool counts_ok = true;
  for (std::int64_t m = 1; m <= 12 && counts_ok; ++m)
    for (std::int64_t t = 1; t <= m; ++t) {
      BigInt expect = 0;
      if ((m - t) % 2 == 0) {
        BigInt cyc = boost::multiprecision::pow(BigInt(5), static_cast<unsigned>(t)) + 1 + (t % 2 == 0 ? 4 : 0);
        const auto p = (m - t) / 2;
        expect = p == 0 ? cyc : cyc * 4 * boost::multiprecision::pow(BigInt(5), static_cast<unsigned>(p - 1));
      }
      counts_ok = counts_ok && BigInt(c.by_length[m][t]) == expect;
    }
  const auto fiber = c.max_fiber_up_to(12);
  const bool ok = violations == 0 && counts_ok && fiber <= 6 && c.fiber_violations == 0 && checked == 78;
  return {ok, std::to_string(checked) + " (n,T) pairs, " + std::to_string(violations) +
                  " violations, max fiber " + std::to_string(fiber) + ", cyclic counts " +
                  (counts_ok ? "match" : "MISMATCH")};
}

// ---- 3

Outcome appendix_suite() {
  bool ok = true;
  std::string detail;
  for (const char* id : {"free:2", "z2z3"}) {
    const auto rep = appendix_random(*Lab::make(id), 10000, 3);
    std::uint64_t certified = 0;
    for (const auto& t : rep.lemmas) {
      ok = ok && t.tested == 10000 && t.failed == 0;
      certified += t.passed;
    }
    ok = ok && rep.ok() && rep.lemmas.size() >= 4;
    detail += std::string(id) + ": " + std::to_string(certified) + " certified checks; ";
  }
  const auto c6 = FiniteGraph::cycle(6);
  const auto ex = appendix_exhaustive(c6);
  for (const auto& t : ex.lemmas) ok = ok && t.failed == 0;
  ok = ok && ex.ok();
  return {ok, detail + "6-cycle at delta " + to_string(ex.delta) + ": " + (ex.ok() ? "no failures" : "FAILURES")};
}

// ---- 4

Outcome section_four_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  auto check = [&](const LemmaSummary& s) {
    ok = ok && s.failed == 0 && s.passed == s.certified && s.certified >= 1000;
    detail += s.lemma + "@" + s.model + " " + std::to_string(s.passed) + "/" + std::to_string(s.certified) + "; ";
  };
  // Generate until every lemma has 10^3 hypothesis-certified instances.
  auto run = [&](const std::string& model, bool quadratic) {
    const json e = experiment({{"kind", "verify-lemmas"}}, model);
    const auto lab = Lab::make(model);
    const auto ledger = build_ledger(*lab, e);
    SuiteOptions o;
    o.seed = 17;
    for (o.instances = 1000;; o.instances += 100) {
      std::vector<LemmaSummary> s = quadratic ? std::vector<LemmaSummary>{run_quadratic_suite(*lab, ledger, o)}
                                              : run_concat_suite(*lab, ledger, o);
      const bool enough = std::all_of(s.begin(), s.end(), [](const LemmaSummary& x) { return x.certified >= 1000; });
      if (enough || o.instances >= 2000) {
        for (const auto& x : s) check(x);
        return;
      }
    }
  };
  run("free:2", false);
  run("z2z3", false);
  run("braid3", true);
  const double secs = seconds_since(t0);
  ok = ok && secs < 600;
  return {ok, detail + fmt("%.1f s", secs)};
}

// ---- 5

// Signed permutations of {a, b}: tree isometries fixing the identity.
Word automorphism(const Word& w, int code) {
  Word out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const int gen = std::abs(w[i]) - 1, sign = w[i] > 0 ? 1 : -1;
    const int image = (code & 1) ? 1 - gen : gen;
    const int flip = (code >> (1 + image)) & 1 ? -1 : 1;
    out[i] = static_cast<Letter>(sign * flip * (image + 1));
  }
  return out;
}

bool canonical(const Word& w) {
  const Word inv = inverse(w);
  for (int code = 0; code < 8; ++code)
    if (automorphism(w, code) < w || automorphism(inv, code) < w) return false;
  return true;
}

Outcome contraction_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  CayleyTree tree(2);
  std::uint64_t geodesics = 0, points = 0;
  bool strong = true;
  std::vector<Word> per_length(13);
  std::vector<bool> seen_length(13, false);
  Word w;
  std::function<void()> dfs = [&] {
    if (canonical(w)) {
      const auto r = strong_contraction_check(tree, tree.geodesic(Word{}, w), 1, 2);
      strong = strong && r.holds;
      ++geodesics;
      points += r.points_scanned;
      if (!seen_length[w.size()]) seen_length[w.size()] = true, per_length[w.size()] = w;
    }
    if (w.size() == 12) return;
    for (Letter l : {1, -1, 2, -2}) {
      if (!w.empty() && w.back() == -l) continue;
      w.push_back(l);
      dfs();
      w.pop_back();
    }
  };
  dfs();
  // Every geodesic of a given length is carried to every other by a tree automorphism; scan farther on one each.
  for (const auto& rep : per_length) {
    const auto r = strong_contraction_check(tree, tree.geodesic(Word{}, rep), 1, 4);
    strong = strong && r.holds && r.least_K == 1;
  }

  auto m = build_cayley_tree(2);
  auto gens = GeneratingSet::standard(*m.group);
  WordMetric metric(gens);
  NormOracle norms(metric, 10, 40);
  WeakContractionOptions opts;
  opts.min_norm = 0;
  opts.max_norm = 10;
  opts.samples_per_norm = 40;
  const auto prof = weak_contraction_profile(norms, *m.action, m.group->normalize({1}), 6, opts);
  bool weak = !prof.truncated;
  for (std::int64_t r = 4; r <= 10; ++r) weak = weak && prof.constant_at_norm(r) == prof.constant_at_norm(4);
  return {strong && weak, std::to_string(geodesics) + " geodesic classes up to length 12 (" + std::to_string(points) +
                              " points) 1-strongly contracting: " + (strong ? "yes" : "NO") +
                              "; weak constant at norms 4..10: " + std::to_string(prof.constant_at_norm(4)) +
                              (weak ? " (constant)" : " (NOT constant)") + fmt(", %.1f s", seconds_since(t0))};
}

// ---- 6

// Trichotomy from the independent matrix image.
const char* oracle_type(const Word& w) {
  const auto m = oracle::braid_invariant(w).m;
  const auto tr = std::abs(m.a + m.d);
  if (tr > 2) return "pseudoAnosov";
  const oracle::M2 I{1, 0, 0, 1};
  if (tr == 2 && !(m == I || m == I.neg())) return "reducible";
  return "periodic";
}

Outcome braid_classification() {
  auto lab = Lab::make("braid3");
  const auto& G = lab->group();
  const auto alpha = GeneratorAlphabet::standard(2);
  std::uint64_t violations = 0;
  for (const char* w : {"a", "aB", "ab"})
    if (std::string(to_string(classify(G, lab->action(), lab->parse(w)).verdict)) != oracle_type(alpha.parse(w))) ++violations;
  const bool examples = violations == 0 && classify(G, lab->action(), lab->parse("a")).verdict == genlab::Verdict::kReducible &&
                        classify(G, lab->action(), lab->parse("aB")).verdict == genlab::Verdict::kPseudoAnosov &&
                        classify(G, lab->action(), lab->parse("ab")).verdict == genlab::Verdict::kPeriodic;
  std::mt19937_64 rng(101);
  const NormalForm z = Braid3::delta_squared_power(1);
  for (int i = 0; i < 1000; ++i) {
    const NormalForm g = G.normalize(oracle::random_word(rng, 2, 14));
    const NormalForm h = G.normalize(oracle::random_word(rng, 2, 10));
    const auto v = classify(G, lab->action(), g).verdict;
    if (std::string(to_string(v)) != oracle_type(G.representative(g))) ++violations;
    if (classify(G, lab->action(), G.conjugate(g, h)).verdict != v) ++violations;
    if (classify(G, lab->action(), G.inverse(g)).verdict != v) ++violations;
    if (classify(G, lab->action(), G.multiply(g, z)).verdict != v) ++violations;
  }
  return {examples && violations == 0, std::string("worked examples ") + (examples ? "match" : "MISMATCH") +
                                           ", 1000 random pairs: " + std::to_string(violations) + " violations"};
}

// ---- 7

Outcome genericity_trend() {
  bool ok = true;
  std::string detail;
  auto braid = [&](const Lab& lab, std::int64_t R_max) {
    GenericityOptions o;
    o.R_max = R_max;
    const auto c = genericity_experiment(lab, o);
    bool monotone = static_cast<std::int64_t>(c.radii.size()) == R_max + 1;
    for (std::int64_t R = 6; monotone && R <= R_max; R += 2) monotone = c.ratios[R] <= c.ratios[R - 2];
    const bool neg = c.decay_exponent && *c.decay_exponent < 0;
    ok = ok && monotone && neg;
    std::string gens;
    for (const auto& g : c.generating_set) gens += (gens.empty() ? "" : ",") + g;
    detail += "{" + gens + "} R<=" + std::to_string(R_max) + " ratio " + to_string(c.ratios.back()) + " slope " +
              (c.decay_exponent ? fmt("%.2f", *c.decay_exponent) : "n/a") + (monotone ? "" : " NOT monotone") + "; ";
  };
  braid(*Lab::make("braid3"), 9);
  // {a, a^k b a^m} generates for every k, m.
  std::mt19937_64 rng(2718);
  std::uniform_int_distribution<int> e(-2, 2);
  auto power = [](int p) { return p >= 0 ? std::string(p, 'a') : std::string(-p, 'A'); };
  const int k = e(rng), m = e(rng);
  braid(*Lab::make("braid3", {"a", power(k) + "b" + power(m)}), 8);

  GenericityOptions o;
  o.R_max = 12;
  const auto f = genericity_experiment(*Lab::make("free:2"), o);
  bool dec = f.ratios.size() == 13;
  for (std::size_t n = 5; dec && n <= 12; ++n) dec = f.ratios[n] < f.ratios[n - 1];
  ok = ok && dec;
  detail += "F2 non-loxodromic ratio on [4,12] " + std::string(dec ? "strictly decreasing" : "NOT decreasing");
  return {ok, detail};
}

// ---- 8

Outcome fiber_census_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  double C = 0;
  for (const char* model : {"z2z3", "free:2"}) {
    const auto lab = Lab::make(model);
    const auto ledger = build_ledger(*lab, experiment({{"kind", "fibers"}}, model));
    std::vector<double> ns, fibers;
    std::string row;
    for (std::int64_t n = 8; n <= 14; ++n) {
      const auto r = fiber_census(*lab, ledger, n);
      ok = ok && !r.truncated() && r.domain_size > 0;
      ns.push_back(double(n));
      fibers.push_back(double(r.max_fiber));
      C = std::max(C, r.sqrt_constant());
      row += (row.empty() ? "" : ",") + std::to_string(r.max_fiber);
    }
    // No growth beyond sqrt(n): the robust exponent of max fiber against n stays at most 1/2.
    const double robust = theil_sen_slope(ns, fibers), ols = loglog_slope(ns, fibers);
    ok = ok && robust <= 0.5;
    detail += std::string(model) + " max fibers n=8..14 [" + row + "] exponent " + fmt("%.2f", robust) +
              " (least squares " + fmt("%.2f", ols) + "); ";
  }
  return {ok, detail + "C = " + fmt("%.2f", C) + fmt(", %.0f s", seconds_since(t0))};
}

// ---- 9

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome reproducibility() {
  const json cfg = {{"model", "braid3"},
                    {"seed", 5},
                    {"experiments",
                     {{{"kind", "enumerate"}, {"model", "free:3"}, {"radius", 7}},
                      {{"kind", "classify"}, {"radius", 6}},
                      {{"kind", "genericity"}, {"R_max", 8}},
                      {{"kind", "fibers"}, {"model", "z2z3"}, {"n_lo", 8}, {"n_hi", 12}},
                      {{"kind", "verify-lemmas"}, {"model", "free:2"}, {"instances", 200}, {"appendix_trials", 500}},
                      {{"kind", "probe-negligibility"}, {"model", "free:2"}, {"n_lo", 4}, {"n_hi", 9}}}}};
  const auto eff = effective_config(cfg);
  const auto base = std::filesystem::temp_directory_path() / ("genlab-acceptance-" + std::to_string(::getpid()));
  const auto a = run_config(eff, 1, base / "a");
  const auto b = run_config(eff, 1, base / "b");
  const auto c = run_config(eff, 4, base / "c");
  bool ok = a.exit_code == 0 && a.manifest == b.manifest && a.manifest == c.manifest;
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(base / "a")) {
    const auto name = entry.path().filename();
    const std::string x = slurp(entry.path());
    ok = ok && x == slurp(base / "b" / name) && x == slurp(base / "c" / name);
    ++files;
  }
  std::filesystem::remove_all(base);
  return {ok && files == 18, std::to_string(files) + " files byte-identical across two runs and 1 vs 4 workers" +
                                 std::string(ok ? "" : " (MISMATCH)")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"free-group ball counts", free_ball_counts},
      {"counting inequality and replacement fibers", threshold_inequality_census},
      {"appendix lemma suite", appendix_suite},
      {"concatenation and quadratic-length suite", section_four_suite},
      {"tree contraction", contraction_checks},
      {"Braid3 classification", braid_classification},
      {"genericity trend", genericity_trend},
      {"fiber census", fiber_census_bound},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("[%s] criterion %zu: %s | %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
