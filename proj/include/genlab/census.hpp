#pragma once

#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "genlab/hyperbolic.hpp"
#include "genlab/lab.hpp"
#include "genlab/ledger.hpp"

namespace genlab {

// ---- classification

enum class Verdict { kContractingLoxodromic, kNonLoxodromic, kPseudoAnosov, kReducible, kPeriodic };
const char* to_string(Verdict v);

struct Classification {
  NormalForm element;
  Verdict verdict = Verdict::kNonLoxodromic;
  std::optional<Rational> translation_length;  // tree models
  std::optional<BigInt> trace;                 // braid model, SL(2,Z) image
  std::optional<int> projective_order;         // braid model, order in PSL(2,Z) when finite

  bool loxodromic() const { return verdict == Verdict::kContractingLoxodromic || verdict == Verdict::kPseudoAnosov; }
  nlohmann::json to_json(const GroupModel& group) const;
};

// Braid model by |trace| of the SL(2,Z) image; tree models by exact translation length on the tree.
Classification classify(const GroupModel& group, const GroupAction& action, const NormalForm& g);

// ---- free group counting over the letters +-1..+-k

// Length after cyclic reduction of a reduced word.
std::int64_t cyclic_length(const Word& reduced);
// The least letter, in the order 1, -1, 2, -2, ..., with a generator index other than cur's that keeps
// prev x next reduced (0 = absent neighbour).
Letter replacement_letter(std::size_t k, Letter prev, Letter cur, Letter next);
// a_1 ... a_{i-1} b a_{i+1} ... a_n with b the replacement letter; 1-based i.
Word replace_letter(std::size_t k, const Word& reduced, std::size_t i);
// Both positions replaced, i < j, applied left to right.
Word replace_two_letters(std::size_t k, const Word& reduced, std::size_t i, std::size_t j);

// Exhaustive enumeration of reduced words up to n_max.
struct FreeCycleCensus {
  std::size_t k = 0;
  std::int64_t n_max = 0;
  std::vector<std::vector<std::uint64_t>> by_length;  // [m][tau] for words of length m, cyclic length tau
  // Single-letter map over the union of its domains: (g, i) with tau(g) <= T and i < (|g| - T) / 2.
  std::vector<std::uint64_t> replacement_pairs;  // per word length
  std::vector<std::uint64_t> max_fiber;          // per word length
  std::uint64_t fiber_violations = 0;            // images whose preimage pairs disagree on the position

  BigInt ball_size(std::int64_t n) const;
  BigInt count_at_most(std::int64_t n, std::int64_t T) const;
  std::uint64_t max_fiber_up_to(std::int64_t n) const;
};

// Throws std::invalid_argument when n_max exceeds max_length (enumeration budget).
FreeCycleCensus free_cycle_census(std::size_t k, std::int64_t n_max, std::int64_t max_length = 13);

struct ThresholdInequality {
  std::size_t k = 0;
  std::int64_t n = 0, T = 0;
  BigInt count;  // #{g in B(n) : tau_S(g) <= T}
  BigInt ball;   // #B(n)
  Rational single_factor;    // 1 + (n - T) / 12
  Rational binomial_factor;  // single factor plus sum_{j >= 2} 6^-j C(floor((n - T)/2), j)
  bool single_holds = false, binomial_holds = false;
  Rational single_slack() const { return Rational(ball) - single_factor * Rational(count); }
  Rational binomial_slack() const { return Rational(ball) - binomial_factor * Rational(count); }
  nlohmann::json to_json() const;
};

ThresholdInequality threshold_inequality(const FreeCycleCensus& census, std::int64_t n, std::int64_t T);
// Builds the census up to n; n > T >= 0.
ThresholdInequality free_group_threshold_count(std::size_t k, std::int64_t n, std::int64_t T);

// ---- fibers

struct FiberReport {
  std::string map;
  std::int64_t n = 0;
  std::uint64_t domain_size = 0, image_size = 0, max_fiber = 0;
  std::map<std::uint64_t, std::uint64_t> histogram;  // fiber size -> number of images
  std::uint64_t excluded_thick = 0;                  // elements dropped as certified A_thick
  std::uint64_t truncated_elements = 0;              // elements skipped by the budget
  std::int64_t image_norm_excess = 0;                // max of |image| - n, negative when inside B(n)
  nlohmann::json windows;

  bool truncated() const { return truncated_elements > 0; }
  double sqrt_constant() const;  // max_fiber / sqrt(n)
  nlohmann::json to_json() const;
};

// Largest max_fiber / sqrt(n) over the reports.
double least_sqrt_constant(const std::vector<FiberReport>& reports);

// Exact fibers of the single-letter map of the free group of rank k over (g, i): |g| <= n, tau(g) <= T,
// 1 <= i < (|g| - T) / 2.
FiberReport single_letter_fibers(std::size_t k, std::int64_t n, std::int64_t T);
// Both letters i < j < (|g| - T) / 2 replaced.
FiberReport double_letter_fibers(std::size_t k, std::int64_t n, std::int64_t T);

// ---- A_thick

struct ThickCertificate {
  bool certified = false;
  std::string reason;
  std::int64_t distance = 0;  // d_S(id, gamma)
  std::optional<AlignmentReport> alignment;
};

// thick_lo |g| <= d_S(id, gamma) <= thick_hi |g| and (x0, Proj gamma, g x0) K_map-aligned.
// Throws std::invalid_argument unless gamma has the ledger segment length.
ThickCertificate a_thick_certify(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g,
                                 const OrbitSegment& gamma);

struct ThickSearch {
  bool found = false;  // sound; a miss proves nothing
  bool degenerate = false;
  std::optional<OrbitSegment> witness;
  std::int64_t position = -1;  // index along the geodesic word of g
  std::uint64_t candidates = 0;
  const char* label() const { return found ? "certified-yes" : "not-found"; }
};

// Bases p_j b with p_j on the fixed geodesic of g and |b|_S <= perturbation.
ThickSearch a_thick_search(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g,
                           std::int64_t perturbation = 0);

// ---- replacement maps

struct Replacement {
  NormalForm g, image;
  std::size_t i = 0, j = 0;       // j only for the double map
  NormalForm prefix;              // G_{n;1} for the double map
  std::vector<Letter> linkages;   // s, t (and s', t'); 0 = identity
  bool fallback = false;          // found by the exhaustive linkage search
  AlignmentReport alignment;
  std::int64_t image_norm = 0;
  std::int64_t norm_slack = 0;    // allowed excess over |g|

  nlohmann::json to_json(const GroupModel& group) const;
};

// Indices admitted by the replacement window at radius n.
std::pair<std::int64_t, std::int64_t> replacement_window(const ConstantLedger& ledger, std::int64_t n);

// F_n(g, i) = w s phi^L t v. Throws std::invalid_argument on a precondition failure and HypothesisError when no
// linkage pair certifies the alignment.
Replacement replacement_map(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g, std::int64_t i,
                            std::int64_t n);
// G_{n;2}(g, i, j) = w s phi^L t w' s' phi^{2L} t' v, with G_{n;1} = w s phi^L t w' as prefix.
Replacement double_replacement(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g, std::int64_t i,
                               std::int64_t j, std::int64_t n);

struct FiberOptions {
  std::int64_t thick_perturbation = 0;
  bool exclude_thick = true;
  std::uint64_t element_budget = 0;  // 0 = unlimited
};

// F_n over (B(n) minus B(annulus n) minus certified A_thick) times the replacement window.
FiberReport fiber_census(const Lab& lab, const ConstantLedger& ledger, std::int64_t n, const FiberOptions& opts = {});

// ---- genericity

struct GenericityOptions {
  std::int64_t R_max = 8;
  Rational tau_c{0};                   // tau_C <= tau_c
  std::optional<Rational> tau_s;       // tau_S <= tau_s R, when set
  std::int64_t translation_power = 8;  // for tau_S bounds without a closed form
  EnumerationOptions enumeration;
};

struct GenericityCurve {
  std::string model;
  std::vector<std::string> generating_set;
  std::string measure;  // "non-loxodromic" or "non-pA cosets"
  std::vector<std::int64_t> radii;
  std::vector<std::uint64_t> counts, totals;
  std::vector<Rational> ratios;
  std::vector<std::uint64_t> undecided;  // tau_S bounds straddling the threshold; counted as outside
  // Braid model: cosets of the center, with elements bounded by coset count times max intersection.
  std::vector<std::uint64_t> element_counts, element_totals;
  std::uint64_t max_coset_intersection = 0;
  std::optional<double> decay_exponent;
  bool tail_monotone = true;  // ratio at R at most the ratio at R - 2 over the fitted tail

  nlohmann::json to_json() const;
};

// Least-squares slope of ln y on ln x over the last ceil(half) of the points with x, y > 0.
std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

GenericityCurve genericity_experiment(const Lab& lab, const GenericityOptions& opts);

// ---- exponential negligibility

struct NegligibilityPoint {
  std::int64_t n = 0;
  std::int64_t h_radius = 0, g_radius = 0, annulus_floor = 0;
  std::uint64_t annulus_size = 0, decomposable = 0;
  Rational ratio;
};

struct NegligibilityReport {
  std::string model;
  std::vector<NegligibilityPoint> points;
  std::optional<double> rate;  // lambda with ratio ~ lambda^-n, from least squares on ln ratio
  bool truncated = false;
  nlohmann::json windows;
  nlohmann::json to_json() const;
};

// Elements of B(n) minus B(annulus n) of the form h^-1 g' h with |h| <= conj_h n and |g'| <= conj_g n.
NegligibilityReport exponential_negligibility_probe(const Lab& lab, const ConstantLedger& ledger, std::int64_t n_lo,
                                                    std::int64_t n_hi, std::uint64_t budget = 0);

}  // namespace genlab
