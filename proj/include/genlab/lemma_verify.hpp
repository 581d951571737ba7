#pragma once

#include <cstdint>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "genlab/hyperbolic.hpp"
#include "genlab/lab.hpp"
#include "genlab/ledger.hpp"

namespace genlab {

// g, then phi-orbit segments gamma_1..gamma_n, then h.
struct ConcatInstance {
  std::string id;
  NormalForm g, h;
  std::vector<OrbitSegment> segments;
  Rational K;
  std::int64_t M = 0;  // common segment length

  nlohmann::json to_json(const GroupModel& group) const;
};

// Two endpoints whose tree images coincide, a point g between them, and segments from g x0 to h_t x0.
struct QuadraticInstance {
  std::string id;
  NormalForm g, h1, h2;
  std::vector<OrbitSegment> segments;
  Rational K;
  std::int64_t M = 0;

  nlohmann::json to_json(const GroupModel& group) const;
};

struct InequalityVerdict {
  std::size_t index = 0;  // segment index for per-segment inequalities
  Rational lhs, rhs;
  bool pass = false;
  std::vector<NormalForm> witnesses;
  std::string detail;

  Rational margin() const { return rhs - lhs; }
};

struct LemmaOutcome {
  std::string lemma;
  std::string instance;
  bool skipped = false;  // hypotheses not certified
  std::string skip_reason;
  std::vector<InequalityVerdict> verdicts;

  bool passed() const;
  nlohmann::json to_json(const GroupModel& group) const;
};

struct Certification {
  bool certified = false;
  std::string reason;
  std::optional<AlignmentReport> alignment;
};

// Each segment has length M > threshold and (g x0, Proj gamma_1, ..., Proj gamma_n, h x0) is K-aligned.
Certification certify_concat(const Lab& lab, const ConcatInstance& inst, const Rational& threshold);

struct InstanceOptions {
  std::size_t segments = 1;
  std::int64_t M = 1;
  Rational K{3};
  std::int64_t base_length = 6;  // prefix a with |a| uniform in [0, base_length]
  std::int64_t tail_length = 4;  // g = a u and h = (end of gamma_n) v
  std::int64_t link_length = 2;  // letters between consecutive segments
};

ConcatInstance random_concat_instance(const Lab& lab, std::mt19937_64& rng, const InstanceOptions& opts,
                                      std::string id);

// Bound on the geodesic searches; closed-form metrics ignore it.
inline constexpr std::int64_t kGeodesicCap = 4096;

// Some p on [g,h]_S with pi_gamma(p) in the middle third of Proj gamma and
// d_S(p, q) <= (d_S(g, q) + d_S(q, h)) / 100, q the orbit midpoint.
LemmaOutcome verify_midpoint_capture(const Lab& lab, const ConstantLedger& ledger, const ConcatInstance& inst);
// p_1 <= ... <= p_n on [g,h]_S with d_S(p_i, q_i) bounded by the 30^-l weighted neighbouring gaps.
LemmaOutcome verify_chain_capture(const Lab& lab, const ConstantLedger& ledger, const ConcatInstance& inst);
// sum_i d_S([g,h]_S, q_i) <= d_S(g, h) / 2.
LemmaOutcome verify_distance_sum(const Lab& lab, const ConstantLedger& ledger, const ConcatInstance& inst);

// Word distance certified without search when possible (exponent sums on B_3), else by bounded search.
std::optional<std::int64_t> certified_distance(const Lab& lab, const NormalForm& a, const NormalForm& b,
                                               std::int64_t cap = kGeodesicCap);

// Braid model only: h_t = a Delta^{+-2k} P with P a positive braid running along the phi axis.
QuadraticInstance quadratic_instance(const Lab& lab, std::mt19937_64& rng, std::size_t N, std::int64_t M,
                                     const Rational& K, std::string id, std::int64_t base_length = 6,
                                     std::int64_t gap_max = 2, std::int64_t tail_length = 3);
// d_S(h1, h2) >= K_map (N - M - 1)^2, N the number of segments.
LemmaOutcome verify_quadratic_length(const Lab& lab, const ConstantLedger& ledger, const QuadraticInstance& inst);

struct LemmaSummary {
  std::string lemma;
  std::string model;
  std::uint64_t generated = 0, certified = 0, passed = 0, failed = 0;
  std::optional<Rational> min_margin;
  double max_ratio = 0;  // largest lhs / rhs over verdicts with rhs > 0
  std::vector<nlohmann::json> failures;

  double acceptance() const { return generated == 0 ? 0.0 : double(certified) / double(generated); }
  void record(const LemmaOutcome& outcome, const nlohmann::json& instance);
  nlohmann::json to_json() const;
};

struct SuiteOptions {
  std::uint64_t instances = 1000;
  std::uint64_t seed = 1;
  Rational K{3};
  std::size_t max_segments = 4;  // chains use 2..max_segments
  std::int64_t extra_length = 3;  // M is the least admissible length plus up to this much
};

// Least integer length exceeding the threshold.
std::int64_t least_length_above(const Rational& threshold);

std::vector<LemmaSummary> run_concat_suite(const Lab& lab, const ConstantLedger& ledger, const SuiteOptions& opts);
LemmaSummary run_quadratic_suite(const Lab& lab, const ConstantLedger& ledger, const SuiteOptions& opts);

// ---- point-level lemmas on a fixed space

struct LemmaTally {
  std::string lemma;
  std::uint64_t tested = 0, vacuous = 0, passed = 0, failed = 0;
  std::vector<nlohmann::json> failures;  // first few offending configurations

  void record(bool applicable, bool holds, const std::function<nlohmann::json()>& dump);
  nlohmann::json to_json() const;
};

struct AppendixReport {
  std::string space;
  Rational delta;
  std::string mode;  // "random" or "exhaustive"
  std::vector<LemmaTally> lemmas;

  bool ok() const;
  nlohmann::json to_json() const;
};

// The projection of x onto [y,z] sits within 8 delta of the point at distance (x,z)_y from y.
bool check_gromov_projection(const MetricSpace& space, const Rational& delta, const Point& x, const Geodesic& yz);
// Projections to eps-synchronized geodesics differ by less than 2 eps + 16 delta.
bool check_synchronized_projection(const MetricSpace& space, const Rational& delta, const Point& x,
                                   const Geodesic& gamma, const Geodesic& eta);
// diam(pi(x) + pi(y)) <= d(x, y) + 20 delta.
bool check_projection_lipschitz(const MetricSpace& space, const Rational& delta, const Point& x, const Point& y,
                                const Geodesic& gamma);
// When the projections are more than 20 delta apart, [x,y] has a subsegment 20 delta-fellow-travelling
// the part of gamma between them. Returns nullopt when the hypothesis fails.
std::optional<bool> check_projection_fellow_travel(const MetricSpace& space, const Rational& delta, const Point& x,
                                                   const Point& y, const Geodesic& gamma, const Geodesic& xy);
// K-aligned (g1, g2) forces one branch of the dichotomy at K + 60 delta; nullopt when not K-aligned.
std::optional<bool> check_behrstock(const MetricSpace& space, const Rational& delta, const Point& x,
                                    const Geodesic& g1, const Geodesic& g2, const Rational& K);

AppendixReport appendix_random(const Lab& lab, std::uint64_t trials, std::uint64_t seed,
                               std::int64_t point_length = 6);
// Every triple of vertices and every geodesic between them; 6-cycle sized graphs only.
AppendixReport appendix_exhaustive(const FiniteGraph& graph, std::size_t geodesic_cap = 64);

}  // namespace genlab
