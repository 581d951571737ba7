#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <vector>

#include "genlab/hyperbolic.hpp"
#include "genlab/ledger.hpp"
#include "genlab/word_metric.hpp"

namespace genlab {

// Word norms served from a cached ball, the closed form, or bidirectional search up to r_max.
class NormOracle {
 public:
  NormOracle(const WordMetric& metric, std::int64_t ball_radius, std::int64_t r_max);
  const WordMetric& metric() const { return *metric_; }
  const Ball& ball() const { return ball_; }
  std::int64_t r_max() const { return r_max_; }
  std::optional<std::int64_t> norm(const NormalForm& g) const { return norm(g, r_max_); }
  std::optional<std::int64_t> distance(const NormalForm& g, const NormalForm& h) const { return distance(g, h, r_max_); }
  // Absent when the value exceeds cap.
  std::optional<std::int64_t> norm(const NormalForm& g, std::int64_t cap) const;
  std::optional<std::int64_t> distance(const NormalForm& g, const NormalForm& h, std::int64_t cap) const;

 private:
  const WordMetric* metric_;
  Ball ball_;
  std::int64_t r_max_;
  bool closed_form_;
};

struct ContractionSample {
  NormalForm g;
  std::int64_t norm = 0;          // ||g||_S
  std::int64_t distance = 0;      // d_S(g, gamma)
  std::int64_t ball_radius = 0;   // floor(factor * distance)
  std::int64_t diameter = 0;      // diam of pi_gamma over the ball
};

struct ContractionProfile {
  NormalForm element;
  std::int64_t segment_length = 0;
  Rational factor;
  std::vector<ContractionSample> samples;
  std::int64_t F0 = 0;  // least F with: distance > F implies diameter <= F
  bool truncated = false;
  std::uint64_t seed = 0;

  // Least passing constant over the samples of a given word norm.
  std::int64_t constant_at_norm(std::int64_t norm) const;
  nlohmann::json to_json(const GroupModel& group) const;
};

// Least F >= 0 such that every (distance, diameter) pair with distance > F has diameter <= F.
std::int64_t least_contraction_constant(const std::vector<std::pair<std::int64_t, std::int64_t>>& samples);

struct WeakContractionOptions {
  std::int64_t min_norm = 1, max_norm = 8;
  std::size_t samples_per_norm = 64;  // whole sphere when smaller
  Rational factor{1, 2};
  std::uint64_t seed = 1;
};

// Samples g by word norm; the phi-orbit segment is (id, phi, ..., phi^M).
ContractionProfile weak_contraction_profile(const NormOracle& norms, const GroupAction& action, const NormalForm& phi,
                                            std::int64_t M, const WeakContractionOptions& opts = {});

struct StrongContractionReport {
  bool holds = false;           // at the requested K
  std::int64_t least_K = 0;     // least K >= 1 passing on the scanned points
  std::size_t points_scanned = 0;
  std::int64_t max_diameter = 0;
};

// Definition of K-strong contraction in the space itself, scanning every x with K < d(x, gamma) <= max_distance.
StrongContractionReport strong_contraction_check(const MetricSpace& space, const Geodesic& gamma, std::int64_t K,
                                                 std::int64_t max_distance);

struct LipschitzReport {
  Rational K1 = 0;  // max d_S(g, h) / (d_S(g, gamma) + diam(pi_gamma(g) + h x0) + 1)
  Rational K0 = 0;  // max diam(pi_gamma(g) + pi_gamma(h)) / (d_S(g, h) + 1)
  std::size_t samples = 0;
};

LipschitzReport lipschitz_projection_bound(const NormOracle& norms, const GroupAction& action, const OrbitSegment& gamma,
                                           std::size_t samples, std::uint64_t seed = 1);

struct WpdCensus {
  NormalForm element;
  std::int64_t n = 0;
  std::int64_t L = 0;
  std::int64_t search_radius = 0;
  std::vector<NormalForm> witnesses;
  std::vector<std::uint64_t> counts_by_radius;  // witnesses inside B_S(r), r = 0..search_radius
  bool stabilized = false;                      // last two increments add nothing
  std::int64_t E0 = 0;                          // least E for the WPD conclusion over the whole search ball
  std::vector<NormalForm> exceptional;          // witnesses with no (i, j) at d_S(phi^i, h phi^j) < E0
  std::size_t count() const { return witnesses.size(); }
};

WpdCensus wpd_census(const NormOracle& norms, const GroupAction& action, const NormalForm& phi, std::int64_t n,
                     std::int64_t L, std::int64_t search_radius);

struct Linkage {
  Letter s = 0, t = 0;  // 0 = identity
  Rational forward_product, backward_product;
  Rational achieved() const { return std::max(forward_product, backward_product); }
  bool horizon_stable = true;
};

// max over 1 <= i <= horizon of (phi^{sign i} x0, s g x0)_{x0}.
Rational linkage_product(const GroupAction& action, const GeneratingSet& gens, const NormalForm& phi,
                         const NormalForm& g, Letter s, int sign, std::int64_t horizon);
// Argmin over s, t in S^{+-} plus the identity, ties to the identity then to the letter order.
Linkage select_linkage(const GroupAction& action, const GeneratingSet& gens, const NormalForm& phi,
                       const NormalForm& g, std::int64_t horizon);

struct LedgerMeasurement {
  MeasuredConstants constants;
  Rational E0_nonelementary, E0_wpd;
  ContractionProfile weak;
  LipschitzReport lipschitz;
  nlohmann::json to_json() const;
};

struct MeasurementOptions {
  std::int64_t sample_radius = 6;
  std::int64_t segment_length = 6;
  std::int64_t wpd_n = 4;
  std::int64_t wpd_L = 2;
  std::int64_t wpd_radius = 6;
  std::size_t samples = 200;
  std::uint64_t seed = 1;
};

LedgerMeasurement measure_ledger(const NormOracle& norms, const GroupAction& action, const NormalForm& phi,
                                 const MeasurementOptions& opts = {});

}  // namespace genlab
