#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <vector>

#include "genlab/space.hpp"

namespace genlab {

// (x, y)_z = (d(x, z) + d(z, y) - d(x, y)) / 2
Rational gromov_product(const MetricSpace& space, const Point& x, const Point& y, const Point& z);

// "v < bound", except that a zero bound means "v <= 0" (bounds that are multiples of delta on trees).
bool within_bound(const Rational& v, const Rational& bound);

// Nearest-point projection to a finite geodesic, as ascending positions along it.
struct ProjectionSet {
  std::vector<std::size_t> indices;
  std::int64_t distance = 0;  // common distance from the query to every member
  std::size_t first() const { return indices.front(); }
  std::size_t last() const { return indices.back(); }
  // diam(set plus the point at position pos); positions along a geodesic are isometric to an interval.
  std::int64_t diameter_with(std::size_t pos) const;
  std::int64_t diameter() const { return static_cast<std::int64_t>(last() - first()); }
};

ProjectionSet project(const MetricSpace& space, const Point& x, const Geodesic& target);
// Union of the projections of every point of source.
ProjectionSet project(const MetricSpace& space, const Geodesic& source, const Geodesic& target);
std::int64_t distance_to(const MetricSpace& space, const Point& x, const Geodesic& target);

struct AlignmentPair {
  std::int64_t forward = 0;   // diam(pi_{g_i}(g_{i+1}) + end of g_i)
  std::int64_t backward = 0;  // diam(pi_{g_{i+1}}(g_i) + start of g_{i+1})
};

struct AlignmentReport {
  std::vector<Geodesic> sequence;
  std::vector<AlignmentPair> pairs;
  Rational level;
  bool aligned = true;  // every recorded diameter < level

  std::int64_t max_diameter() const;
  bool aligned_at(const Rational& K) const;
  nlohmann::json to_json(const MetricSpace& space) const;
};

AlignmentReport check_alignment(const MetricSpace& space, const std::vector<Geodesic>& sequence, const Rational& K);

class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(const std::string& what, std::optional<AlignmentReport> report = std::nullopt)
      : std::runtime_error(what), report_(std::move(report)) {}
  const std::optional<AlignmentReport>& report() const { return report_; }

 private:
  std::optional<AlignmentReport> report_;
};

struct FellowTravel {
  std::int64_t start_gap = 0, end_gap = 0, hausdorff = 0;
  std::int64_t worst() const { return std::max({start_gap, end_gap, hausdorff}); }
  bool within(const Rational& eps) const { return within_bound(worst(), eps); }
};

std::int64_t hausdorff_distance(const MetricSpace& space, const Geodesic& a, const Geodesic& b);
FellowTravel fellow_travel(const MetricSpace& space, const Geodesic& a, const Geodesic& b);
// Endpoint gaps and Hausdorff distance all < eps.
bool fellow_traveling(const MetricSpace& space, const Geodesic& a, const Geodesic& b, const Rational& eps);

enum class BehrstockBranch { kFirst, kSecond, kBoth, kNeither };
const char* to_string(BehrstockBranch b);

struct BehrstockOutcome {
  BehrstockBranch branch = BehrstockBranch::kNeither;
  Rational level;
  AlignmentReport first;   // (x, g2)
  AlignmentReport second;  // (g1, x)
};

// Requires (g1, g2) K-aligned; tests both branches at K + 60 delta.
BehrstockOutcome behrstock_dichotomy(const MetricSpace& space, const Point& x, const Geodesic& g1, const Geodesic& g2,
                                     const Rational& K, const Rational& delta);

struct ChainReport {
  Rational level;
  std::size_t pairs_checked = 0;
  std::optional<std::pair<std::size_t, std::size_t>> violation;
  bool holds() const { return !violation.has_value(); }
};

// Requires a K-aligned sequence whose interior members are longer than 2K + 120 delta; checks every pair (i < j).
ChainReport chain_alignment(const MetricSpace& space, const std::vector<Geodesic>& sequence, const Rational& K,
                            const Rational& delta);

struct SubsegmentCertificate {
  std::size_t begin = 0, end = 0;  // positions of eta on [x, y]
  Geodesic eta;
  Geodesic gamma_prime;  // [pi(x), pi(y)] along gamma
  FellowTravel eta_vs_prime;
  FellowTravel prime_vs_gamma;
  bool certified = false;
};

struct SubsegmentReport {
  Geodesic path;
  std::vector<SubsegmentCertificate> segments;
  bool disjoint_and_ordered = false;
  bool certified = false;
};

// Requires (x, g_1, ..., g_n, y) K-aligned with each g_i longer than 2K + 140 delta.
SubsegmentReport aligned_subsegments(const MetricSpace& space, const Point& x, const std::vector<Geodesic>& gammas,
                                     const Point& y, const Rational& K, const Rational& delta);
SubsegmentReport aligned_subsegments(const MetricSpace& space, const Geodesic& path,
                                     const std::vector<Geodesic>& gammas, const Rational& K, const Rational& delta);

// Projection of h x0 to an orbit segment: nearest orbit index after projecting to its projected geodesic.
std::size_t project_to_orbit(const GroupAction& action, const OrbitSegment& segment, const NormalForm& h);

}  // namespace genlab
