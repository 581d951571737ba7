#include "genlab/hyperbolic.hpp"

#include <algorithm>
#include <limits>

namespace genlab {

Rational gromov_product(const MetricSpace& space, const Point& x, const Point& y, const Point& z) {
  return Rational(space.distance(x, z) + space.distance(z, y) - space.distance(x, y), 2);
}

bool within_bound(const Rational& v, const Rational& bound) { return bound == 0 ? v <= 0 : v < bound; }

std::int64_t ProjectionSet::diameter_with(std::size_t pos) const {
  const std::size_t lo = std::min(first(), pos), hi = std::max(last(), pos);
  return static_cast<std::int64_t>(hi - lo);
}

ProjectionSet project(const MetricSpace& space, const Point& x, const Geodesic& target) {
  ProjectionSet out;
  if (space.is_tree()) {
    // The projection is the median of x and the two endpoints.
    const std::int64_t dp = space.distance(target.start(), x);
    const std::int64_t dq = space.distance(target.end(), x);
    const auto t = static_cast<std::size_t>((dp + target.length() - dq) / 2);
    out.indices = {t};
    out.distance = space.distance(x, target[t]);
    return out;
  }
  out.distance = std::numeric_limits<std::int64_t>::max();
  for (std::size_t i = 0; i < target.size(); ++i) {
    const std::int64_t d = space.distance(x, target[i]);
    if (d < out.distance) {
      out.distance = d;
      out.indices.clear();
    }
    if (d == out.distance) out.indices.push_back(i);
  }
  return out;
}

ProjectionSet project(const MetricSpace& space, const Geodesic& source, const Geodesic& target) {
  ProjectionSet out;
  out.distance = std::numeric_limits<std::int64_t>::max();
  std::vector<char> hit(target.size(), 0);
  for (const auto& p : source.points()) {
    const auto part = project(space, p, target);
    out.distance = std::min(out.distance, part.distance);
    for (std::size_t i : part.indices) hit[i] = 1;
  }
  for (std::size_t i = 0; i < hit.size(); ++i)
    if (hit[i]) out.indices.push_back(i);
  return out;
}

std::int64_t distance_to(const MetricSpace& space, const Point& x, const Geodesic& target) {
  return project(space, x, target).distance;
}

std::int64_t AlignmentReport::max_diameter() const {
  std::int64_t m = 0;
  for (const auto& p : pairs) m = std::max({m, p.forward, p.backward});
  return m;
}

bool AlignmentReport::aligned_at(const Rational& K) const { return pairs.empty() || max_diameter() < K; }

nlohmann::json AlignmentReport::to_json(const MetricSpace& space) const {
  nlohmann::json seq = nlohmann::json::array();
  for (const auto& g : sequence)
    seq.push_back({{"start", space.format(g.start())}, {"end", space.format(g.end())}, {"length", g.length()}});
  nlohmann::json diam = nlohmann::json::array();
  for (const auto& p : pairs) diam.push_back({{"forward", p.forward}, {"backward", p.backward}});
  return {{"sequence", seq}, {"diameters", diam}, {"level", to_string(level)}, {"aligned", aligned}};
}

AlignmentReport check_alignment(const MetricSpace& space, const std::vector<Geodesic>& sequence, const Rational& K) {
  if (sequence.empty()) throw std::invalid_argument("alignment of an empty sequence");
  AlignmentReport r;
  r.sequence = sequence;
  r.level = K;
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
    const auto& a = sequence[i];
    const auto& b = sequence[i + 1];
    AlignmentPair p;
    p.forward = project(space, b, a).diameter_with(a.size() - 1);
    p.backward = project(space, a, b).diameter_with(0);
    r.pairs.push_back(p);
  }
  r.aligned = r.aligned_at(K);
  return r;
}

std::int64_t hausdorff_distance(const MetricSpace& space, const Geodesic& a, const Geodesic& b) {
  auto one_sided = [&](const Geodesic& from, const Geodesic& to) {
    std::int64_t worst = 0;
    for (const auto& p : from.points()) {
      std::int64_t best = std::numeric_limits<std::int64_t>::max();
      for (const auto& q : to.points()) best = std::min(best, space.distance(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a, b), one_sided(b, a));
}

FellowTravel fellow_travel(const MetricSpace& space, const Geodesic& a, const Geodesic& b) {
  return {space.distance(a.start(), b.start()), space.distance(a.end(), b.end()), hausdorff_distance(space, a, b)};
}

bool fellow_traveling(const MetricSpace& space, const Geodesic& a, const Geodesic& b, const Rational& eps) {
  return fellow_travel(space, a, b).worst() < eps;
}

const char* to_string(BehrstockBranch b) {
  switch (b) {
    case BehrstockBranch::kFirst: return "first";
    case BehrstockBranch::kSecond: return "second";
    case BehrstockBranch::kBoth: return "both";
    default: return "neither";
  }
}

BehrstockOutcome behrstock_dichotomy(const MetricSpace& space, const Point& x, const Geodesic& g1, const Geodesic& g2,
                                     const Rational& K, const Rational& delta) {
  auto pre = check_alignment(space, {g1, g2}, K);
  if (!pre.aligned) throw HypothesisError("(g1, g2) is not K-aligned", pre);
  BehrstockOutcome out;
  out.level = K + 60 * delta;
  const auto px = Geodesic::degenerate(x);
  out.first = check_alignment(space, {px, g2}, out.level);
  out.second = check_alignment(space, {g1, px}, out.level);
  if (out.first.aligned && out.second.aligned)
    out.branch = BehrstockBranch::kBoth;
  else if (out.first.aligned)
    out.branch = BehrstockBranch::kFirst;
  else if (out.second.aligned)
    out.branch = BehrstockBranch::kSecond;
  return out;
}

ChainReport chain_alignment(const MetricSpace& space, const std::vector<Geodesic>& sequence, const Rational& K,
                            const Rational& delta) {
  auto pre = check_alignment(space, sequence, K);
  if (!pre.aligned) throw HypothesisError("sequence is not K-aligned", pre);
  const Rational min_len = 2 * K + 120 * delta;
  for (std::size_t i = 1; i + 1 < sequence.size(); ++i)
    if (Rational(sequence[i].length()) <= min_len)
      throw HypothesisError("member " + std::to_string(i) + " is not longer than 2K + 120 delta");
  ChainReport r;
  r.level = K + 60 * delta;
  for (std::size_t i = 0; i < sequence.size(); ++i)
    for (std::size_t j = i + 1; j < sequence.size(); ++j) {
      ++r.pairs_checked;
      if (!check_alignment(space, {sequence[i], sequence[j]}, r.level).aligned && !r.violation) r.violation = {i, j};
    }
  return r;
}

SubsegmentReport aligned_subsegments(const MetricSpace& space, const Point& x, const std::vector<Geodesic>& gammas,
                                     const Point& y, const Rational& K, const Rational& delta) {
  return aligned_subsegments(space, space.geodesic(x, y), gammas, K, delta);
}

SubsegmentReport aligned_subsegments(const MetricSpace& space, const Geodesic& path,
                                     const std::vector<Geodesic>& gammas, const Rational& K, const Rational& delta) {
  std::vector<Geodesic> seq{Geodesic::degenerate(path.start())};
  seq.insert(seq.end(), gammas.begin(), gammas.end());
  seq.push_back(Geodesic::degenerate(path.end()));
  auto pre = check_alignment(space, seq, K);
  if (!pre.aligned) throw HypothesisError("(x, g_1, ..., g_n, y) is not K-aligned", pre);
  const Rational min_len = 2 * K + 140 * delta;
  for (std::size_t i = 0; i < gammas.size(); ++i)
    if (Rational(gammas[i].length()) <= min_len)
      throw HypothesisError("segment " + std::to_string(i) + " is not longer than 2K + 140 delta");

  SubsegmentReport r;
  r.path = path;
  r.certified = true;
  for (const auto& g : gammas) {
    SubsegmentCertificate c;
    const std::size_t p = project(space, path.start(), g).first();
    const std::size_t q = project(space, path.end(), g).last();
    c.gamma_prime = p <= q ? g.sub(p, q) : g.sub(q, p).reversed();
    const std::size_t a = project(space, c.gamma_prime.start(), path).first();
    const std::size_t b = project(space, c.gamma_prime.end(), path).last();
    c.begin = std::min(a, b);
    c.end = std::max(a, b);
    c.eta = path.sub(c.begin, c.end);
    if (a > b) c.eta = c.eta.reversed();
    c.eta_vs_prime = fellow_travel(space, c.eta, c.gamma_prime);
    c.prime_vs_gamma = fellow_travel(space, c.gamma_prime, g);
    c.certified = a <= b && c.eta_vs_prime.within(20 * delta) && c.prime_vs_gamma.within(K + 60 * delta);
    r.certified = r.certified && c.certified;
    r.segments.push_back(std::move(c));
  }
  // Consecutive segments may share an endpoint.
  r.disjoint_and_ordered = true;
  for (std::size_t i = 0; i + 1 < r.segments.size(); ++i)
    if (r.segments[i].end > r.segments[i + 1].begin) r.disjoint_and_ordered = false;
  r.certified = r.certified && r.disjoint_and_ordered;
  return r;
}

std::size_t project_to_orbit(const GroupAction& action, const OrbitSegment& segment, const NormalForm& h) {
  const auto p = project(action.space(), action.orbit(h), segment.projected);
  return segment.snap(static_cast<std::int64_t>(p.first()));
}

}  // namespace genlab
