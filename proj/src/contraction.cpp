#include "genlab/contraction.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace genlab {

namespace {

// Deterministic choice of up to k distinct indices from [begin, end), in increasing order.
std::vector<std::size_t> sample_indices(std::size_t begin, std::size_t end, std::size_t k, std::uint64_t seed) {
  std::vector<std::size_t> idx(end - begin);
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
  if (idx.size() <= k) return idx;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng() % (idx.size() - i)]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::int64_t span_with(const ProjectionSet& p, std::int64_t lo, std::int64_t hi) {
  return std::max(hi, static_cast<std::int64_t>(p.last())) - std::min(lo, static_cast<std::int64_t>(p.first()));
}

void require_loxodromic(const GroupAction& action, const NormalForm& phi) {
  if (action.space().is_tree() && action.tree_translation_length(phi) <= 0)
    throw std::invalid_argument("element " + action.group().format(phi) + " is not loxodromic on " +
                                action.space().name());
}

}  // namespace

NormOracle::NormOracle(const WordMetric& metric, std::int64_t ball_radius, std::int64_t r_max)
    : metric_(&metric), ball_(metric.ball(ball_radius)), r_max_(r_max), closed_form_(metric.closed_form()) {}

std::optional<std::int64_t> NormOracle::norm(const NormalForm& g, std::int64_t cap) const {
  cap = std::min(cap, r_max_);
  if (closed_form_) return metric_->norm(g, cap);
  if (auto n = ball_.norm(g)) return *n <= cap ? n : std::nullopt;
  if (!ball_.truncated() && cap <= ball_.radius()) return std::nullopt;
  return metric_->norm(g, cap);
}

std::optional<std::int64_t> NormOracle::distance(const NormalForm& g, const NormalForm& h, std::int64_t cap) const {
  const auto& G = metric_->model();
  return norm(G.multiply(G.inverse(g), h), cap);
}

std::int64_t least_contraction_constant(const std::vector<std::pair<std::int64_t, std::int64_t>>& samples) {
  std::int64_t hi = 0;
  for (const auto& [d, diam] : samples) hi = std::max({hi, d, diam});
  for (std::int64_t F = 0; F <= hi; ++F) {
    bool ok = true;
    for (const auto& [d, diam] : samples)
      if (d > F && diam > F) {
        ok = false;
        break;
      }
    if (ok) return F;
  }
  return hi;
}

std::int64_t ContractionProfile::constant_at_norm(std::int64_t norm) const {
  std::vector<std::pair<std::int64_t, std::int64_t>> v;
  for (const auto& s : samples)
    if (s.norm == norm) v.emplace_back(s.distance, s.diameter);
  return least_contraction_constant(v);
}

nlohmann::json ContractionProfile::to_json(const GroupModel& group) const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& s : samples)
    rows.push_back({{"g", group.format(s.g)},
                    {"norm", s.norm},
                    {"distance", s.distance},
                    {"ball_radius", s.ball_radius},
                    {"diameter", s.diameter}});
  return {{"element", group.format(element)},
          {"segment_length", segment_length},
          {"factor", to_string(factor)},
          {"F0", F0},
          {"truncated", truncated},
          {"seed", seed},
          {"samples", rows}};
}

ContractionProfile weak_contraction_profile(const NormOracle& norms, const GroupAction& action, const NormalForm& phi,
                                            std::int64_t M, const WeakContractionOptions& opts) {
  require_loxodromic(action, phi);
  const auto& G = action.group();
  const auto& space = action.space();
  const Ball& ball = norms.ball();
  ContractionProfile prof;
  prof.element = phi;
  prof.segment_length = M;
  prof.factor = opts.factor;
  prof.seed = opts.seed;
  const auto seg = OrbitSegment::make(action, {}, phi, M);

  std::vector<Point> ball_points(ball.size());
  for (std::size_t i = 0; i < ball.size(); ++i) ball_points[i] = action.orbit(ball.elements()[i]);

  const std::int64_t top = std::min(opts.max_norm, ball.radius());
  if (top < opts.max_norm || ball.truncated()) prof.truncated = true;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (std::int64_t r = opts.min_norm; r <= top; ++r) {
    for (std::size_t idx : sample_indices(ball.sphere_begin(r), ball.sphere_end(r), opts.samples_per_norm,
                                          opts.seed * 1000003 + static_cast<std::uint64_t>(r))) {
      ContractionSample s;
      s.g = ball.elements()[idx];
      s.norm = r;
      s.distance = r;
      for (const auto& p : seg.points)
        if (auto d = norms.distance(p, s.g, s.distance - 1)) s.distance = *d;
      s.ball_radius = floor_i64(opts.factor * s.distance);
      if (s.ball_radius > ball.radius()) {
        prof.truncated = true;
        continue;
      }
      std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = -1;
      for (std::size_t j = 0; j < ball.sphere_end(s.ball_radius); ++j) {
        const auto p = project(space, action.act(s.g, ball_points[j]), seg.projected);
        lo = std::min(lo, static_cast<std::int64_t>(p.first()));
        hi = std::max(hi, static_cast<std::int64_t>(p.last()));
      }
      s.diameter = hi - lo;
      pairs.emplace_back(s.distance, s.diameter);
      prof.samples.push_back(std::move(s));
    }
  }
  prof.F0 = least_contraction_constant(pairs);
  (void)G;
  return prof;
}

StrongContractionReport strong_contraction_check(const MetricSpace& space, const Geodesic& gamma, std::int64_t K,
                                                 std::int64_t max_distance) {
  // Multi-source search outward from gamma.
  std::unordered_map<Point, std::int64_t, PointHash> dist;
  std::vector<Point> order;
  std::queue<Point> frontier;
  for (const auto& p : gamma.points())
    if (dist.emplace(p, 0).second) frontier.push(p);
  while (!frontier.empty()) {
    Point u = frontier.front();
    frontier.pop();
    const std::int64_t du = dist[u];
    if (du > 0) order.push_back(u);
    if (du == max_distance) continue;
    for (const auto& v : space.neighbors(u))
      if (dist.emplace(v, du + 1).second) frontier.push(v);
  }
  StrongContractionReport r;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& x : order) {
    const std::int64_t d = dist[x];
    if (d <= 1) continue;  // no K >= 1 constrains these
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = -1;
    for (const auto& y : space.ball(x, d)) {
      const auto p = project(space, y, gamma);
      lo = std::min(lo, static_cast<std::int64_t>(p.first()));
      hi = std::max(hi, static_cast<std::int64_t>(p.last()));
    }
    ++r.points_scanned;
    r.max_diameter = std::max(r.max_diameter, hi - lo);
    pairs.emplace_back(d, hi - lo);
  }
  r.least_K = std::max<std::int64_t>(1, least_contraction_constant(pairs));
  r.holds = true;
  for (const auto& [d, diam] : pairs)
    if (d > K && diam > K) r.holds = false;
  return r;
}

LipschitzReport lipschitz_projection_bound(const NormOracle& norms, const GroupAction& action, const OrbitSegment& gamma,
                                           std::size_t samples, std::uint64_t seed) {
  const auto& G = action.group();
  const auto& space = action.space();
  const Ball& ball = norms.ball();
  const auto& gens = norms.metric().gens();
  LipschitzReport rep;
  std::mt19937_64 rng(seed);
  auto proj = [&](const NormalForm& g) { return project(space, action.orbit(g), gamma.projected); };
  for (std::size_t n = 0; n < samples; ++n) {
    const NormalForm g = G.multiply(gamma.base, ball.elements()[rng() % ball.size()]);
    const auto pg = proj(g);
    std::int64_t dg = std::numeric_limits<std::int64_t>::max();
    for (const auto& p : gamma.points)
      if (auto d = norms.distance(p, g, std::min(dg, norms.r_max() + 1) - 1)) dg = *d;
    if (dg == std::numeric_limits<std::int64_t>::max()) continue;
    for (std::size_t k = 0; k < gamma.points.size(); ++k) {
      const auto pos = gamma.orbit_positions[k];
      const auto dgh = norms.distance(g, gamma.points[k]);
      if (!dgh) continue;
      const Rational ratio(*dgh, dg + span_with(pg, pos, pos) + 1);
      rep.K1 = std::max(rep.K1, ratio);
    }
    // K0 on a neighbour and on an independent sample.
    const Letter s = static_cast<Letter>(1 + rng() % gens.size()) * (rng() % 2 ? 1 : -1);
    const NormalForm h1 = G.multiply(g, gens.key(s));
    const NormalForm h2 = G.multiply(gamma.base, ball.elements()[rng() % ball.size()]);
    for (const auto& h : {h1, h2}) {
      const auto d = norms.distance(g, h);
      if (!d) continue;
      const auto ph = proj(h);
      const std::int64_t diam = std::max(pg.last(), ph.last()) - std::min(pg.first(), ph.first());
      rep.K0 = std::max(rep.K0, Rational(diam, *d + 1));
    }
    ++rep.samples;
  }
  return rep;
}

WpdCensus wpd_census(const NormOracle& norms, const GroupAction& action, const NormalForm& phi, std::int64_t n,
                     std::int64_t L, std::int64_t search_radius) {
  const auto& G = action.group();
  const auto& space = action.space();
  const Ball& ball = norms.ball();
  if (search_radius > ball.radius()) throw std::invalid_argument("search radius exceeds the cached ball");
  WpdCensus c;
  c.element = phi;
  c.n = n;
  c.L = L;
  c.search_radius = search_radius;
  c.counts_by_radius.assign(static_cast<std::size_t>(search_radius) + 1, 0);
  const NormalForm phin = G.power(phi, n);
  const Point x0 = space.basepoint();
  const Point xn = action.orbit(phin);
  const Geodesic axis = space.geodesic(x0, xn);
  std::vector<NormalForm> phi_pows;
  for (std::int64_t i = 0; i <= n; ++i) phi_pows.push_back(G.power(phi, i));
  auto min_offset = [&](const NormalForm& h, std::int64_t cap) {
    std::int64_t best = cap;
    for (const auto& a : phi_pows)
      for (const auto& b : phi_pows) {
        if (best == 0) return best;
        if (auto d = norms.distance(a, G.multiply(h, b), best - 1)) best = *d;
      }
    return best;
  };

  std::vector<std::pair<std::int64_t, std::int64_t>> pd;  // (projection diameter, min offset)
  for (std::size_t i = 0; i < ball.sphere_end(search_radius); ++i) {
    const NormalForm& h = ball.elements()[i];
    const Point hx = action.orbit(h);
    const Point hxn = action.act(h, xn);
    if (space.distance(x0, hx) < L && space.distance(xn, hxn) < L) {
      c.witnesses.push_back(h);
      ++c.counts_by_radius[static_cast<std::size_t>(ball.norm_at(i))];
    }
    const auto proj = project(space, space.geodesic(hx, hxn), axis);
    const std::int64_t diam = proj.diameter();
    if (diam >= 2) pd.emplace_back(diam, min_offset(h, ball.norm_at(i) + 1));
  }
  for (std::size_t r = 1; r < c.counts_by_radius.size(); ++r) c.counts_by_radius[r] += c.counts_by_radius[r - 1];
  const auto& cr = c.counts_by_radius;
  c.stabilized = cr.size() >= 3 && cr[cr.size() - 1] == cr[cr.size() - 2] && cr[cr.size() - 2] == cr[cr.size() - 3];
  c.E0 = 1;
  for (;; ++c.E0) {
    bool ok = true;
    for (const auto& [diam, off] : pd)
      if (diam > c.E0 && off >= c.E0) {
        ok = false;
        break;
      }
    if (ok) break;
  }
  for (const auto& h : c.witnesses)
    if (min_offset(h, c.E0) >= c.E0) c.exceptional.push_back(h);
  return c;
}

Rational linkage_product(const GroupAction& action, const GeneratingSet& gens, const NormalForm& phi,
                         const NormalForm& g, Letter s, int sign, std::int64_t horizon) {
  const auto& G = action.group();
  const auto& space = action.space();
  const Point x0 = space.basepoint();
  const Point y = action.orbit(s == 0 ? g : G.multiply(gens.key(s), g));
  const NormalForm step = sign > 0 ? phi : G.inverse(phi);
  NormalForm p;
  Rational best = 0;
  for (std::int64_t i = 1; i <= horizon; ++i) {
    p = G.multiply(p, step);
    best = std::max(best, gromov_product(space, action.orbit(p), y, x0));
  }
  return best;
}

Linkage select_linkage(const GroupAction& action, const GeneratingSet& gens, const NormalForm& phi,
                       const NormalForm& g, std::int64_t horizon) {
  require_loxodromic(action, phi);
  std::vector<Letter> candidates{0};
  for (std::size_t i = 1; i <= gens.size(); ++i) {
    candidates.push_back(static_cast<Letter>(i));
    candidates.push_back(-static_cast<Letter>(i));
  }
  Linkage out;
  for (int sign : {1, -1}) {
    Letter best = 0;
    Rational best_val = -1;
    for (Letter c : candidates) {
      const Rational v = linkage_product(action, gens, phi, g, c, sign, horizon);
      if (best_val < 0 || v < best_val) {
        best = c;
        best_val = v;
      }
    }
    if (linkage_product(action, gens, phi, g, best, sign, 2 * horizon) != best_val) out.horizon_stable = false;
    if (sign > 0) {
      out.s = best;
      out.forward_product = best_val;
    } else {
      out.t = best;
      out.backward_product = best_val;
    }
  }
  return out;
}

nlohmann::json LedgerMeasurement::to_json() const {
  return {{"delta", to_string(constants.delta)},
          {"C0", to_string(constants.C0)},
          {"D_C", to_string(constants.D_C)},
          {"D_S", to_string(constants.D_S)},
          {"E0", to_string(constants.E0)},
          {"E0_nonelementary", to_string(E0_nonelementary)},
          {"E0_wpd", to_string(E0_wpd)},
          {"F0", to_string(constants.F0)},
          {"K0", to_string(constants.K0)},
          {"K1", to_string(constants.K1)},
          {"weak_contraction_truncated", weak.truncated},
          {"lipschitz_samples", lipschitz.samples}};
}

LedgerMeasurement measure_ledger(const NormOracle& norms, const GroupAction& action, const NormalForm& phi,
                                 const MeasurementOptions& opts) {
  require_loxodromic(action, phi);
  const auto& space = action.space();
  const auto& gens = norms.metric().gens();
  const Ball& ball = norms.ball();
  LedgerMeasurement m;
  auto& c = m.constants;
  c.delta = space.delta();
  const Point x0 = space.basepoint();
  std::int64_t c0 = 0;
  for (std::size_t i = 1; i <= gens.size(); ++i)
    for (Letter s : {static_cast<Letter>(i), -static_cast<Letter>(i)})
      c0 = std::max(c0, space.distance(x0, action.orbit(gens.key(s))));
  c.C0 = c0;
  c.D_C = space.distance(x0, action.orbit(phi));
  c.D_S = norms.norm(phi).value_or(norms.r_max());

  const std::int64_t horizon = 3 * opts.segment_length;
  const std::size_t top = ball.sphere_end(std::min(opts.sample_radius, ball.radius()));
  for (std::size_t idx : sample_indices(0, top, opts.samples, opts.seed)) {
    const auto link = select_linkage(action, gens, phi, ball.elements()[idx], horizon);
    m.E0_nonelementary = std::max(m.E0_nonelementary, link.achieved());
  }
  m.E0_wpd = wpd_census(norms, action, phi, opts.wpd_n, opts.wpd_L, std::min(opts.wpd_radius, ball.radius())).E0;
  c.E0 = std::max(m.E0_nonelementary, m.E0_wpd);

  WeakContractionOptions w;
  w.max_norm = std::min(opts.sample_radius, ball.radius());
  w.samples_per_norm = std::max<std::size_t>(1, opts.samples / static_cast<std::size_t>(std::max<std::int64_t>(1, w.max_norm)));
  w.seed = opts.seed;
  m.weak = weak_contraction_profile(norms, action, phi, opts.segment_length, w);
  c.F0 = m.weak.F0;
  m.lipschitz = lipschitz_projection_bound(norms, action, OrbitSegment::make(action, {}, phi, opts.segment_length),
                                           opts.samples, opts.seed);
  c.K0 = m.lipschitz.K0;
  c.K1 = m.lipschitz.K1;
  return m;
}

}  // namespace genlab
