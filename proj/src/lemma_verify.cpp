#include "genlab/lemma_verify.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace genlab {

namespace {

using nlohmann::json;

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

json segments_json(const GroupModel& group, const std::vector<OrbitSegment>& segments) {
  json out = json::array();
  for (const auto& s : segments)
    out.push_back({{"base", group.format(s.base)}, {"phi", group.format(s.element)}, {"length", s.length}});
  return out;
}

std::int64_t must_distance(const Lab& lab, const NormalForm& a, const NormalForm& b) {
  const auto d = certified_distance(lab, a, b);
  if (!d) throw std::runtime_error("word distance exceeds the search cap");
  return *d;
}

Geodesic point_geodesic(const Lab& lab, const NormalForm& g) { return Geodesic::degenerate(lab.action().orbit(g)); }

Certification certify_sequence(const Lab& lab, const NormalForm& g, const std::vector<OrbitSegment>& segments,
                               const NormalForm& h, std::int64_t M, const Rational& K, const Rational& threshold) {
  Certification c;
  if (segments.empty()) {
    c.reason = "no segments";
    return c;
  }
  if (Rational(M) <= threshold) {
    c.reason = "segment length " + std::to_string(M) + " does not exceed threshold " + to_string(threshold);
    return c;
  }
  for (const auto& s : segments)
    if (s.length != M) {
      c.reason = "segment lengths differ";
      return c;
    }
  std::vector<Geodesic> seq{point_geodesic(lab, g)};
  for (const auto& s : segments) seq.push_back(s.projected);
  seq.push_back(point_geodesic(lab, h));
  c.alignment = check_alignment(lab.space(), seq, K);
  c.certified = c.alignment->aligned;
  if (!c.certified) c.reason = "not K-aligned (max diameter " + std::to_string(c.alignment->max_diameter()) + ")";
  return c;
}

std::optional<std::vector<NormalForm>> fixed_geodesic(const Lab& lab, const NormalForm& g, const NormalForm& h) {
  return lab.metric().geodesic_path(g, h, kGeodesicCap);
}

LemmaOutcome skipped(std::string lemma, const std::string& id, std::string reason) {
  LemmaOutcome o;
  o.lemma = std::move(lemma);
  o.instance = id;
  o.skipped = true;
  o.skip_reason = std::move(reason);
  return o;
}

}  // namespace

json ConcatInstance::to_json(const GroupModel& group) const {
  return {{"id", id},
          {"g", group.format(g)},
          {"h", group.format(h)},
          {"K", genlab::to_string(K)},
          {"M", M},
          {"segments", segments_json(group, segments)}};
}

json QuadraticInstance::to_json(const GroupModel& group) const {
  return {{"id", id},
          {"g", group.format(g)},
          {"h1", group.format(h1)},
          {"h2", group.format(h2)},
          {"K", genlab::to_string(K)},
          {"M", M},
          {"segments", segments_json(group, segments)}};
}

bool LemmaOutcome::passed() const {
  if (skipped) return false;
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

json LemmaOutcome::to_json(const GroupModel& group) const {
  json j{{"lemma", lemma}, {"instance", instance}, {"skipped", skipped}};
  if (skipped) {
    j["skip_reason"] = skip_reason;
    return j;
  }
  j["pass"] = passed();
  json vs = json::array();
  for (const auto& v : verdicts) {
    json w = json::array();
    for (const auto& x : v.witnesses) w.push_back(group.format(x));
    vs.push_back({{"index", v.index},
                  {"lhs", genlab::to_string(v.lhs)},
                  {"rhs", genlab::to_string(v.rhs)},
                  {"pass", v.pass},
                  {"witnesses", w},
                  {"detail", v.detail}});
  }
  j["verdicts"] = vs;
  return j;
}

Certification certify_concat(const Lab& lab, const ConcatInstance& inst, const Rational& threshold) {
  return certify_sequence(lab, inst.g, inst.segments, inst.h, inst.M, inst.K, threshold);
}

ConcatInstance random_concat_instance(const Lab& lab, std::mt19937_64& rng, const InstanceOptions& opts,
                                      std::string id) {
  if (opts.segments == 0) throw std::invalid_argument("an instance needs at least one segment");
  const auto& G = lab.group();
  const auto& space = lab.space();
  ConcatInstance inst;
  inst.id = std::move(id);
  inst.K = opts.K;
  inst.M = opts.M;
  // Redraw a connecting piece a bounded number of times until its local pair is K-aligned.
  constexpr int kAttempts = 32;
  auto draw = [&](std::int64_t max_length, auto&& aligned) {
    NormalForm w;
    for (int t = 0; t < kAttempts; ++t) {
      w = lab.random_element(rng, uniform(rng, 0, max_length));
      if (aligned(w)) break;
    }
    return w;
  };
  auto pair_aligned = [&](const Geodesic& a, const Geodesic& b) {
    return check_alignment(space, {a, b}, opts.K).aligned;
  };

  const NormalForm a = lab.random_element(rng, uniform(rng, 0, opts.base_length));
  const NormalForm step = G.power(lab.phi(), opts.M);
  NormalForm base = a;
  for (std::size_t i = 0; i < opts.segments; ++i) {
    if (i > 0) {
      const NormalForm end = G.multiply(base, step);
      const Geodesic& prev = inst.segments.back().projected;
      const NormalForm w = draw(opts.link_length, [&](const NormalForm& w) {
        const NormalForm b = G.multiply(end, w);
        return pair_aligned(prev, space.geodesic(lab.action().orbit(b), lab.action().orbit(G.multiply(b, step))));
      });
      base = G.multiply(end, w);
    }
    inst.segments.push_back(OrbitSegment::make(lab.action(), base, lab.phi(), opts.M));
  }
  const Geodesic& first = inst.segments.front().projected;
  const Geodesic& last = inst.segments.back().projected;
  inst.g = G.multiply(a, draw(opts.tail_length, [&](const NormalForm& u) {
    return pair_aligned(point_geodesic(lab, G.multiply(a, u)), first);
  }));
  const NormalForm& tip = inst.segments.back().points.back();
  inst.h = G.multiply(tip, draw(opts.tail_length, [&](const NormalForm& v) {
    return pair_aligned(last, point_geodesic(lab, G.multiply(tip, v)));
  }));
  return inst;
}

std::optional<std::int64_t> certified_distance(const Lab& lab, const NormalForm& a, const NormalForm& b,
                                               std::int64_t cap) {
  const auto& G = lab.group();
  if (G.kind() == ModelKind::kBraid3 && lab.gens().is_standard())
    return Braid3::certified_norm(G.multiply(G.inverse(a), b));
  return lab.metric().distance(a, b, cap);
}

LemmaOutcome verify_midpoint_capture(const Lab& lab, const ConstantLedger& ledger, const ConcatInstance& inst) {
  const char* lemma = "midpoint-capture";
  if (inst.segments.size() != 1) return skipped(lemma, inst.id, "expects exactly one segment");
  const auto cert = certify_concat(lab, inst, ledger.midpoint_threshold(inst.K));
  if (!cert.certified) return skipped(lemma, inst.id, cert.reason);
  const auto path = fixed_geodesic(lab, inst.g, inst.h);
  if (!path) return skipped(lemma, inst.id, "geodesic [g,h] beyond the search cap");

  const auto& seg = inst.segments.front();
  const NormalForm& q = seg.midpoint();
  const auto ell = seg.projected.length();
  InequalityVerdict v;
  v.rhs = Rational(must_distance(lab, inst.g, q) + must_distance(lab, q, inst.h), 100);
  std::optional<std::size_t> best;
  std::int64_t best_d = 0;
  for (std::size_t i = 0; i < path->size(); ++i) {
    const auto proj = project(lab.space(), lab.action().orbit((*path)[i]), seg.projected);
    const bool middle = 3 * static_cast<std::int64_t>(proj.first()) >= ell &&
                        3 * static_cast<std::int64_t>(proj.last()) <= 2 * ell;
    if (!middle) continue;
    const std::int64_t d = must_distance(lab, (*path)[i], q);
    if (!best || d < best_d) {
      best = i;
      best_d = d;
    }
  }
  LemmaOutcome out;
  out.lemma = lemma;
  out.instance = inst.id;
  if (!best) {
    v.lhs = Rational(std::numeric_limits<std::int64_t>::max());
    v.detail = "no vertex of [g,h]_S projects into the middle third";
  } else {
    v.lhs = best_d;
    v.pass = v.lhs <= v.rhs;
    v.witnesses = {(*path)[*best], q};
    v.detail = "position " + std::to_string(*best) + " of " + std::to_string(path->size() - 1);
  }
  out.verdicts.push_back(std::move(v));
  return out;
}

namespace {

struct ChainData {
  std::vector<NormalForm> path;
  std::vector<NormalForm> q;            // q_0 = g, q_1..q_n midpoints, q_{n+1} = h
  std::vector<std::int64_t> gaps;       // d_S(q_j, q_{j+1})
  std::vector<std::vector<std::int64_t>> dist;  // dist[i][j] = d_S(q_i, path_j), i = 1..n
};

ChainData chain_data(const Lab& lab, const ConcatInstance& inst, const std::vector<NormalForm>& path) {
  ChainData c;
  c.path = path;
  c.q.push_back(inst.g);
  for (const auto& s : inst.segments) c.q.push_back(s.midpoint());
  c.q.push_back(inst.h);
  for (std::size_t j = 0; j + 1 < c.q.size(); ++j) c.gaps.push_back(must_distance(lab, c.q[j], c.q[j + 1]));
  c.dist.resize(c.q.size());
  for (std::size_t i = 1; i + 1 < c.q.size(); ++i)
    for (const auto& p : path) c.dist[i].push_back(must_distance(lab, c.q[i], p));
  return c;
}

}  // namespace

LemmaOutcome verify_chain_capture(const Lab& lab, const ConstantLedger& ledger, const ConcatInstance& inst) {
  const char* lemma = "chain-capture";
  const auto cert = certify_concat(lab, inst, ledger.chain_threshold(inst.K));
  if (!cert.certified) return skipped(lemma, inst.id, cert.reason);
  const auto path = fixed_geodesic(lab, inst.g, inst.h);
  if (!path) return skipped(lemma, inst.id, "geodesic [g,h] beyond the search cap");
  const auto c = chain_data(lab, inst, *path);
  const std::size_t n = inst.segments.size();

  LemmaOutcome out;
  out.lemma = lemma;
  out.instance = inst.id;
  std::vector<Rational> rhs(n + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    Rational weight{1};
    for (std::size_t l = 1; l <= i; ++l) {
      weight /= 30;
      rhs[i] += weight * c.gaps[i - l];
    }
    weight = 1;
    for (std::size_t l = 1; l <= n - i + 1; ++l) {
      weight /= 30;
      rhs[i] += weight * c.gaps[i + l - 1];
    }
  }
  auto feasible = [&](std::size_t i, std::size_t j) { return Rational(c.dist[i][j]) <= rhs[i]; };
  // latest[i]: last admissible position for p_i that still leaves room for p_{i+1}, ..., p_n.
  std::vector<std::optional<std::size_t>> latest(n + 2);
  std::size_t bound = c.path.size() - 1;
  for (std::size_t i = n; i >= 1; --i) {
    for (std::size_t j = bound + 1; j-- > 0;)
      if (feasible(i, j)) {
        latest[i] = j;
        break;
      }
    if (!latest[i]) break;
    bound = *latest[i];
  }
  std::size_t from = 0;
  bool chain_ok = true;
  for (std::size_t i = 1; i <= n; ++i) {
    InequalityVerdict v;
    v.index = i;
    v.rhs = rhs[i];
    chain_ok = chain_ok && latest[i].has_value() && *latest[i] >= from;
    const std::size_t hi = chain_ok ? *latest[i] : c.path.size() - 1;
    // Closest admissible point in order; without a chain, the closest point from `from` on.
    std::optional<std::size_t> chosen;
    for (std::size_t j = from; j <= hi; ++j) {
      if (chain_ok && !feasible(i, j)) continue;
      if (!chosen || c.dist[i][j] < c.dist[i][*chosen]) chosen = j;
    }
    if (!chosen) chosen = from;
    v.lhs = c.dist[i][*chosen];
    v.pass = chain_ok;
    v.witnesses = {c.path[*chosen], c.q[i]};
    v.detail = "position " + std::to_string(*chosen);
    if (chain_ok) from = *chosen;
    out.verdicts.push_back(std::move(v));
  }
  return out;
}

LemmaOutcome verify_distance_sum(const Lab& lab, const ConstantLedger& ledger, const ConcatInstance& inst) {
  const char* lemma = "distance-sum";
  const auto cert = certify_concat(lab, inst, ledger.chain_threshold(inst.K));
  if (!cert.certified) return skipped(lemma, inst.id, cert.reason);
  const auto path = fixed_geodesic(lab, inst.g, inst.h);
  if (!path) return skipped(lemma, inst.id, "geodesic [g,h] beyond the search cap");
  const auto c = chain_data(lab, inst, *path);

  InequalityVerdict v;
  std::int64_t sum = 0;
  for (std::size_t i = 1; i + 1 < c.q.size(); ++i) {
    const auto it = std::min_element(c.dist[i].begin(), c.dist[i].end());
    sum += *it;
    v.witnesses.push_back(c.path[static_cast<std::size_t>(it - c.dist[i].begin())]);
  }
  v.lhs = sum;
  v.rhs = Rational(static_cast<std::int64_t>(c.path.size()) - 1, 2);
  v.pass = v.lhs <= v.rhs;
  LemmaOutcome out;
  out.lemma = lemma;
  out.instance = inst.id;
  out.verdicts.push_back(std::move(v));
  return out;
}

QuadraticInstance quadratic_instance(const Lab& lab, std::mt19937_64& rng, std::size_t N, std::int64_t M,
                                     const Rational& K, std::string id, std::int64_t base_length,
                                     std::int64_t gap_max, std::int64_t tail_length) {
  const auto& G = lab.group();
  if (G.kind() != ModelKind::kBraid3) throw UnsupportedModel("quadratic instances need the braid model");
  if (N == 0) throw std::invalid_argument("an instance needs at least one segment");
  QuadraticInstance inst;
  inst.id = std::move(id);
  inst.K = K;
  inst.M = M;
  const NormalForm a = lab.random_element(rng, uniform(rng, 0, base_length));
  inst.g = a;
  std::int64_t offset = uniform(rng, 0, gap_max);
  for (std::size_t i = 0; i < N; ++i) {
    inst.segments.push_back(OrbitSegment::make(lab.action(), G.multiply(a, G.power(lab.phi(), offset)), lab.phi(), M));
    offset += M + uniform(rng, 0, gap_max);
  }
  Word tail;
  for (std::int64_t i = uniform(rng, 0, tail_length); i > 0; --i) tail.push_back(static_cast<Letter>(uniform(rng, 1, 2)));
  const NormalForm P = G.multiply_word(G.power(lab.phi(), offset), tail);
  const std::int64_t c = Braid3::central_exponent(P);
  const auto s = static_cast<std::int64_t>(P.empty() ? 0 : P.size() - 1);
  const std::int64_t k = std::max({c + s, -c, std::int64_t{0}}) + uniform(rng, 0, 2);
  inst.h1 = G.multiply(a, G.multiply(Braid3::delta_squared_power(k), P));
  inst.h2 = G.multiply(a, G.multiply(Braid3::delta_squared_power(-k), P));
  return inst;
}

LemmaOutcome verify_quadratic_length(const Lab& lab, const ConstantLedger& ledger, const QuadraticInstance& inst) {
  const char* lemma = "quadratic-length";
  const Rational threshold = ledger.chain_threshold(inst.K);
  for (const auto* h : {&inst.h1, &inst.h2}) {
    const auto cert = certify_sequence(lab, inst.g, inst.segments, *h, inst.M, inst.K, threshold);
    if (!cert.certified) return skipped(lemma, inst.id, cert.reason);
  }
  const auto d1 = certified_distance(lab, inst.h1, inst.g);
  const auto d2 = certified_distance(lab, inst.g, inst.h2);
  const auto d12 = certified_distance(lab, inst.h1, inst.h2);
  if (!d1 || !d2 || !d12) return skipped(lemma, inst.id, "word distances not certified");
  if (*d1 + *d2 != *d12) return skipped(lemma, inst.id, "g is not on a geodesic from h1 to h2");

  InequalityVerdict v;
  const auto N = static_cast<std::int64_t>(inst.segments.size());
  const std::int64_t excess = std::max<std::int64_t>(0, N - inst.M - 1);
  v.lhs = *d12;
  v.rhs = ledger.K_map() * Rational(excess * excess);
  v.pass = v.lhs >= v.rhs;
  v.witnesses = {inst.h1, inst.g, inst.h2};
  v.detail = "d(h1,g) = " + std::to_string(*d1) + ", d(g,h2) = " + std::to_string(*d2);
  LemmaOutcome out;
  out.lemma = lemma;
  out.instance = inst.id;
  out.verdicts.push_back(std::move(v));
  return out;
}

void LemmaSummary::record(const LemmaOutcome& outcome, const json& instance) {
  ++generated;
  if (outcome.skipped) return;
  ++certified;
  const bool ok = outcome.passed();
  ok ? ++passed : ++failed;
  for (const auto& v : outcome.verdicts) {
    // Quadratic length is a lower bound, so its margin runs the other way.
    const Rational margin = outcome.lemma == "quadratic-length" ? v.lhs - v.rhs : v.margin();
    if (!min_margin || margin < *min_margin) min_margin = margin;
    const Rational& num = outcome.lemma == "quadratic-length" ? v.rhs : v.lhs;
    const Rational& den = outcome.lemma == "quadratic-length" ? v.lhs : v.rhs;
    if (den > 0) max_ratio = std::max(max_ratio, to_double(Rational(num / den)));
  }
  if (!ok && failures.size() < 5) failures.push_back({{"instance", instance}, {"lemma", outcome.lemma}});
}

json LemmaSummary::to_json() const {
  json j{{"lemma", lemma},       {"model", model},   {"generated", generated}, {"certified", certified},
         {"passed", passed},     {"failed", failed}, {"acceptance", acceptance()}, {"max_ratio", max_ratio},
         {"failures", failures}};
  j["min_margin"] = min_margin ? json(genlab::to_string(*min_margin)) : json(nullptr);
  return j;
}

std::int64_t least_length_above(const Rational& threshold) { return floor_i64(threshold) + 1; }

std::vector<LemmaSummary> run_concat_suite(const Lab& lab, const ConstantLedger& ledger, const SuiteOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::vector<LemmaSummary> out(3);
  out[0].lemma = "midpoint-capture";
  out[1].lemma = "chain-capture";
  out[2].lemma = "distance-sum";
  for (auto& s : out) s.model = lab.id();
  const std::size_t max_segments = std::max<std::size_t>(2, opts.max_segments);
  for (std::uint64_t i = 0; i < opts.instances; ++i) {
    InstanceOptions io;
    io.K = opts.K;
    io.segments = 1;
    io.M = least_length_above(ledger.midpoint_threshold(opts.K)) + uniform(rng, 0, opts.extra_length);
    const auto single = random_concat_instance(lab, rng, io, "m" + std::to_string(i));
    out[0].record(verify_midpoint_capture(lab, ledger, single), single.to_json(lab.group()));

    io.segments = static_cast<std::size_t>(uniform(rng, 2, static_cast<std::int64_t>(max_segments)));
    io.M = least_length_above(ledger.chain_threshold(opts.K)) + uniform(rng, 0, opts.extra_length);
    const auto chain = random_concat_instance(lab, rng, io, "c" + std::to_string(i));
    const json dump = chain.to_json(lab.group());
    out[1].record(verify_chain_capture(lab, ledger, chain), dump);
    out[2].record(verify_distance_sum(lab, ledger, chain), dump);
  }
  return out;
}

LemmaSummary run_quadratic_suite(const Lab& lab, const ConstantLedger& ledger, const SuiteOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  LemmaSummary s;
  s.lemma = "quadratic-length";
  s.model = lab.id();
  for (std::uint64_t i = 0; i < opts.instances; ++i) {
    const std::int64_t M = least_length_above(ledger.chain_threshold(opts.K)) + uniform(rng, 0, opts.extra_length);
    const auto N = static_cast<std::size_t>(uniform(rng, 1, M + 6));
    const auto inst = quadratic_instance(lab, rng, N, M, opts.K, "q" + std::to_string(i));
    s.record(verify_quadratic_length(lab, ledger, inst), inst.to_json(lab.group()));
  }
  return s;
}

// ---- point-level lemmas

void LemmaTally::record(bool applicable, bool holds, const std::function<json()>& dump) {
  ++tested;
  if (!applicable) {
    ++vacuous;
    return;
  }
  if (holds) {
    ++passed;
    return;
  }
  ++failed;
  if (failures.size() < 5) failures.push_back(dump());
}

json LemmaTally::to_json() const {
  return {{"lemma", lemma},   {"tested", tested}, {"vacuous", vacuous},
          {"passed", passed}, {"failed", failed}, {"failures", failures}};
}

bool AppendixReport::ok() const {
  return std::all_of(lemmas.begin(), lemmas.end(), [](const auto& t) { return t.failed == 0; });
}

json AppendixReport::to_json() const {
  json ls = json::array();
  for (const auto& t : lemmas) ls.push_back(t.to_json());
  return {{"space", space}, {"delta", genlab::to_string(delta)}, {"mode", mode}, {"ok", ok()}, {"lemmas", ls}};
}

bool check_gromov_projection(const MetricSpace& space, const Rational& delta, const Point& x, const Geodesic& yz) {
  const Rational t = gromov_product(space, x, yz.end(), yz.start());
  for (std::size_t i : project(space, x, yz).indices) {
    Rational gap = Rational(static_cast<std::int64_t>(i)) - t;
    if (gap < 0) gap = -gap;
    if (!within_bound(gap, 8 * delta)) return false;
  }
  return true;
}

bool check_synchronized_projection(const MetricSpace& space, const Rational& delta, const Point& x,
                                   const Geodesic& gamma, const Geodesic& eta) {
  if (gamma.size() != eta.size()) throw std::invalid_argument("synchronized geodesics need equal lengths");
  std::int64_t eps = 0;
  for (std::size_t t = 0; t < gamma.size(); ++t) eps = std::max(eps, space.distance(gamma[t], eta[t]));
  std::vector<Point> pts;
  for (std::size_t i : project(space, x, gamma).indices) pts.push_back(gamma[i]);
  for (std::size_t i : project(space, x, eta).indices) pts.push_back(eta[i]);
  std::int64_t diam = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) diam = std::max(diam, space.distance(pts[i], pts[j]));
  return within_bound(diam, 2 * eps + 16 * delta);
}

bool check_projection_lipschitz(const MetricSpace& space, const Rational& delta, const Point& x, const Point& y,
                                const Geodesic& gamma) {
  const auto px = project(space, x, gamma), py = project(space, y, gamma);
  const auto lo = std::min(px.first(), py.first()), hi = std::max(px.last(), py.last());
  return Rational(static_cast<std::int64_t>(hi - lo)) <= space.distance(x, y) + 20 * delta;
}

std::optional<bool> check_projection_fellow_travel(const MetricSpace& space, const Rational& delta, const Point& x,
                                                   const Point& y, const Geodesic& gamma, const Geodesic& xy) {
  const Rational eps = 20 * delta;
  bool applicable = false;
  for (std::size_t p : project(space, x, gamma).indices)
    for (std::size_t q : project(space, y, gamma).indices) {
      const auto gap = static_cast<std::int64_t>(p > q ? p - q : q - p);
      if (!(Rational(gap) > eps)) continue;
      applicable = true;
      const Geodesic target = p <= q ? gamma.sub(p, q) : gamma.sub(q, p).reversed();
      bool found = false;
      for (std::size_t i = 0; i < xy.size() && !found; ++i) {
        if (!within_bound(space.distance(xy[i], target.start()), eps)) continue;
        for (std::size_t j = i; j < xy.size() && !found; ++j)
          if (within_bound(space.distance(xy[j], target.end()), eps) &&
              fellow_travel(space, xy.sub(i, j), target).within(eps))
            found = true;
      }
      if (!found) return false;
    }
  if (!applicable) return std::nullopt;
  return true;
}

std::optional<bool> check_behrstock(const MetricSpace& space, const Rational& delta, const Point& x,
                                    const Geodesic& g1, const Geodesic& g2, const Rational& K) {
  if (!check_alignment(space, {g1, g2}, K).aligned) return std::nullopt;
  return behrstock_dichotomy(space, x, g1, g2, K, delta).branch != BehrstockBranch::kNeither;
}

namespace {

const char* kAppendixLemmas[] = {"gromov-projection", "synchronized-projection", "projection-lipschitz",
                                 "projection-fellow-travel", "behrstock"};

AppendixReport empty_report(const MetricSpace& space, const Rational& delta, const char* mode) {
  AppendixReport r;
  r.space = space.name();
  r.delta = delta;
  r.mode = mode;
  for (const char* l : kAppendixLemmas) {
    LemmaTally t;
    t.lemma = l;
    r.lemmas.push_back(std::move(t));
  }
  return r;
}

json dump_points(const MetricSpace& space, std::initializer_list<std::pair<const char*, const Point*>> pts,
                 std::initializer_list<std::pair<const char*, const Geodesic*>> geos) {
  json j;
  for (const auto& [k, p] : pts) j[k] = space.format(*p);
  for (const auto& [k, g] : geos) {
    json a = json::array();
    for (const auto& p : g->points()) a.push_back(space.format(p));
    j[k] = a;
  }
  return j;
}

}  // namespace

AppendixReport appendix_random(const Lab& lab, std::uint64_t trials, std::uint64_t seed, std::int64_t point_length) {
  const auto& space = lab.space();
  const Rational delta = space.delta();
  auto report = empty_report(space, delta, "random");
  std::mt19937_64 rng(seed);
  auto walk = [&](Point p, std::int64_t steps) {
    for (std::int64_t i = 0; i < steps; ++i) {
      const auto nb = space.neighbors(p);
      p = nb[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(nb.size()) - 1))];
    }
    return p;
  };
  auto point = [&] { return walk(lab.action().orbit(lab.random_element(rng, uniform(rng, 0, point_length))), uniform(rng, 0, 1)); };

  for (std::uint64_t t = 0; t < trials; ++t) {
    const Point x = point(), y = point(), z = point(), w = point();
    const Geodesic yz = space.geodesic(y, z);
    report.lemmas[0].record(true, check_gromov_projection(space, delta, x, yz),
                            [&] { return dump_points(space, {{"x", &x}}, {{"gamma", &yz}}); });

    const Geodesic other = space.geodesic(walk(y, uniform(rng, 0, 2)), walk(z, uniform(rng, 0, 2)));
    const std::size_t len = std::min(yz.size(), other.size()) - 1;
    const Geodesic gamma = yz.sub(0, len), eta = other.sub(0, len);
    report.lemmas[1].record(true, check_synchronized_projection(space, delta, x, gamma, eta), [&] {
      return dump_points(space, {{"x", &x}}, {{"gamma", &gamma}, {"eta", &eta}});
    });

    report.lemmas[2].record(true, check_projection_lipschitz(space, delta, x, w, yz),
                            [&] { return dump_points(space, {{"x", &x}, {"y", &w}}, {{"gamma", &yz}}); });
    const Geodesic xw = space.geodesic(x, w);
    const auto ft = check_projection_fellow_travel(space, delta, x, w, yz, xw);
    report.lemmas[3].record(ft.has_value(), ft.value_or(true), [&] {
      return dump_points(space, {{"x", &x}, {"y", &w}}, {{"gamma", &yz}, {"path", &xw}});
    });

    const Geodesic g2 = space.geodesic(walk(z, uniform(rng, 0, 1)), point());
    const Rational K = uniform(rng, 1, 3);
    const auto be = check_behrstock(space, delta, x, yz, g2, K);
    report.lemmas[4].record(be.has_value(), be.value_or(true), [&] {
      auto j = dump_points(space, {{"x", &x}}, {{"gamma1", &yz}, {"gamma2", &g2}});
      j["K"] = genlab::to_string(K);
      return j;
    });
  }
  return report;
}

AppendixReport appendix_exhaustive(const FiniteGraph& graph, std::size_t geodesic_cap) {
  const Rational delta = graph.delta();
  auto report = empty_report(graph, delta, "exhaustive");
  const int n = graph.vertex_count();
  std::vector<Point> vertices;
  for (int v = 0; v < n; ++v) vertices.push_back({v});
  std::vector<Geodesic> geodesics;
  for (const auto& p : vertices)
    for (const auto& q : vertices)
      for (auto& g : graph.all_geodesics(p, q, geodesic_cap)) geodesics.push_back(std::move(g));

  for (const auto& g : geodesics)
    for (const auto& x : vertices) {
      report.lemmas[0].record(true, check_gromov_projection(graph, delta, x, g),
                              [&] { return dump_points(graph, {{"x", &x}}, {{"gamma", &g}}); });
      for (const auto& e : geodesics) {
        if (e.size() == g.size())
          report.lemmas[1].record(true, check_synchronized_projection(graph, delta, x, g, e),
                                  [&] { return dump_points(graph, {{"x", &x}}, {{"gamma", &g}, {"eta", &e}}); });
        for (int K = 1; K <= 3; ++K) {
          const auto be = check_behrstock(graph, delta, x, g, e, K);
          report.lemmas[4].record(be.has_value(), be.value_or(true), [&] {
            auto j = dump_points(graph, {{"x", &x}}, {{"gamma1", &g}, {"gamma2", &e}});
            j["K"] = K;
            return j;
          });
        }
      }
      for (const auto& y : vertices) {
        report.lemmas[2].record(true, check_projection_lipschitz(graph, delta, x, y, g),
                                [&] { return dump_points(graph, {{"x", &x}, {"y", &y}}, {{"gamma", &g}}); });
        for (const auto& xy : graph.all_geodesics(x, y, geodesic_cap)) {
          const auto ft = check_projection_fellow_travel(graph, delta, x, y, g, xy);
          report.lemmas[3].record(ft.has_value(), ft.value_or(true), [&] {
            return dump_points(graph, {{"x", &x}, {"y", &y}}, {{"gamma", &g}, {"path", &xy}});
          });
        }
      }
    }
  return report;
}

}  // namespace genlab
