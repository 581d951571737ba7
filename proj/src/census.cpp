#include "genlab/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "genlab/contraction.hpp"
#include "genlab/lemma_verify.hpp"

namespace genlab {

namespace {

using nlohmann::json;

std::int64_t must_norm(const Lab& lab, const NormalForm& g) {
  if (lab.metric().closed_form()) return *lab.group().exact_length(g);
  const auto d = certified_distance(lab, NormalForm{}, g);
  if (!d) throw std::runtime_error("word norm exceeds the search cap");
  return *d;
}

Word must_geodesic_word(const Lab& lab, const NormalForm& g) {
  auto w = lab.metric().geodesic_word(g, kGeodesicCap);
  if (!w) throw std::runtime_error("geodesic word exceeds the search cap");
  return *w;
}

NormalForm evaluate_range(const Lab& lab, const Word& s_word, std::size_t from, std::size_t to) {
  return lab.metric().evaluate(Word(s_word.begin() + static_cast<std::ptrdiff_t>(from),
                                    s_word.begin() + static_cast<std::ptrdiff_t>(to)));
}

NormalForm letter_key(const Lab& lab, Letter s) { return s == 0 ? NormalForm{} : lab.gens().key(s); }

std::vector<Letter> linkage_candidates(const GeneratingSet& gens) {
  std::vector<Letter> out{0};
  for (std::size_t i = 1; i <= gens.size(); ++i) {
    out.push_back(static_cast<Letter>(i));
    out.push_back(-static_cast<Letter>(i));
  }
  return out;
}

NormalForm product(const GroupModel& G, std::initializer_list<const NormalForm*> parts) {
  NormalForm out;
  for (const auto* p : parts) out = G.multiply(out, *p);
  return out;
}

Geodesic orbit_geodesic(const Lab& lab, const NormalForm& from, const NormalForm& to) {
  return lab.space().geodesic(lab.action().orbit(from), lab.action().orbit(to));
}

Geodesic orbit_point(const Lab& lab, const NormalForm& g) { return Geodesic::degenerate(lab.action().orbit(g)); }

std::uint64_t ipow(std::uint64_t base, std::int64_t e) {
  std::uint64_t r = 1;
  for (std::int64_t i = 0; i < e; ++i) r *= base;
  return r;
}

BigInt binomial(std::int64_t n, std::int64_t r) {
  if (r < 0 || r > n) return 0;
  BigInt out = 1;
  for (std::int64_t i = 1; i <= r; ++i) out = out * (n - r + i) / i;
  return out;
}

// Cyclic length of a[0..m) without allocation.
std::int64_t cyclic_length_raw(const Letter* a, std::int64_t m) {
  std::int64_t p = 0;
  while (p < m - 1 - p && a[p] == -a[m - 1 - p]) ++p;
  return m - 2 * p;
}

void fill_fibers(FiberReport& r, const std::unordered_map<Word, std::uint64_t, NormalFormHash>& images) {
  r.image_size = images.size();
  for (const auto& [key, count] : images) {
    r.max_fiber = std::max(r.max_fiber, count);
    ++r.histogram[count];
  }
}

template <typename F>
void for_each_reduced(std::size_t k, std::int64_t n, F&& visit) {
  Word w;
  w.reserve(static_cast<std::size_t>(n));
  auto rec = [&](auto&& self) -> void {
    visit(w);
    if (static_cast<std::int64_t>(w.size()) == n) return;
    for (int r = 0; r < static_cast<int>(2 * k); ++r) {
      const Letter l = letter_from_rank(r);
      if (!w.empty() && w.back() == -l) continue;
      w.push_back(l);
      self(self);
      w.pop_back();
    }
  };
  rec(rec);
}

// Visits every g with inner < |g|_S <= n in the lexicographic order of least geodesic words. Closed-form metrics
// walk the geodesic tree without storing the ball.
template <typename F>
void for_each_in_annulus(const Lab& lab, std::int64_t inner, std::int64_t n, F&& visit) {
  const auto& metric = lab.metric();
  if (!metric.closed_form()) {
    const Ball ball = metric.ball(n);
    if (ball.truncated()) throw std::runtime_error("ball enumeration truncated");
    for (std::size_t idx = ball.sphere_begin(std::min(inner + 1, n + 1)); idx < ball.size(); ++idx)
      visit(ball.elements()[idx], ball.norm_at(idx));
    return;
  }
  const auto& G = lab.group();
  const int letters = lab.gens().letter_count();
  Word word;
  auto rec = [&](auto&& self, const NormalForm& g) -> void {
    const auto depth = static_cast<std::int64_t>(word.size());
    if (depth > inner) visit(g, depth);
    if (depth == n) return;
    for (int r = 0; r < letters; ++r) {
      const Letter s = letter_from_rank(r);
      NormalForm child = metric.step(g, s);
      if (*G.exact_length(child) != depth + 1) continue;
      word.push_back(s);
      if (*G.exact_geodesic(child) == word) self(self, child);
      word.pop_back();
    }
  };
  rec(rec, NormalForm{});
}

}  // namespace

// ---- classification

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kContractingLoxodromic: return "contracting-loxodromic";
    case Verdict::kNonLoxodromic: return "non-loxodromic";
    case Verdict::kPseudoAnosov: return "pseudoAnosov";
    case Verdict::kReducible: return "reducible";
    case Verdict::kPeriodic: return "periodic";
  }
  return "?";
}

json Classification::to_json(const GroupModel& group) const {
  json j{{"element", group.format(element)}, {"verdict", to_string(verdict)}};
  if (translation_length) j["translation_length"] = genlab::to_string(*translation_length);
  if (trace) j["trace"] = trace->str();
  if (projective_order) j["projective_order"] = *projective_order;
  return j;
}

Classification classify(const GroupModel& group, const GroupAction& action, const NormalForm& g) {
  Classification c;
  c.element = g;
  switch (group.kind()) {
    case ModelKind::kBraid3: {
      const Mat2 m = Braid3::matrix(group.representative(g));
      const BigInt tr = m.trace();
      const BigInt a = tr < 0 ? BigInt(-tr) : tr;
      c.trace = tr;
      if (a > 2) {
        c.verdict = Verdict::kPseudoAnosov;
      } else if (a == 2 && !m.is_pm_identity()) {
        c.verdict = Verdict::kReducible;
      } else {
        c.verdict = Verdict::kPeriodic;
        c.projective_order = a == 2 ? 1 : a == 1 ? 3 : 2;
      }
      return c;
    }
    case ModelKind::kFree:
    case ModelKind::kZ2Z3: {
      const Rational t = action.tree_translation_length(g);
      c.translation_length = t;
      c.verdict = t > 0 ? Verdict::kContractingLoxodromic : Verdict::kNonLoxodromic;
      return c;
    }
    default:
      throw UnsupportedModel("classification is not available for " + group.name());
  }
}

// ---- free group counting

std::int64_t cyclic_length(const Word& reduced) {
  return cyclic_length_raw(reduced.data(), static_cast<std::int64_t>(reduced.size()));
}

Letter replacement_letter(std::size_t k, Letter prev, Letter cur, Letter next) {
  for (int r = 0; r < static_cast<int>(2 * k); ++r) {
    const Letter x = letter_from_rank(r);
    if (generator_index(x) == generator_index(cur)) continue;
    if (prev != 0 && x == -prev) continue;
    if (next != 0 && next == -x) continue;
    return x;
  }
  throw std::invalid_argument("no replacement letter keeps the word reduced; rank must be at least 3");
}

Word replace_letter(std::size_t k, const Word& reduced, std::size_t i) {
  if (i < 1 || i > reduced.size()) throw std::invalid_argument("replacement position out of range");
  Word out = reduced;
  const Letter prev = i >= 2 ? out[i - 2] : 0;
  const Letter next = i < out.size() ? out[i] : 0;
  out[i - 1] = replacement_letter(k, prev, out[i - 1], next);
  return out;
}

Word replace_two_letters(std::size_t k, const Word& reduced, std::size_t i, std::size_t j) {
  if (!(i < j)) throw std::invalid_argument("positions must satisfy i < j");
  return replace_letter(k, replace_letter(k, reduced, i), j);
}

BigInt FreeCycleCensus::ball_size(std::int64_t n) const {
  BigInt out = 0;
  for (std::int64_t m = 0; m <= std::min(n, n_max); ++m)
    for (auto c : by_length[static_cast<std::size_t>(m)]) out += c;
  return out;
}

BigInt FreeCycleCensus::count_at_most(std::int64_t n, std::int64_t T) const {
  BigInt out = 0;
  for (std::int64_t m = 0; m <= std::min(n, n_max); ++m) {
    const auto& row = by_length[static_cast<std::size_t>(m)];
    for (std::int64_t t = 0; t <= std::min<std::int64_t>(T, static_cast<std::int64_t>(row.size()) - 1); ++t)
      out += row[static_cast<std::size_t>(t)];
  }
  return out;
}

std::uint64_t FreeCycleCensus::max_fiber_up_to(std::int64_t n) const {
  std::uint64_t out = 0;
  for (std::int64_t m = 0; m <= std::min(n, n_max); ++m) out = std::max(out, max_fiber[static_cast<std::size_t>(m)]);
  return out;
}

FreeCycleCensus free_cycle_census(std::size_t k, std::int64_t n_max, std::int64_t max_length) {
  if (k < 1) throw std::invalid_argument("rank must be positive");
  if (n_max < 0) throw std::invalid_argument("n must be non-negative");
  if (n_max > max_length)
    throw std::invalid_argument("n = " + std::to_string(n_max) + " exceeds the enumeration budget " +
                                std::to_string(max_length));
  FreeCycleCensus c;
  c.k = k;
  c.n_max = n_max;
  const auto rows = static_cast<std::size_t>(n_max + 1);
  c.by_length.assign(rows, {});
  for (std::size_t m = 0; m < rows; ++m) c.by_length[m].assign(m + 1, 0);
  c.replacement_pairs.assign(rows, 0);
  c.max_fiber.assign(rows, 0);

  Word u;
  for_each_reduced(k, n_max, [&](const Word& w) {
    const auto m = static_cast<std::int64_t>(w.size());
    const std::int64_t tau = cyclic_length_raw(w.data(), m);
    ++c.by_length[static_cast<std::size_t>(m)][static_cast<std::size_t>(tau)];
    const std::int64_t p = (m - tau) / 2;
    // (g, i) lies in some domain iff i < p. The fiber of the image over every admissible T is largest at
    // T = m - 2i - 1, where it collects the letters x at position i that map back onto the image.
    for (std::int64_t i = 1; i < p; ++i) {
      u = w;
      const auto pos = static_cast<std::size_t>(i - 1);
      const Letter prev = pos > 0 ? u[pos - 1] : 0;
      const Letter next = pos + 1 < u.size() ? u[pos + 1] : 0;
      u[pos] = replacement_letter(k, prev, u[pos], next);
      ++c.replacement_pairs[static_cast<std::size_t>(m)];
      if (cyclic_length_raw(u.data(), m) != m - 2 * i + 2) ++c.fiber_violations;
      const Letter image_letter = u[pos];
      std::uint64_t fiber = 0;
      for (int r = 0; r < static_cast<int>(2 * k); ++r) {
        const Letter x = letter_from_rank(r);
        if ((prev != 0 && x == -prev) || (next != 0 && next == -x)) continue;
        u[pos] = x;
        if (cyclic_length_raw(u.data(), m) > m - 2 * i - 1) continue;
        if (replacement_letter(k, prev, x, next) == image_letter) ++fiber;
      }
      u[pos] = image_letter;
      auto& mf = c.max_fiber[static_cast<std::size_t>(m)];
      mf = std::max(mf, fiber);
    }
  });
  return c;
}

json ThresholdInequality::to_json() const {
  return {{"k", k},
          {"n", n},
          {"T", T},
          {"count", count.str()},
          {"ball", ball.str()},
          {"single_factor", genlab::to_string(single_factor)},
          {"single_holds", single_holds},
          {"single_slack", genlab::to_string(single_slack())},
          {"binomial_factor", genlab::to_string(binomial_factor)},
          {"binomial_holds", binomial_holds},
          {"binomial_slack", genlab::to_string(binomial_slack())}};
}

ThresholdInequality threshold_inequality(const FreeCycleCensus& census, std::int64_t n, std::int64_t T) {
  if (T < 0) throw std::invalid_argument("T must be non-negative");
  if (n > census.n_max) throw std::invalid_argument("n exceeds the census length");
  ThresholdInequality q;
  q.k = census.k;
  q.n = n;
  q.T = T;
  q.count = census.count_at_most(n, T);
  q.ball = census.ball_size(n);
  q.single_factor = 1 + Rational(n - T, 12);
  q.binomial_factor = q.single_factor;
  const std::int64_t half = n > T ? (n - T) / 2 : 0;
  for (std::int64_t j = 2; j <= half; ++j)
    q.binomial_factor += Rational(binomial(half, j)) / Rational(BigInt(ipow(6, j)));
  q.single_holds = q.single_factor * Rational(q.count) <= Rational(q.ball);
  q.binomial_holds = q.binomial_factor * Rational(q.count) <= Rational(q.ball);
  return q;
}

ThresholdInequality free_group_threshold_count(std::size_t k, std::int64_t n, std::int64_t T) {
  if (!(n > T && T >= 0)) throw std::invalid_argument("requires n > T >= 0");
  return threshold_inequality(free_cycle_census(k, n), n, T);
}

// ---- fibers

double FiberReport::sqrt_constant() const {
  return n > 0 ? static_cast<double>(max_fiber) / std::sqrt(static_cast<double>(n)) : 0.0;
}

json FiberReport::to_json() const {
  json hist = json::object();
  for (const auto& [size, count] : histogram) hist[std::to_string(size)] = count;
  return {{"map", map},
          {"n", n},
          {"domain_size", domain_size},
          {"image_size", image_size},
          {"max_fiber", max_fiber},
          {"histogram", hist},
          {"sqrt_constant", sqrt_constant()},
          {"excluded_thick", excluded_thick},
          {"truncated_elements", truncated_elements},
          {"image_norm_excess", image_norm_excess},
          {"windows", windows}};
}

double least_sqrt_constant(const std::vector<FiberReport>& reports) {
  double c = 0;
  for (const auto& r : reports) c = std::max(c, r.sqrt_constant());
  return c;
}

namespace {

template <typename Positions>
FiberReport free_letter_fibers(std::string name, std::size_t k, std::int64_t n, std::int64_t T, Positions&& images_of) {
  if (n > 10) throw std::invalid_argument("hashed fiber census is limited to n <= 10");
  FiberReport r;
  r.map = std::move(name);
  r.n = n;
  r.image_norm_excess = std::numeric_limits<std::int64_t>::min();
  r.windows = {{"T", T}};
  std::unordered_map<Word, std::uint64_t, NormalFormHash> images;
  for_each_reduced(k, n, [&](const Word& w) {
    const auto m = static_cast<std::int64_t>(w.size());
    if (cyclic_length(w) > T) return;
    images_of(w, m, [&](Word&& image) {
      ++r.domain_size;
      ++images[std::move(image)];
      r.image_norm_excess = std::max(r.image_norm_excess, m - n);
    });
  });
  if (r.domain_size == 0) r.image_norm_excess = 0;
  fill_fibers(r, images);
  return r;
}

}  // namespace

FiberReport single_letter_fibers(std::size_t k, std::int64_t n, std::int64_t T) {
  return free_letter_fibers("single-letter", k, n, T, [&](const Word& w, std::int64_t m, auto&& emit) {
    for (std::int64_t i = 1; 2 * i < m - T; ++i) emit(replace_letter(k, w, static_cast<std::size_t>(i)));
  });
}

FiberReport double_letter_fibers(std::size_t k, std::int64_t n, std::int64_t T) {
  return free_letter_fibers("double-letter", k, n, T, [&](const Word& w, std::int64_t m, auto&& emit) {
    for (std::int64_t j = 2; 2 * j < m - T; ++j)
      for (std::int64_t i = 1; i < j; ++i)
        emit(replace_two_letters(k, w, static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
  });
}

// ---- A_thick

namespace {

struct ThickBounds {
  std::int64_t lo, hi;
  ThickBounds(const Windows& w, std::int64_t g_norm)
      : lo(ceil_i64(w.thick_lo * g_norm)), hi(floor_i64(w.thick_hi * g_norm)) {}
  bool contains(std::int64_t d) const { return d >= lo && d <= hi; }
};

std::int64_t segment_distance(const Lab& lab, const std::vector<NormalForm>& points) {
  std::int64_t d = std::numeric_limits<std::int64_t>::max();
  for (const auto& p : points) d = std::min(d, must_norm(lab, p));
  return d;
}

ThickCertificate certify_thick(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g, std::int64_t g_norm,
                               const OrbitSegment& gamma) {
  ThickCertificate c;
  c.distance = segment_distance(lab, gamma.points);
  c.alignment = check_alignment(lab.space(), {orbit_point(lab, {}), gamma.projected, orbit_point(lab, g)},
                                ledger.K_map());
  if (!ThickBounds(ledger.windows(), g_norm).contains(c.distance)) {
    c.reason = "d_S(id, gamma) = " + std::to_string(c.distance) + " outside the window for |g| = " +
               std::to_string(g_norm);
  } else if (!c.alignment->aligned) {
    c.reason = "not K_map-aligned (max diameter " + std::to_string(c.alignment->max_diameter()) + ")";
  } else {
    c.certified = true;
  }
  return c;
}

}  // namespace

ThickCertificate a_thick_certify(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g,
                                 const OrbitSegment& gamma) {
  if (gamma.length != ledger.segment_length())
    throw std::invalid_argument("segment length " + std::to_string(gamma.length) + " differs from L_map " +
                                std::to_string(ledger.segment_length()));
  return certify_thick(lab, ledger, g, must_norm(lab, g), gamma);
}

ThickSearch a_thick_search(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g,
                           std::int64_t perturbation) {
  ThickSearch out;
  const auto& G = lab.group();
  const auto& win = ledger.windows();
  const std::int64_t gn = must_norm(lab, g);
  if (win.thick_lo * gn < 1) {
    out.degenerate = true;
    if (!win.allow_degenerate) return out;
  }
  const Word word = must_geodesic_word(lab, g);
  std::vector<NormalForm> offsets{NormalForm{}};
  if (perturbation > 0) {
    const Ball b = lab.metric().ball(perturbation);
    offsets.assign(b.elements().begin(), b.elements().end());
  }
  const std::int64_t L = ledger.segment_length();
  const std::int64_t reach = L * must_norm(lab, lab.phi());
  const ThickBounds bounds(win, gn);
  NormalForm p;
  std::vector<NormalForm> points(static_cast<std::size_t>(L + 1));
  for (std::size_t j = 0; j <= word.size(); ++j) {
    if (j > 0) p = lab.metric().step(p, word[j - 1]);
    const auto jj = static_cast<std::int64_t>(j);
    // d_S(id, gamma) lies within |base| - reach and |base|, and |base| within j +- perturbation.
    if (jj + perturbation < bounds.lo) continue;
    if (jj - perturbation - reach > bounds.hi) break;
    for (const auto& b : offsets) {
      ++out.candidates;
      points[0] = G.multiply(p, b);
      for (std::size_t k = 1; k < points.size(); ++k) points[k] = G.multiply(points[k - 1], lab.phi());
      if (!bounds.contains(segment_distance(lab, points))) continue;
      OrbitSegment gamma = OrbitSegment::make(lab.action(), points[0], lab.phi(), L);
      if (certify_thick(lab, ledger, g, gn, gamma).certified) {
        out.found = true;
        out.position = jj;
        out.witness = std::move(gamma);
        return out;
      }
    }
  }
  return out;
}

// ---- replacement maps

json Replacement::to_json(const GroupModel& group) const {
  json links = json::array();
  for (Letter s : linkages) links.push_back(s);
  json out{{"g", group.format(g)},
         {"image", group.format(image)},
         {"i", i},
         {"linkages", links},
         {"fallback", fallback},
         {"aligned", alignment.aligned},
         {"max_diameter", alignment.max_diameter()},
         {"image_norm", image_norm},
         {"norm_slack", norm_slack}};
  if (j > 0) out["j"] = j;
  if (!prefix.empty()) out["prefix"] = group.format(prefix);
  return out;
}

std::pair<std::int64_t, std::int64_t> replacement_window(const ConstantLedger& ledger, std::int64_t n) {
  const auto& w = ledger.windows();
  return {std::max<std::int64_t>(1, ceil_i64(w.replace_lo * n)), floor_i64(w.replace_hi * n)};
}

namespace {

struct Piece {
  NormalForm before;  // group element preceding the segment
  NormalForm power;   // phi^{length}
  std::int64_t length = 0;
};

// Alignment of x0, each linked segment, and the endpoint.
AlignmentReport linked_alignment(const Lab& lab, const Rational& level, const std::vector<Piece>& pieces,
                                 const NormalForm& end) {
  std::vector<Geodesic> seq{orbit_point(lab, {})};
  for (const auto& piece : pieces)
    seq.push_back(orbit_geodesic(lab, piece.before, lab.group().multiply(piece.before, piece.power)));
  seq.push_back(orbit_point(lab, end));
  return check_alignment(lab.space(), seq, level);
}

// Builds prefix_0 s_0 P_0 t_0 mid_0 s_1 P_1 t_1 mid_1 ... with mid_last the tail.
struct Assembly {
  NormalForm image;
  NormalForm first_block_end;  // through mid_0
  std::vector<Piece> pieces;
};

Assembly assemble(const Lab& lab, const NormalForm& head, const std::vector<NormalForm>& powers,
                  const std::vector<std::int64_t>& lengths, const std::vector<NormalForm>& mids,
                  const std::vector<Letter>& links) {
  const auto& G = lab.group();
  Assembly a;
  NormalForm cur = head;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    cur = G.multiply(cur, letter_key(lab, links[2 * k]));
    a.pieces.push_back({cur, powers[k], lengths[k]});
    cur = product(G, {&cur, &powers[k]});
    cur = G.multiply(cur, letter_key(lab, links[2 * k + 1]));
    cur = G.multiply(cur, mids[k]);
    if (k == 0) a.first_block_end = cur;
  }
  a.image = cur;
  return a;
}

// Ledger values and memoized linkage letters, keyed by (element, horizon, sign).
struct ReplaceContext {
  Rational level;
  std::int64_t L = 0, B = 0, phi_norm = 0;
  std::map<std::int64_t, NormalForm> powers;
  std::map<std::tuple<NormalForm, std::int64_t, int>, Letter> letters;

  ReplaceContext(const Lab& lab, const ConstantLedger& ledger)
      : level(ledger.linkage_level()),
        L(ledger.segment_length()),
        B(ledger.block_length()),
        phi_norm(must_norm(lab, lab.phi())) {}
  const NormalForm& power(const Lab& lab, std::int64_t e) {
    auto it = powers.find(e);
    if (it == powers.end()) it = powers.emplace(e, lab.group().power(lab.phi(), e)).first;
    return it->second;
  }
};

// Same argmin as select_linkage, one direction only.
Letter best_linkage(const Lab& lab, const NormalForm& g, std::int64_t horizon, int sign, ReplaceContext& cache) {
  std::tuple<NormalForm, std::int64_t, int> key{g, horizon, sign};
  auto it = cache.letters.find(key);
  if (it != cache.letters.end()) return it->second;
  Letter best = 0;
  std::optional<Rational> best_val;
  for (Letter c : linkage_candidates(lab.gens())) {
    const Rational v = linkage_product(lab.action(), lab.gens(), lab.phi(), g, c, sign, horizon);
    if (!best_val || v < *best_val) {
      best = c;
      best_val = v;
    }
  }
  cache.letters.emplace(std::move(key), best);
  return best;
}

Replacement linked_replacement(const Lab& lab, ReplaceContext& cache, const NormalForm& g, const NormalForm& head,
                               const std::vector<std::int64_t>& lengths, const std::vector<NormalForm>& mids) {
  const auto& G = lab.group();
  std::vector<NormalForm> powers;
  for (auto len : lengths) powers.push_back(cache.power(lab, len));

  // Greedy: s from the inverse of everything before the segment, t from what follows it.
  std::vector<Letter> links;
  NormalForm cur = head;
  for (std::size_t k = 0; k < powers.size(); ++k) {
    const Letter s = -best_linkage(lab, G.inverse(cur), lengths[k], 1, cache);
    const Letter t = best_linkage(lab, mids[k], lengths[k], -1, cache);
    links.push_back(s);
    links.push_back(t);
    const NormalForm sk = letter_key(lab, s), tk = letter_key(lab, t);
    cur = product(G, {&cur, &sk, &powers[k], &tk, &mids[k]});
  }
  Replacement r;
  r.g = g;
  Assembly a = assemble(lab, head, powers, lengths, mids, links);
  r.alignment = linked_alignment(lab, cache.level, a.pieces, a.image);
  if (!r.alignment.aligned) {
    const auto cands = linkage_candidates(lab.gens());
    std::vector<std::size_t> idx(links.size(), 0);
    std::optional<AlignmentReport> best;
    bool found = false;
    while (!found) {
      std::vector<Letter> trial;
      for (auto x : idx) trial.push_back(cands[x]);
      Assembly b = assemble(lab, head, powers, lengths, mids, trial);
      auto rep = linked_alignment(lab, cache.level, b.pieces, b.image);
      if (rep.aligned) {
        found = true;
        links = trial;
        a = std::move(b);
        r.alignment = std::move(rep);
        r.fallback = true;
        break;
      }
      if (!best || rep.max_diameter() < best->max_diameter()) best = std::move(rep);
      std::size_t d = 0;
      while (d < idx.size() && ++idx[d] == cands.size()) idx[d++] = 0;
      if (d == idx.size()) break;
    }
    if (!found) throw HypothesisError("no linkage letters certify the alignment", best);
  }
  r.linkages = links;
  r.image = a.image;
  if (powers.size() > 1) r.prefix = a.first_block_end;
  r.image_norm = must_norm(lab, r.image);
  return r;
}

}  // namespace

namespace {

Replacement single_replacement(const Lab& lab, ReplaceContext& ctx, const NormalForm& g, std::int64_t i,
                               std::int64_t lo, std::int64_t hi) {
  if (i < lo || i > hi)
    throw std::invalid_argument("index " + std::to_string(i) + " outside the window [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  const Word word = must_geodesic_word(lab, g);
  const auto m = static_cast<std::int64_t>(word.size());
  if (i + ctx.B > m) throw std::invalid_argument("the excised block does not fit in the geodesic word");
  const auto ui = static_cast<std::size_t>(i), ub = static_cast<std::size_t>(ctx.B);
  const NormalForm w = evaluate_range(lab, word, 0, ui);
  const NormalForm v = evaluate_range(lab, word, ui + ub, word.size());
  Replacement r = linked_replacement(lab, ctx, g, w, {ctx.L}, {v});
  r.i = ui;
  r.norm_slack = ctx.L * ctx.phi_norm + 2 - ctx.B;
  if (r.image_norm > m + r.norm_slack) throw std::logic_error("replacement image exceeds the norm bound");
  return r;
}

}  // namespace

Replacement replacement_map(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g, std::int64_t i,
                            std::int64_t n) {
  ReplaceContext ctx(lab, ledger);
  const auto [lo, hi] = replacement_window(ledger, n);
  return single_replacement(lab, ctx, g, i, lo, hi);
}

Replacement double_replacement(const Lab& lab, const ConstantLedger& ledger, const NormalForm& g, std::int64_t i,
                               std::int64_t j, std::int64_t n) {
  const auto [lo, hi] = replacement_window(ledger, n);
  if (i < lo || i > hi)
    throw std::invalid_argument("index " + std::to_string(i) + " outside the window [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  if (!(i < j - ledger.ind2_gap()))
    throw std::invalid_argument("indices violate i < j - " + std::to_string(ledger.ind2_gap()));
  const Word word = must_geodesic_word(lab, g);
  const std::int64_t B = ledger.block_length(), B2 = 2 * B - 2;
  const auto m = static_cast<std::int64_t>(word.size());
  if (j + B2 > m) throw std::invalid_argument("the second excised block does not fit in the geodesic word");
  const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
  const NormalForm w = evaluate_range(lab, word, 0, ui);
  const NormalForm w2 = evaluate_range(lab, word, ui + static_cast<std::size_t>(B), uj);
  const NormalForm v = evaluate_range(lab, word, uj + static_cast<std::size_t>(B2), word.size());
  const std::int64_t L = ledger.segment_length();
  ReplaceContext ctx(lab, ledger);
  Replacement r = linked_replacement(lab, ctx, g, w, {L, 2 * L}, {w2, v});
  r.i = ui;
  r.j = uj;
  r.norm_slack = 3 * L * must_norm(lab, lab.phi()) + 4 - B - B2;
  if (r.image_norm > m + r.norm_slack) throw std::logic_error("replacement image exceeds the norm bound");
  return r;
}

FiberReport fiber_census(const Lab& lab, const ConstantLedger& ledger, std::int64_t n, const FiberOptions& opts) {
  FiberReport r;
  r.map = "F_n";
  r.n = n;
  r.windows = ledger.windows().to_json();
  r.image_norm_excess = std::numeric_limits<std::int64_t>::min();
  const auto [lo, hi] = replacement_window(ledger, n);
  const std::int64_t inner = floor_i64(ledger.windows().annulus * n);
  std::unordered_map<NormalForm, std::uint64_t, NormalFormHash> images;
  ReplaceContext ctx(lab, ledger);
  std::uint64_t seen = 0;
  for_each_in_annulus(lab, inner, n, [&](const NormalForm& g, std::int64_t norm) {
    if (opts.element_budget > 0 && seen >= opts.element_budget) {
      ++r.truncated_elements;
      return;
    }
    ++seen;
    if (opts.exclude_thick && a_thick_search(lab, ledger, g, opts.thick_perturbation).found) {
      ++r.excluded_thick;
      return;
    }
    for (std::int64_t i = lo; i <= hi && i + ledger.block_length() <= norm; ++i) {
      const auto rep = single_replacement(lab, ctx, g, i, lo, hi);
      ++r.domain_size;
      ++images[rep.image];
      r.image_norm_excess = std::max(r.image_norm_excess, rep.image_norm - n);
    }
  });
  if (r.domain_size == 0) r.image_norm_excess = 0;
  r.image_size = images.size();
  for (const auto& [key, count] : images) {
    r.max_fiber = std::max(r.max_fiber, count);
    ++r.histogram[count];
  }
  return r;
}

// ---- genericity

std::optional<double> log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
    if (x[i] > 0 && y[i] > 0) pts.emplace_back(std::log(x[i]), std::log(y[i]));
  const std::size_t take = (pts.size() + 1) / 2;
  if (take < 2) return std::nullopt;
  pts.erase(pts.begin(), pts.end() - static_cast<std::ptrdiff_t>(take));
  double mx = 0, my = 0;
  for (const auto& [a, b] : pts) {
    mx += a;
    my += b;
  }
  mx /= static_cast<double>(take);
  my /= static_cast<double>(take);
  double sxy = 0, sxx = 0;
  for (const auto& [a, b] : pts) {
    sxy += (a - mx) * (b - my);
    sxx += (a - mx) * (a - mx);
  }
  if (sxx == 0) return std::nullopt;
  return sxy / sxx;
}

json GenericityCurve::to_json() const {
  json rs = json::array();
  for (const auto& q : ratios) rs.push_back(genlab::to_string(q));
  json j{{"model", model},
         {"generating_set", generating_set},
         {"measure", measure},
         {"radii", radii},
         {"counts", counts},
         {"totals", totals},
         {"ratios", rs},
         {"undecided", undecided},
         {"tail_monotone", tail_monotone}};
  if (!element_counts.empty()) {
    j["element_counts"] = element_counts;
    j["element_totals"] = element_totals;
    j["max_coset_intersection"] = max_coset_intersection;
  }
  j["decay_exponent"] = decay_exponent ? json(*decay_exponent) : json(nullptr);
  return j;
}

GenericityCurve genericity_experiment(const Lab& lab, const GenericityOptions& opts) {
  if (opts.R_max < 0) throw std::invalid_argument("R_max must be non-negative");
  const auto& G = lab.group();
  const bool braid = G.kind() == ModelKind::kBraid3;
  if (!braid && G.kind() != ModelKind::kFree && G.kind() != ModelKind::kZ2Z3)
    throw UnsupportedModel("classification is not available for " + G.name());
  GenericityCurve c;
  c.model = lab.id();
  c.generating_set = lab.gens().labels();
  c.measure = braid ? "non-pA cosets" : "non-loxodromic";
  const Ball ball = lab.metric().ball(opts.R_max, opts.enumeration);
  const std::int64_t R_top = ball.truncated() ? ball.radius() - 1 : opts.R_max;

  if (braid) {
    // Classification is constant on cosets of the center: Delta^2 maps to -I.
    std::unordered_map<NormalForm, std::int64_t, NormalFormHash> first_radius;
    std::unordered_map<NormalForm, bool, NormalFormHash> non_pa;
    std::vector<std::uint64_t> new_cosets(static_cast<std::size_t>(R_top + 1), 0),
        new_non_pa(new_cosets.size(), 0), elems(new_cosets.size(), 0), elems_non_pa(new_cosets.size(), 0);
    for (std::size_t idx = 0; idx < ball.sphere_end(R_top); ++idx) {
      const NormalForm& g = ball.elements()[idx];
      const auto r = static_cast<std::size_t>(ball.norm_at(idx));
      const bool bad = !classify(G, lab.action(), g).loxodromic();
      ++elems[r];
      if (bad) ++elems_non_pa[r];
      const NormalForm coset = G.central_quotient(g);
      if (first_radius.emplace(coset, static_cast<std::int64_t>(r)).second) {
        ++new_cosets[r];
        if (bad) ++new_non_pa[r];
      }
    }
    std::uint64_t cc = 0, cb = 0, ec = 0, eb = 0;
    for (std::int64_t R = 0; R <= R_top; ++R) {
      const auto r = static_cast<std::size_t>(R);
      cc += new_cosets[r];
      cb += new_non_pa[r];
      ec += elems[r];
      eb += elems_non_pa[r];
      c.radii.push_back(R);
      c.counts.push_back(cb);
      c.totals.push_back(cc);
      c.element_counts.push_back(eb);
      c.element_totals.push_back(ec);
      c.undecided.push_back(0);
    }
    c.max_coset_intersection = lab.metric().center_coset_census(R_top, opts.enumeration).max_coset_intersection;
  } else {
    struct Entry {
      std::int64_t norm;
      bool tree_short;
      Rational lower, upper;
    };
    std::vector<Entry> entries;
    for (std::size_t idx = 0; idx < ball.sphere_end(R_top); ++idx) {
      const NormalForm& g = ball.elements()[idx];
      Entry e{ball.norm_at(idx), classify(G, lab.action(), g).translation_length.value() <= opts.tau_c, 0, 0};
      if (opts.tau_s && !e.tree_short) {
        const auto tb = lab.metric().translation_length(g, opts.translation_power, kGeodesicCap);
        e.lower = tb.lower;
        e.upper = tb.upper;
      }
      entries.push_back(std::move(e));
    }
    for (std::int64_t R = 0; R <= R_top; ++R) {
      std::uint64_t count = 0, total = 0, undecided = 0;
      for (const auto& e : entries) {
        if (e.norm > R) continue;
        ++total;
        if (e.tree_short) {
          ++count;
        } else if (opts.tau_s) {
          const Rational bound = *opts.tau_s * R;
          if (e.upper <= bound)
            ++count;
          else if (e.lower <= bound)
            ++undecided;
        }
      }
      c.radii.push_back(R);
      c.counts.push_back(count);
      c.totals.push_back(total);
      c.undecided.push_back(undecided);
    }
  }
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < c.radii.size(); ++k) {
    c.ratios.push_back(Rational(BigInt(c.counts[k]), BigInt(c.totals[k])));
    xs.push_back(static_cast<double>(c.radii[k]));
    ys.push_back(to_double(c.ratios.back()));
  }
  c.decay_exponent = log_log_slope(xs, ys);
  // Tail: the last ceil(half) of the radii R >= 1.
  const std::size_t usable = c.radii.size() > 1 ? c.radii.size() - 1 : 0;
  for (std::size_t k = c.radii.size() - (usable + 1) / 2; k < c.radii.size(); ++k)
    if (k >= 2 && c.ratios[k] > c.ratios[k - 2]) c.tail_monotone = false;
  return c;
}

// ---- exponential negligibility

json NegligibilityReport::to_json() const {
  json pts = json::array();
  for (const auto& p : points)
    pts.push_back({{"n", p.n},
                   {"h_radius", p.h_radius},
                   {"g_radius", p.g_radius},
                   {"annulus_floor", p.annulus_floor},
                   {"annulus_size", p.annulus_size},
                   {"decomposable", p.decomposable},
                   {"ratio", genlab::to_string(p.ratio)}});
  return {{"model", model},
          {"points", pts},
          {"rate", rate ? json(*rate) : json(nullptr)},
          {"truncated", truncated},
          {"windows", windows}};
}

NegligibilityReport exponential_negligibility_probe(const Lab& lab, const ConstantLedger& ledger, std::int64_t n_lo,
                                                    std::int64_t n_hi, std::uint64_t budget) {
  if (n_lo < 1 || n_hi < n_lo) throw std::invalid_argument("requires 1 <= n_lo <= n_hi");
  const auto& G = lab.group();
  const auto& w = ledger.windows();
  NegligibilityReport rep;
  rep.model = lab.id();
  rep.windows = w.to_json();
  const bool closed = lab.metric().closed_form();
  const auto census = lab.metric().enumerate_ball(n_hi, false);
  if (census.truncated) throw std::runtime_error("ball enumeration truncated");
  std::optional<Ball> lookup;
  if (!closed) lookup = lab.metric().ball(n_hi);
  auto norm_of = [&](const NormalForm& x) -> std::optional<std::int64_t> {
    if (closed) return G.exact_length(x);
    return lookup->norm(x);
  };
  const Ball small = lab.metric().ball(std::max<std::int64_t>(0, floor_i64(w.conj_g * n_hi)));

  std::vector<double> ns, logs;
  for (std::int64_t n = n_lo; n <= n_hi; ++n) {
    NegligibilityPoint p;
    p.n = n;
    p.h_radius = floor_i64(w.conj_h * n);
    p.g_radius = floor_i64(w.conj_g * n);
    p.annulus_floor = floor_i64(w.annulus * n);
    for (std::int64_t r = p.annulus_floor + 1; r <= n; ++r) p.annulus_size += census.sphere_counts[static_cast<std::size_t>(r)];
    if (2 * p.h_radius + p.g_radius > p.annulus_floor) {
      std::unordered_set<NormalForm, NormalFormHash> hits;
      const std::size_t h_end = small.sphere_end(std::min(p.h_radius, small.radius()));
      const std::size_t g_end = small.sphere_end(std::min(p.g_radius, small.radius()));
      if (budget > 0 && std::uint64_t(h_end) * g_end > budget) {
        rep.truncated = true;
      } else {
        for (std::size_t a = 0; a < h_end; ++a) {
          const NormalForm& h = small.elements()[a];
          const NormalForm hi = G.inverse(h);
          for (std::size_t b = 0; b < g_end; ++b) {
            const NormalForm x = product(G, {&hi, &small.elements()[b], &h});
            const auto nx = norm_of(x);
            if (nx && *nx > p.annulus_floor && *nx <= n) hits.insert(x);
          }
        }
      }
      p.decomposable = hits.size();
    }
    p.ratio = p.annulus_size == 0 ? Rational(0) : Rational(BigInt(p.decomposable), BigInt(p.annulus_size));
    if (p.ratio > 0) {
      ns.push_back(static_cast<double>(n));
      logs.push_back(std::log(to_double(p.ratio)));
    }
    rep.points.push_back(std::move(p));
  }
  if (ns.size() >= 2) {
    const double mx = [&] { double s = 0; for (double v : ns) s += v; return s / double(ns.size()); }();
    const double my = [&] { double s = 0; for (double v : logs) s += v; return s / double(logs.size()); }();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < ns.size(); ++k) {
      sxy += (ns[k] - mx) * (logs[k] - my);
      sxx += (ns[k] - mx) * (ns[k] - mx);
    }
    if (sxx > 0) rep.rate = std::exp(-sxy / sxx);
  }
  return rep;
}

}  // namespace genlab
