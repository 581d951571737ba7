#include "genlab/word_metric.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

namespace genlab {

// ---- generating sets

GeneratingSet::GeneratingSet(const GroupModel& model, std::vector<Word> words) : model_(&model), words_(std::move(words)) {
  if (words_.empty()) throw std::invalid_argument("generating set is empty");
  for (const auto& w : words_) {
    NormalForm k = model.normalize(w);
    if (k.empty()) throw std::invalid_argument("generator word '" + model.alphabet().format(w) + "' is trivial");
    inverse_words_.push_back(genlab::inverse(w));
    inverse_keys_.push_back(model.normalize(inverse_words_.back()));
    keys_.push_back(std::move(k));
  }
  standard_ = words_.size() == model.alphabet().rank();
  for (std::size_t i = 0; standard_ && i < words_.size(); ++i)
    standard_ = words_[i] == Word{static_cast<Letter>(i + 1)};
}

GeneratingSet GeneratingSet::standard(const GroupModel& model) {
  std::vector<Word> words;
  for (std::size_t i = 0; i < model.alphabet().rank(); ++i) words.push_back({static_cast<Letter>(i + 1)});
  return GeneratingSet(model, words);
}

GeneratingSet GeneratingSet::parse(const GroupModel& model, const std::vector<std::string>& words) {
  std::vector<Word> parsed;
  for (const auto& w : words) parsed.push_back(model.alphabet().parse(w));
  return GeneratingSet(model, parsed);
}

Word GeneratingSet::expand(const Word& s_word) const {
  Word out;
  for (Letter s : s_word) {
    const Word& e = expansion(s);
    out.insert(out.end(), e.begin(), e.end());
  }
  return out;
}

std::vector<std::string> GeneratingSet::labels() const {
  std::vector<std::string> out;
  for (const auto& w : words_) out.push_back(model_->alphabet().format(w));
  return out;
}

// ---- census helpers

std::vector<std::uint64_t> BallCensus::ball_counts() const {
  std::vector<std::uint64_t> out;
  std::uint64_t total = 0;
  for (auto c : sphere_counts) out.push_back(total += c);
  return out;
}

std::vector<double> BallCensus::growth_sequence() const {
  std::vector<double> out;
  const auto balls = ball_counts();
  for (std::int64_t n = 1; n <= complete_radius && n < static_cast<std::int64_t>(balls.size()); ++n)
    out.push_back(std::log(static_cast<double>(balls[static_cast<std::size_t>(n)])) / static_cast<double>(n));
  return out;
}

std::span<const NormalForm> Ball::sphere(std::int64_t r) const {
  return std::span<const NormalForm>(elements_).subspan(sphere_begin(r), sphere_end(r) - sphere_begin(r));
}

std::optional<std::size_t> Ball::find(const NormalForm& nf) const {
  auto it = index_.find(nf);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int64_t Ball::norm_at(std::size_t idx) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), idx);
  return static_cast<std::int64_t>(it - offsets_.begin()) - 1;
}

std::optional<std::int64_t> Ball::norm(const NormalForm& nf) const {
  auto idx = find(nf);
  if (!idx) return std::nullopt;
  return norm_at(*idx);
}

Word Ball::geodesic_word(std::size_t idx) const {
  Word w;
  while (idx != 0) {
    w.push_back(via_[idx]);
    idx = parent_[idx];
  }
  std::reverse(w.begin(), w.end());
  return w;
}

// ---- breadth-first expansion

namespace {

struct Expansion {
  std::vector<NormalForm> nfs;
  std::vector<std::uint32_t> parent;
  std::vector<Letter> via;
};

// Candidates are generated per contiguous frontier chunk and merged in chunk order, so the discovery order (and
// hence every output) matches the single-worker run.
template <class Seen>
Expansion expand(const WordMetric& m, std::span<const NormalForm> frontier, std::size_t parent_base, const Seen& seen,
                 unsigned workers) {
  const int letters = m.gens().letter_count();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(frontier.size() / 256 + 1)));
  std::vector<Expansion> parts(workers);
  auto work = [&](unsigned w) {
    const std::size_t lo = frontier.size() * w / workers, hi = frontier.size() * (w + 1) / workers;
    auto& part = parts[w];
    for (std::size_t i = lo; i < hi; ++i)
      for (int rank = 0; rank < letters; ++rank) {
        const Letter s = letter_from_rank(rank);
        NormalForm v = m.step(frontier[i], s);
        if (seen(v)) continue;
        part.nfs.push_back(std::move(v));
        part.parent.push_back(static_cast<std::uint32_t>(parent_base + i));
        part.via.push_back(s);
      }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  Expansion out;
  std::unordered_set<NormalForm, NormalFormHash> fresh;
  for (auto& part : parts)
    for (std::size_t i = 0; i < part.nfs.size(); ++i) {
      if (!fresh.insert(part.nfs[i]).second) continue;
      out.nfs.push_back(std::move(part.nfs[i]));
      out.parent.push_back(part.parent[i]);
      out.via.push_back(part.via[i]);
    }
  return out;
}

}  // namespace

NormalForm WordMetric::evaluate(const Word& s_word) const {
  NormalForm nf;
  for (Letter s : s_word) nf = step(nf, s);
  return nf;
}

Ball WordMetric::ball(std::int64_t R, const EnumerationOptions& opts) const {
  if (R < 0) throw std::invalid_argument("radius must be nonnegative");
  Ball b;
  b.elements_.push_back(NormalForm{});
  b.parent_.push_back(0);
  b.via_.push_back(0);
  b.index_.emplace(NormalForm{}, 0);
  b.offsets_ = {0, 1};
  auto seen = [&](const NormalForm& v) { return b.index_.count(v) > 0; };
  for (std::int64_t r = 0; r < R; ++r) {
    const std::size_t lo = b.sphere_begin(r), hi = b.sphere_end(r);
    Expansion next = expand(*this, std::span<const NormalForm>(b.elements_).subspan(lo, hi - lo), lo, seen, opts.workers);
    if (opts.node_budget && b.elements_.size() + next.nfs.size() > opts.node_budget) {
      b.truncated_ = true;
      break;
    }
    for (std::size_t i = 0; i < next.nfs.size(); ++i) {
      b.index_.emplace(next.nfs[i], static_cast<std::uint32_t>(b.elements_.size()));
      b.elements_.push_back(std::move(next.nfs[i]));
      b.parent_.push_back(next.parent[i]);
      b.via_.push_back(next.via[i]);
    }
    b.offsets_.push_back(b.elements_.size());
  }
  return b;
}

BallCensus WordMetric::enumerate_ball(std::int64_t R, bool keep_elements, const EnumerationOptions& opts) const {
  if (R < 0) throw std::invalid_argument("radius must be nonnegative");
  BallCensus census;
  census.model = model().name();
  census.generating_set = gens_->labels();
  census.radius = R;
  if (keep_elements) {
    const Ball b = ball(R, opts);
    census.truncated = b.truncated();
    census.complete_radius = b.radius();
    for (std::int64_t r = 0; r <= b.radius(); ++r) {
      census.sphere_counts.push_back(b.sphere_end(r) - b.sphere_begin(r));
      auto& out = census.elements.emplace_back();
      for (std::size_t i = b.sphere_begin(r); i < b.sphere_end(r); ++i)
        out.push_back({gens_->expand(b.geodesic_word(i)), b.elements()[i]});
    }
    return census;
  }
  // Only spheres r-1 and r are needed to recognise new elements of sphere r+1.
  std::unordered_set<NormalForm, NormalFormHash> prev, cur{NormalForm{}};
  std::vector<NormalForm> frontier{NormalForm{}};
  std::uint64_t total = 1;
  census.sphere_counts.push_back(1);
  auto seen = [&](const NormalForm& v) { return cur.count(v) > 0 || prev.count(v) > 0; };
  for (std::int64_t r = 0; r < R; ++r) {
    Expansion next = expand(*this, frontier, 0, seen, opts.workers);
    if (opts.node_budget && total + next.nfs.size() > opts.node_budget) {
      census.truncated = true;
      break;
    }
    total += next.nfs.size();
    census.sphere_counts.push_back(next.nfs.size());
    prev = std::move(cur);
    cur = std::unordered_set<NormalForm, NormalFormHash>(next.nfs.begin(), next.nfs.end());
    frontier = std::move(next.nfs);
  }
  census.complete_radius = static_cast<std::int64_t>(census.sphere_counts.size()) - 1;
  return census;
}

// ---- distances

std::optional<std::int64_t> WordMetric::norm(const NormalForm& target, std::int64_t r_max) const {
  if (closed_form()) {
    const auto len = *model().exact_length(target);
    return len <= r_max ? std::optional<std::int64_t>(len) : std::nullopt;
  }
  if (target.empty()) return 0;
  using Map = std::unordered_map<NormalForm, std::int64_t, NormalFormHash>;
  Map da{{NormalForm{}, 0}}, db{{target, 0}};
  std::vector<NormalForm> fa{NormalForm{}}, fb{target};
  std::int64_t ra = 0, rb = 0;
  const int letters = gens_->letter_count();
  while (ra + rb < r_max) {
    const bool side_a = fa.size() <= fb.size();
    auto& front = side_a ? fa : fb;
    auto& mine = side_a ? da : db;
    const auto& other = side_a ? db : da;
    std::int64_t& r = side_a ? ra : rb;
    std::vector<NormalForm> next;
    std::optional<std::int64_t> best;
    for (const auto& u : front)
      for (int rank = 0; rank < letters; ++rank) {
        NormalForm v = step(u, letter_from_rank(rank));
        if (mine.count(v)) continue;
        if (auto it = other.find(v); it != other.end()) {
          const std::int64_t d = r + 1 + it->second;
          if (!best || d < *best) best = d;
        }
        mine.emplace(v, r + 1);
        next.push_back(std::move(v));
      }
    ++r;
    if (best) return best;
    if (next.empty()) return std::nullopt;
    front = std::move(next);
  }
  return std::nullopt;
}

std::optional<std::int64_t> WordMetric::distance(const NormalForm& g, const NormalForm& h, std::int64_t r_max) const {
  return norm(model().multiply(model().inverse(g), h), r_max);
}

std::optional<Word> WordMetric::geodesic_word(const NormalForm& g, std::int64_t r_max) const {
  if (closed_form()) {
    auto w = model().exact_geodesic(g);
    if (w && static_cast<std::int64_t>(w->size()) <= r_max) return w;
    if (w) return std::nullopt;
  }
  const auto n = norm(g, r_max);
  if (!n) return std::nullopt;
  Word word;
  NormalForm cur;
  for (std::int64_t k = 0; k < *n; ++k) {
    const std::int64_t remaining = *n - k - 1;
    bool advanced = false;
    for (int rank = 0; rank < gens_->letter_count() && !advanced; ++rank) {
      const Letter s = letter_from_rank(rank);
      NormalForm v = step(cur, s);
      auto d = distance(v, g, remaining);
      if (d && *d == remaining) {
        word.push_back(s);
        cur = std::move(v);
        advanced = true;
      }
    }
    if (!advanced) throw std::logic_error("geodesic reconstruction failed");
  }
  return word;
}

std::optional<std::vector<NormalForm>> WordMetric::geodesic_path(const NormalForm& g, const NormalForm& h,
                                                                 std::int64_t r_max) const {
  auto w = geodesic_word(model().multiply(model().inverse(g), h), r_max);
  if (!w) return std::nullopt;
  std::vector<NormalForm> path{g};
  for (Letter s : *w) path.push_back(step(path.back(), s));
  return path;
}

// ---- translation length

TranslationBounds WordMetric::translation_length(const NormalForm& g, std::int64_t n_max, std::int64_t r_max) const {
  if (n_max < 1) throw std::invalid_argument("N_max must be at least 1");
  TranslationBounds out;
  if (gens_->is_standard()) {
    if (auto exact = model().exact_translation_length(g)) {
      out.lower = out.upper = *exact;
      out.exact = true;
      return out;
    }
  }
  NormalForm power;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    power = model().multiply(power, g);
    auto d = norm(power, r_max);
    if (!d) {
      out.truncated = true;
      break;
    }
    out.sampled_norms.push_back(*d);
    const Rational q(*d, n);
    if (n == 1 || q < out.upper) out.upper = q;
  }
  if (out.sampled_norms.empty()) {
    out.upper = Rational(r_max);
    out.lower = 0;
    return out;
  }
  Rational max_offset = 0;
  for (std::size_t i = 0; i < out.sampled_norms.size(); ++i) {
    Rational off = Rational(out.sampled_norms[i]) - Rational(static_cast<std::int64_t>(i + 1)) * out.upper;
    if (off < 0) off = -off;
    max_offset = std::max(max_offset, off);
  }
  const auto last = static_cast<std::int64_t>(out.sampled_norms.size());
  out.lower = (Rational(out.sampled_norms.back()) - 2 * max_offset) / last;
  if (out.lower < 0) out.lower = 0;
  if (out.lower > out.upper) out.lower = out.upper;
  return out;
}

// ---- center

CenterCensus WordMetric::center_coset_census(std::int64_t R, const EnumerationOptions& opts) const {
  if (!model().has_center()) throw UnsupportedModel("model '" + model().name() + "' has no center predicate");
  const Ball b = ball(R, opts);
  CenterCensus out;
  out.center_counts.assign(static_cast<std::size_t>(R) + 1, 0);
  std::unordered_map<NormalForm, std::uint64_t, NormalFormHash> cosets;
  const bool braid = model().kind() == ModelKind::kBraid3;
  if (braid) {
    for (const auto& w : gens_->words())
      out.max_generator_exponent = std::max(out.max_generator_exponent, std::abs(Braid3::exponent_sum(w)));
    out.exponent_bound_checked = out.max_generator_exponent > 0;
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& g = b.elements()[i];
    const std::int64_t r = b.norm_at(i);
    ++cosets[model().central_quotient(g)];
    if (!model().in_center(g)) continue;
    out.center_counts[static_cast<std::size_t>(r)] += 1;
    if (out.exponent_bound_checked) {
      const std::int64_t i_pow = Braid3::central_exponent(g);
      if (r * out.max_generator_exponent < 6 * std::abs(i_pow)) out.exponent_bound_holds = false;
    }
  }
  for (std::size_t r = 1; r < out.center_counts.size(); ++r) out.center_counts[r] += out.center_counts[r - 1];
  out.least_slope = 0;
  for (std::int64_t r = 1; r <= R; ++r) {
    const Rational m(static_cast<std::int64_t>(out.center_counts[static_cast<std::size_t>(r)]) - 1, r);
    out.least_slope = std::max(out.least_slope, m);
  }
  out.coset_count = cosets.size();
  for (const auto& [key, count] : cosets) out.max_coset_intersection = std::max(out.max_coset_intersection, count);
  return out;
}

}  // namespace genlab
