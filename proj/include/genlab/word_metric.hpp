#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "genlab/group.hpp"

namespace genlab {

// A finite generating set S given as words over the model alphabet. S-words use letters +-(i+1) for S[i].
class GeneratingSet {
 public:
  // Throws std::invalid_argument naming any word that is trivial in the group.
  GeneratingSet(const GroupModel& model, std::vector<Word> words);
  static GeneratingSet standard(const GroupModel& model);
  static GeneratingSet parse(const GroupModel& model, const std::vector<std::string>& words);

  const GroupModel& model() const { return *model_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<Word>& words() const { return words_; }
  const NormalForm& key(Letter s) const { return s > 0 ? keys_[generator_index(s)] : inverse_keys_[generator_index(s)]; }
  const Word& expansion(Letter s) const {
    return s > 0 ? words_[generator_index(s)] : inverse_words_[generator_index(s)];
  }
  Word expand(const Word& s_word) const;
  std::vector<std::string> labels() const;
  // S equals the model alphabet in order, so closed-form lengths apply.
  bool is_standard() const { return standard_; }
  int letter_count() const { return 2 * static_cast<int>(words_.size()); }

 private:
  const GroupModel* model_;
  std::vector<Word> words_, inverse_words_;
  std::vector<NormalForm> keys_, inverse_keys_;
  bool standard_ = false;
};

struct EnumerationOptions {
  unsigned workers = 1;
  std::uint64_t node_budget = 0;  // 0 = unlimited
};

struct BallCensus {
  std::string model;
  std::vector<std::string> generating_set;
  std::int64_t radius = 0;           // requested
  std::int64_t complete_radius = 0;  // largest radius fully enumerated
  bool truncated = false;
  std::vector<std::uint64_t> sphere_counts;
  std::vector<std::vector<GroupElement>> elements;  // filled when keep_elements

  std::vector<std::uint64_t> ball_counts() const;
  // ln(#B(n))/n for n = 1..complete_radius
  std::vector<double> growth_sequence() const;
};

// A fully indexed ball with a BFS tree. Elements are stored sphere by sphere in the lexicographic order of their
// lexicographically least geodesic S-words.
class Ball {
 public:
  std::int64_t radius() const { return static_cast<std::int64_t>(offsets_.size()) - 2; }
  bool truncated() const { return truncated_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<NormalForm>& elements() const { return elements_; }
  std::span<const NormalForm> sphere(std::int64_t r) const;
  std::size_t sphere_begin(std::int64_t r) const { return offsets_[static_cast<std::size_t>(r)]; }
  std::size_t sphere_end(std::int64_t r) const { return offsets_[static_cast<std::size_t>(r) + 1]; }
  std::optional<std::size_t> find(const NormalForm& nf) const;
  std::optional<std::int64_t> norm(const NormalForm& nf) const;
  std::int64_t norm_at(std::size_t idx) const;
  Word geodesic_word(std::size_t idx) const;  // S-word

 private:
  friend class WordMetric;
  std::vector<NormalForm> elements_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> parent_;
  std::vector<Letter> via_;
  std::unordered_map<NormalForm, std::uint32_t, NormalFormHash> index_;
  bool truncated_ = false;
};

struct TranslationBounds {
  Rational lower, upper;
  bool exact = false;
  bool truncated = false;
  std::vector<std::int64_t> sampled_norms;  // d_S(id, g^n) for n = 1..
};

struct CenterCensus {
  std::vector<std::uint64_t> center_counts;  // #(C(G) cap B(r)), r = 0..R
  Rational least_slope;                      // least M with count(r) <= M r + 1 for 1 <= r <= R
  std::uint64_t max_coset_intersection = 0;  // max over g of #(g C(G) cap B(R))
  std::uint64_t coset_count = 0;
  bool exponent_bound_checked = false;  // Braid3 only
  bool exponent_bound_holds = true;     // ||Delta^{2i}|| >= 6|i| / max_s |rho(s)|
  std::int64_t max_generator_exponent = 0;
};

class WordMetric {
 public:
  explicit WordMetric(const GeneratingSet& gens) : gens_(&gens) {}
  const GeneratingSet& gens() const { return *gens_; }
  const GroupModel& model() const { return gens_->model(); }

  NormalForm step(const NormalForm& g, Letter s) const { return model().multiply_word(g, gens_->expansion(s)); }
  NormalForm evaluate(const Word& s_word) const;

  BallCensus enumerate_ball(std::int64_t R, bool keep_elements, const EnumerationOptions& opts = {}) const;
  Ball ball(std::int64_t R, const EnumerationOptions& opts = {}) const;

  std::optional<std::int64_t> norm(const NormalForm& g, std::int64_t r_max) const;
  std::optional<std::int64_t> distance(const NormalForm& g, const NormalForm& h, std::int64_t r_max) const;
  // Lexicographically least geodesic S-word for g.
  std::optional<Word> geodesic_word(const NormalForm& g, std::int64_t r_max) const;
  // Vertices of the fixed geodesic [g,h]_S: g times the prefixes of the geodesic word of g^-1 h.
  std::optional<std::vector<NormalForm>> geodesic_path(const NormalForm& g, const NormalForm& h,
                                                       std::int64_t r_max) const;

  TranslationBounds translation_length(const NormalForm& g, std::int64_t n_max, std::int64_t r_max) const;
  CenterCensus center_coset_census(std::int64_t R, const EnumerationOptions& opts = {}) const;

  bool closed_form() const { return gens_->is_standard() && model().exact_length(NormalForm{}).has_value(); }

 private:
  const GeneratingSet* gens_;
};

}  // namespace genlab
