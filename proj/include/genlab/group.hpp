#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "genlab/rational.hpp"
#include "genlab/word.hpp"

namespace genlab {

// Canonical key of a group element; the identity is always the empty vector.
using NormalForm = std::vector<std::int32_t>;

struct NormalFormHash {
  std::size_t operator()(const NormalForm& nf) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ nf.size();
    for (std::int32_t v : nf) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ull;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

struct GroupElement {
  Word word;
  NormalForm key;
  friend bool operator==(const GroupElement& a, const GroupElement& b) { return a.key == b.key; }
};

class OracleError : public std::runtime_error {
 public:
  OracleError(const std::string& what, Word word) : std::runtime_error(what), word_(std::move(word)) {}
  const Word& word() const { return word_; }

 private:
  Word word_;
};

class UnsupportedModel : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { kFree, kZ2Z3, kBraid3, kFinite };

class GroupModel {
 public:
  GroupModel(std::string name, GeneratorAlphabet alphabet) : name_(std::move(name)), alphabet_(std::move(alphabet)) {}
  virtual ~GroupModel() = default;
  GroupModel(const GroupModel&) = delete;
  GroupModel& operator=(const GroupModel&) = delete;

  const std::string& name() const { return name_; }
  const GeneratorAlphabet& alphabet() const { return alphabet_; }
  virtual ModelKind kind() const = 0;

  // Right multiplication of nf by a single alphabet letter.
  virtual void multiply_letter(NormalForm& nf, Letter l) const = 0;
  // A word over the alphabet representing nf.
  virtual Word representative(const NormalForm& nf) const = 0;
  // Geodesic length and lexicographically least geodesic for the standard alphabet, when known in closed form.
  virtual std::optional<std::int64_t> exact_length(const NormalForm&) const { return std::nullopt; }
  virtual std::optional<Word> exact_geodesic(const NormalForm&) const { return std::nullopt; }
  // Exact translation length for the standard alphabet, when known in closed form.
  virtual std::optional<Rational> exact_translation_length(const NormalForm&) const { return std::nullopt; }

  virtual bool has_center() const { return false; }
  virtual bool in_center(const NormalForm&) const;
  // Key of the image in G / C(G); identity map when there is no center predicate.
  virtual NormalForm central_quotient(const NormalForm& nf) const { return nf; }

  NormalForm normalize(const Word& w) const;
  GroupElement element(const Word& w) const { return {w, normalize(w)}; }
  GroupElement element_from_key(const NormalForm& nf) const { return {representative(nf), nf}; }
  NormalForm multiply(const NormalForm& a, const NormalForm& b) const;
  NormalForm multiply_word(const NormalForm& a, const Word& w) const;
  NormalForm inverse(const NormalForm& a) const;
  NormalForm power(const NormalForm& a, std::int64_t n) const;
  NormalForm conjugate(const NormalForm& g, const NormalForm& h) const;  // h g h^-1
  std::string format(const NormalForm& nf) const { return alphabet_.format(representative(nf)); }

 private:
  std::string name_;
  GeneratorAlphabet alphabet_;
};

class FreeGroup final : public GroupModel {
 public:
  explicit FreeGroup(std::size_t rank);
  ModelKind kind() const override { return ModelKind::kFree; }
  void multiply_letter(NormalForm& nf, Letter l) const override;
  Word representative(const NormalForm& nf) const override { return Word(nf.begin(), nf.end()); }
  std::optional<std::int64_t> exact_length(const NormalForm& nf) const override {
    return static_cast<std::int64_t>(nf.size());
  }
  std::optional<Word> exact_geodesic(const NormalForm& nf) const override { return representative(nf); }
  std::optional<Rational> exact_translation_length(const NormalForm& nf) const override;
  std::size_t rank() const { return alphabet().rank(); }
  // 1 + 2k((2k-1)^n - 1)/(2k-2)
  static BigInt ball_size(std::size_t rank, std::int64_t n);
};

// <x, y | x^2, y^3>. Key: alternating syllables, 1 = x, 2 = y, 3 = y^2.
class FreeProductZ2Z3 final : public GroupModel {
 public:
  enum Syllable : std::int32_t { kX = 1, kY = 2, kYY = 3 };
  FreeProductZ2Z3();
  ModelKind kind() const override { return ModelKind::kZ2Z3; }
  void multiply_letter(NormalForm& nf, Letter l) const override;
  Word representative(const NormalForm& nf) const override;
  std::optional<std::int64_t> exact_length(const NormalForm& nf) const override {
    return static_cast<std::int64_t>(nf.size());
  }
  std::optional<Word> exact_geodesic(const NormalForm& nf) const override { return representative(nf); }
  std::optional<Rational> exact_translation_length(const NormalForm& nf) const override;
  static bool is_x(std::int32_t s) { return s == kX; }
  // Syllable normal form after cyclic reduction (conjugation).
  static NormalForm cyclic_reduce(const NormalForm& nf);
  static void push_x(NormalForm& syl);
  static void push_y(NormalForm& syl, int power);
};

struct Mat2 {
  BigInt a, b, c, d;
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  BigInt trace() const { return a + d; }
  bool is_pm_identity() const { return b == 0 && c == 0 && ((a == 1 && d == 1) || (a == -1 && d == -1)); }
};

// B_3 = <a, b | aba = bab>, a = sigma_1, b = sigma_2. With x = aba, y = ab and z = x^2 = y^3 = Delta^2 central,
// every element is z^k w for a unique alternating syllable word w in x, y, y^2. Key: {} or {k, syllables...}.
class Braid3 final : public GroupModel {
 public:
  Braid3();
  ModelKind kind() const override { return ModelKind::kBraid3; }
  void multiply_letter(NormalForm& nf, Letter l) const override;
  Word representative(const NormalForm& nf) const override;
  bool has_center() const override { return true; }
  bool in_center(const NormalForm& nf) const override { return nf.size() <= 1; }
  NormalForm central_quotient(const NormalForm& nf) const override;

  static std::int64_t central_exponent(const NormalForm& nf) { return nf.empty() ? 0 : nf[0]; }
  static std::int64_t key_exponent_sum(const NormalForm& nf);
  static std::int64_t exponent_sum(const Word& w);
  // SL(2,Z) image of a word: a -> [[1,1],[0,1]], b -> [[1,0],[-1,1]].
  static Mat2 matrix(const Word& w);
  static NormalForm delta_squared_power(std::int64_t k);
  // Word norm over {a, b} for z^k w (w a positive syllable word, s syllables) with k >= 0 or k + s <= 0.
  // A sign-definite word of length |exponent sum| exists there, and the exponent sum bounds the norm below.
  static std::optional<std::int64_t> certified_norm(const NormalForm& nf);
};

// Finite group from an explicit multiplication table over elements 0..n-1.
class FiniteSample final : public GroupModel {
 public:
  FiniteSample(std::string name, std::vector<char> labels, std::vector<std::vector<int>> table,
               std::vector<int> generators, int identity);
  static std::unique_ptr<FiniteSample> cyclic(int n);
  static std::unique_ptr<FiniteSample> symmetric3();

  ModelKind kind() const override { return ModelKind::kFinite; }
  void multiply_letter(NormalForm& nf, Letter l) const override;
  Word representative(const NormalForm& nf) const override;
  int order() const { return static_cast<int>(table_.size()); }
  int index(const NormalForm& nf) const { return nf.empty() ? identity_ : nf[0]; }

 private:
  NormalForm key(int element) const { return element == identity_ ? NormalForm{} : NormalForm{element}; }
  std::vector<std::vector<int>> table_;
  std::vector<int> generators_;
  std::vector<int> inverses_;
  std::vector<Word> words_;  // BFS representative per element
  int identity_;
};

// "free:<k>", "z2z3", "braid3", "cyclic:<n>", "s3".
std::unique_ptr<GroupModel> make_model(const std::string& id);

}  // namespace genlab
