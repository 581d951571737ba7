#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace genlab {

// Generator i (0-based) is the letter i+1, its inverse is -(i+1).
using Letter = std::int32_t;
using Word = std::vector<Letter>;

inline Letter inverse(Letter l) { return -l; }
inline std::size_t generator_index(Letter l) { return static_cast<std::size_t>((l < 0 ? -l : l) - 1); }

// Position in the doubled alphabet a, A, b, B, ...; this is the lexicographic order on signed indices.
inline int letter_rank(Letter l) { return 2 * static_cast<int>(generator_index(l)) + (l < 0 ? 1 : 0); }
inline Letter letter_from_rank(int rank) { return rank % 2 == 0 ? rank / 2 + 1 : -(rank / 2 + 1); }

Word inverse(const Word& w);
Word concat(const Word& a, const Word& b);
Word free_reduce(const Word& w);
Word cyclic_reduce(const Word& w);  // of a freely reduced word
bool lex_less(const Word& a, const Word& b);

class GeneratorAlphabet {
 public:
  // Labels are single lowercase characters; the uppercase character denotes the inverse.
  explicit GeneratorAlphabet(std::vector<char> labels);
  static GeneratorAlphabet standard(std::size_t rank);

  std::size_t rank() const { return labels_.size(); }
  const std::vector<char>& labels() const { return labels_; }
  bool valid(Letter l) const;

  // "1" and "" parse to the empty word. Throws std::invalid_argument naming the word.
  Word parse(std::string_view text) const;
  std::string format(const Word& w) const;

 private:
  std::vector<char> labels_;
};

}  // namespace genlab
