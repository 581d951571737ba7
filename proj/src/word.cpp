#include "genlab/word.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

namespace genlab {

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& l : out) l = -l;
  return out;
}

Word concat(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

Word free_reduce(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (Letter l : w) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

Word cyclic_reduce(const Word& w) {
  std::size_t lo = 0, hi = w.size();
  while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
    ++lo;
    --hi;
  }
  return Word(w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi));
}

bool lex_less(const Word& a, const Word& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](Letter x, Letter y) { return letter_rank(x) < letter_rank(y); });
}

GeneratorAlphabet::GeneratorAlphabet(std::vector<char> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("alphabet needs at least one generator");
  std::set<char> seen;
  for (char c : labels_) {
    if (!std::islower(static_cast<unsigned char>(c)))
      throw std::invalid_argument(std::string("generator label must be a lowercase letter: '") + c + "'");
    if (!seen.insert(c).second) throw std::invalid_argument(std::string("duplicate generator label '") + c + "'");
  }
}

GeneratorAlphabet GeneratorAlphabet::standard(std::size_t rank) {
  if (rank == 0 || rank > 26) throw std::invalid_argument("rank must be in [1,26]");
  std::vector<char> labels;
  for (std::size_t i = 0; i < rank; ++i) labels.push_back(static_cast<char>('a' + i));
  return GeneratorAlphabet(labels);
}

bool GeneratorAlphabet::valid(Letter l) const { return l != 0 && generator_index(l) < labels_.size(); }

Word GeneratorAlphabet::parse(std::string_view text) const {
  Word out;
  if (text == "1" || text == "e") return out;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    auto it = std::find(labels_.begin(), labels_.end(), lower);
    if (it == labels_.end())
      throw std::invalid_argument("invalid generator word '" + std::string(text) + "': unknown letter '" + c + "'");
    const Letter l = static_cast<Letter>(it - labels_.begin()) + 1;
    out.push_back(std::isupper(static_cast<unsigned char>(c)) ? -l : l);
  }
  return out;
}

std::string GeneratorAlphabet::format(const Word& w) const {
  if (w.empty()) return "1";
  std::string out;
  for (Letter l : w) {
    if (!valid(l)) throw std::invalid_argument("letter out of range: " + std::to_string(l));
    const char c = labels_[generator_index(l)];
    out.push_back(l < 0 ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
  }
  return out;
}

}  // namespace genlab
