#include "genlab/group.hpp"

#include <deque>

namespace genlab {

bool GroupModel::in_center(const NormalForm&) const {
  throw UnsupportedModel("model '" + name() + "' has no center predicate");
}

NormalForm GroupModel::normalize(const Word& w) const {
  NormalForm nf;
  for (Letter l : w) {
    if (!alphabet().valid(l)) throw OracleError("invalid letter " + std::to_string(l) + " for model " + name(), w);
    multiply_letter(nf, l);
  }
  return nf;
}

NormalForm GroupModel::multiply_word(const NormalForm& a, const Word& w) const {
  NormalForm nf = a;
  for (Letter l : w) multiply_letter(nf, l);
  return nf;
}

NormalForm GroupModel::multiply(const NormalForm& a, const NormalForm& b) const {
  return multiply_word(a, representative(b));
}

NormalForm GroupModel::inverse(const NormalForm& a) const { return normalize(genlab::inverse(representative(a))); }

NormalForm GroupModel::power(const NormalForm& a, std::int64_t n) const {
  const Word w = n >= 0 ? representative(a) : genlab::inverse(representative(a));
  NormalForm nf;
  for (std::int64_t i = 0; i < (n >= 0 ? n : -n); ++i) nf = multiply_word(nf, w);
  return nf;
}

NormalForm GroupModel::conjugate(const NormalForm& g, const NormalForm& h) const {
  return multiply(multiply(h, g), inverse(h));
}

// ---- free group

FreeGroup::FreeGroup(std::size_t rank) : GroupModel("free:" + std::to_string(rank), GeneratorAlphabet::standard(rank)) {}

void FreeGroup::multiply_letter(NormalForm& nf, Letter l) const {
  if (!nf.empty() && nf.back() == -l)
    nf.pop_back();
  else
    nf.push_back(l);
}

std::optional<Rational> FreeGroup::exact_translation_length(const NormalForm& nf) const {
  return Rational(static_cast<std::int64_t>(cyclic_reduce(Word(nf.begin(), nf.end())).size()));
}

BigInt FreeGroup::ball_size(std::size_t rank, std::int64_t n) {
  const BigInt k2 = 2 * static_cast<std::int64_t>(rank);
  if (n <= 0) return 1;
  if (rank == 1) return 1 + 2 * BigInt(n);
  BigInt p = boost::multiprecision::pow(k2 - 1, static_cast<unsigned>(n));
  return 1 + k2 * (p - 1) / (k2 - 2);
}

// ---- Z/2 * Z/3

FreeProductZ2Z3::FreeProductZ2Z3() : GroupModel("z2z3", GeneratorAlphabet({'x', 'y'})) {}

void FreeProductZ2Z3::push_x(NormalForm& syl) {
  if (!syl.empty() && syl.back() == kX)
    syl.pop_back();
  else
    syl.push_back(kX);
}

void FreeProductZ2Z3::push_y(NormalForm& syl, int power) {
  if (!syl.empty() && syl.back() != kX) {
    const int p = (syl.back() == kY ? 1 : 2) + power;
    if (p % 3 == 0)
      syl.pop_back();
    else
      syl.back() = (p % 3 == 1) ? kY : kYY;
  } else {
    syl.push_back(power == 1 ? kY : kYY);
  }
}

void FreeProductZ2Z3::multiply_letter(NormalForm& nf, Letter l) const {
  switch (l) {
    case 1:
    case -1: push_x(nf); break;
    case 2: push_y(nf, 1); break;
    case -2: push_y(nf, 2); break;
    default: throw OracleError("invalid letter for z2z3", Word{l});
  }
}

Word FreeProductZ2Z3::representative(const NormalForm& nf) const {
  Word w;
  w.reserve(nf.size());
  for (auto s : nf) w.push_back(s == kX ? 1 : (s == kY ? 2 : -2));
  return w;
}

NormalForm FreeProductZ2Z3::cyclic_reduce(const NormalForm& nf) {
  NormalForm cur = nf;
  while (cur.size() >= 2 && is_x(cur.front()) == is_x(cur.back())) {
    const auto first = cur.front();
    NormalForm next(cur.begin() + 1, cur.end());
    if (is_x(first))
      push_x(next);
    else
      push_y(next, first == kY ? 1 : 2);
    cur = std::move(next);
  }
  return cur;
}

std::optional<Rational> FreeProductZ2Z3::exact_translation_length(const NormalForm& nf) const {
  const auto c = cyclic_reduce(nf);
  return Rational(c.size() >= 2 ? static_cast<std::int64_t>(c.size()) : 0);
}

// ---- B_3

namespace {

void braid_mul_x(NormalForm& nf) {
  if (nf.size() > 1 && nf.back() == FreeProductZ2Z3::kX) {
    nf.pop_back();
    nf[0] += 1;
  } else {
    nf.push_back(FreeProductZ2Z3::kX);
  }
}

void braid_mul_y(NormalForm& nf, int power) {
  if (nf.size() > 1 && nf.back() != FreeProductZ2Z3::kX) {
    int p = (nf.back() == FreeProductZ2Z3::kY ? 1 : 2) + power;
    if (p >= 3) {
      p -= 3;
      nf[0] += 1;
    }
    if (p == 0)
      nf.pop_back();
    else
      nf.back() = p == 1 ? FreeProductZ2Z3::kY : FreeProductZ2Z3::kYY;
  } else {
    nf.push_back(power == 1 ? FreeProductZ2Z3::kY : FreeProductZ2Z3::kYY);
  }
}

}  // namespace

Braid3::Braid3() : GroupModel("braid3", GeneratorAlphabet({'a', 'b'})) {}

void Braid3::multiply_letter(NormalForm& nf, Letter l) const {
  if (nf.empty()) nf.push_back(0);
  nf[0] -= 1;
  switch (l) {
    case 1: braid_mul_y(nf, 2); braid_mul_x(nf); break;   // a = z^-1 y^2 x
    case -1: braid_mul_x(nf); braid_mul_y(nf, 1); break;  // A = z^-1 x y
    case 2: braid_mul_x(nf); braid_mul_y(nf, 2); break;   // b = z^-1 x y^2
    case -2: braid_mul_y(nf, 1); braid_mul_x(nf); break;  // B = z^-1 y x
    default: throw OracleError("invalid letter for braid3", Word{l});
  }
  if (nf.size() == 1 && nf[0] == 0) nf.clear();
}

Word Braid3::representative(const NormalForm& nf) const {
  Word w;
  if (nf.empty()) return w;
  const std::int64_t k = nf[0];
  for (std::int64_t i = 0; i < (k >= 0 ? k : -k); ++i)
    for (int j = 0; j < 3; ++j) {
      if (k > 0) {
        w.push_back(1);
        w.push_back(2);
      } else {
        w.push_back(-2);
        w.push_back(-1);
      }
    }
  for (std::size_t i = 1; i < nf.size(); ++i) {
    switch (nf[i]) {
      case FreeProductZ2Z3::kX: w.insert(w.end(), {1, 2, 1}); break;
      case FreeProductZ2Z3::kY: w.insert(w.end(), {1, 2}); break;
      default: w.insert(w.end(), {1, 2, 1, 2}); break;
    }
  }
  return w;
}

NormalForm Braid3::central_quotient(const NormalForm& nf) const {
  return nf.size() <= 1 ? NormalForm{} : NormalForm(nf.begin() + 1, nf.end());
}

std::int64_t Braid3::key_exponent_sum(const NormalForm& nf) {
  if (nf.empty()) return 0;
  std::int64_t sum = 6 * static_cast<std::int64_t>(nf[0]);
  for (std::size_t i = 1; i < nf.size(); ++i)
    sum += nf[i] == FreeProductZ2Z3::kX ? 3 : (nf[i] == FreeProductZ2Z3::kY ? 2 : 4);
  return sum;
}

std::int64_t Braid3::exponent_sum(const Word& w) {
  std::int64_t sum = 0;
  for (Letter l : w) sum += l > 0 ? 1 : -1;
  return sum;
}

Mat2 Braid3::matrix(const Word& w) {
  static const Mat2 a{1, 1, 0, 1}, ai{1, -1, 0, 1}, b{1, 0, -1, 1}, bi{1, 0, 1, 1};
  Mat2 m{1, 0, 0, 1};
  for (Letter l : w) {
    switch (l) {
      case 1: m = m * a; break;
      case -1: m = m * ai; break;
      case 2: m = m * b; break;
      case -2: m = m * bi; break;
      default: throw OracleError("invalid letter for braid3", w);
    }
  }
  return m;
}

std::optional<std::int64_t> Braid3::certified_norm(const NormalForm& nf) {
  const std::int64_t k = central_exponent(nf);
  const auto syllables = static_cast<std::int64_t>(nf.empty() ? 0 : nf.size() - 1);
  const std::int64_t rho = key_exponent_sum(nf);
  // Inverting a syllable costs one Delta^-2, so z^k w equals z^(k+s) times a negative word.
  if (k >= 0) return rho;
  if (k + syllables <= 0) return -rho;
  return std::nullopt;
}

NormalForm Braid3::delta_squared_power(std::int64_t k) {
  return k == 0 ? NormalForm{} : NormalForm{static_cast<std::int32_t>(k)};
}

// ---- finite samples

FiniteSample::FiniteSample(std::string name, std::vector<char> labels, std::vector<std::vector<int>> table,
                           std::vector<int> generators, int identity)
    : GroupModel(std::move(name), GeneratorAlphabet(std::move(labels))),
      table_(std::move(table)),
      generators_(std::move(generators)),
      identity_(identity) {
  const int n = static_cast<int>(table_.size());
  if (generators_.size() != alphabet().rank()) throw std::invalid_argument("one generator element per label required");
  inverses_.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    if (static_cast<int>(table_[g].size()) != n) throw std::invalid_argument("multiplication table must be square");
    for (int h = 0; h < n; ++h)
      if (table_[g][h] == identity_) inverses_[g] = h;
    if (inverses_[g] < 0) throw std::invalid_argument("table is not a group: missing inverse");
  }
  words_.assign(n, Word{});
  std::vector<bool> seen(n, false);
  seen[identity_] = true;
  std::deque<int> queue{identity_};
  while (!queue.empty()) {
    const int g = queue.front();
    queue.pop_front();
    for (int rank = 0; rank < 2 * static_cast<int>(generators_.size()); ++rank) {
      const Letter l = letter_from_rank(rank);
      const int s = l > 0 ? generators_[generator_index(l)] : inverses_[generators_[generator_index(l)]];
      const int h = table_[g][s];
      if (!seen[h]) {
        seen[h] = true;
        words_[h] = words_[g];
        words_[h].push_back(l);
        queue.push_back(h);
      }
    }
  }
  for (int g = 0; g < n; ++g)
    if (!seen[g]) throw std::invalid_argument("generators do not generate the table group");
}

void FiniteSample::multiply_letter(NormalForm& nf, Letter l) const {
  const int g = index(nf);
  const int gen = generators_.at(generator_index(l));
  nf = key(table_[g][l > 0 ? gen : inverses_[gen]]);
}

Word FiniteSample::representative(const NormalForm& nf) const { return words_.at(index(nf)); }

std::unique_ptr<FiniteSample> FiniteSample::cyclic(int n) {
  std::vector<std::vector<int>> table(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) table[i][j] = (i + j) % n;
  return std::make_unique<FiniteSample>("cyclic:" + std::to_string(n), std::vector<char>{'a'}, table,
                                        std::vector<int>{1 % n}, 0);
}

std::unique_ptr<FiniteSample> FiniteSample::symmetric3() {
  // Permutations of {0,1,2} as images; composition (p*q)(i) = p(q(i)).
  const std::vector<std::array<int, 3>> perms{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::vector<std::vector<int>> table(6, std::vector<int>(6));
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      std::array<int, 3> c{perms[i][perms[j][0]], perms[i][perms[j][1]], perms[i][perms[j][2]]};
      for (int k = 0; k < 6; ++k)
        if (perms[k] == c) table[i][j] = k;
    }
  return std::make_unique<FiniteSample>("s3", std::vector<char>{'a', 'b'}, table, std::vector<int>{1, 2}, 0);
}

std::unique_ptr<GroupModel> make_model(const std::string& id) {
  auto suffix_int = [&](const std::string& prefix) -> int {
    try {
      return std::stoi(id.substr(prefix.size()));
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed model id '" + id + "'");
    }
  };
  if (id.rfind("free:", 0) == 0) {
    const int k = suffix_int("free:");
    if (k < 1 || k > 26) throw std::invalid_argument("free group rank out of range in '" + id + "'");
    return std::make_unique<FreeGroup>(static_cast<std::size_t>(k));
  }
  if (id == "z2z3") return std::make_unique<FreeProductZ2Z3>();
  if (id == "braid3") return std::make_unique<Braid3>();
  if (id == "s3") return FiniteSample::symmetric3();
  if (id.rfind("cyclic:", 0) == 0) {
    const int n = suffix_int("cyclic:");
    if (n < 1) throw std::invalid_argument("cyclic order must be positive in '" + id + "'");
    return FiniteSample::cyclic(n);
  }
  throw std::invalid_argument("unknown model '" + id + "'");
}

}  // namespace genlab
