#include <gtest/gtest.h>

#include <random>

#include "genlab/census.hpp"
#include "genlab/contraction.hpp"
#include "oracles.hpp"

using namespace genlab;

namespace {

// L_map = 2 and block length 3, with a replacement window wide enough for n around 10.
ConstantLedger census_ledger(const Rational& K_map) {
  MeasuredConstants m;
  m.C0 = m.D_C = m.D_S = m.E0 = 1;
  Windows w;
  w.replace_lo = Rational(1, 5);
  w.replace_hi = Rational(2, 5);
  return ConstantLedger::scaled(m, K_map, 2, 3, ThresholdRule{2, 3, 1}, w);
}

// Reduced words of length m over k generators whose cyclic reduction has length c.
BigInt cyclic_count_formula(std::int64_t k, std::int64_t m, std::int64_t c) {
  if (m == 0) return c == 0 ? 1 : 0;
  if (c == 0 || c > m || (m - c) % 2 != 0) return 0;
  BigInt q = 1;
  for (std::int64_t i = 0; i < c; ++i) q *= 2 * k - 1;
  const BigInt cyclic = q + 1 + (k - 1) * (c % 2 == 0 ? 2 : 0);
  const std::int64_t p = (m - c) / 2;
  if (p == 0) return cyclic;
  BigInt tail = 2 * k - 2;
  for (std::int64_t i = 1; i < p; ++i) tail *= 2 * k - 1;
  return cyclic * tail;
}

Word f3(const std::string& s) { return GeneratorAlphabet::standard(3).parse(s); }

}  // namespace

// ---- classification

TEST(Classify, WorkedBraidExamples) {
  auto lab = Lab::make("braid3");
  auto run = [&](const std::string& w) { return classify(lab->group(), lab->action(), lab->parse(w)); };
  const auto s1 = run("a");
  EXPECT_EQ(s1.verdict, Verdict::kReducible);
  EXPECT_EQ(*s1.trace, 2);
  const auto pa = run("aB");
  EXPECT_EQ(pa.verdict, Verdict::kPseudoAnosov);
  EXPECT_EQ(*pa.trace, 3);
  const auto per = run("ab");
  EXPECT_EQ(per.verdict, Verdict::kPeriodic);
  EXPECT_EQ(*per.trace, 1);
  EXPECT_EQ(*per.projective_order, 3);
  // The matrix products themselves.
  const auto m = oracle::braid_invariant(f3("aB")).m;
  EXPECT_EQ(m, (oracle::M2{2, 1, 1, 1}));
  EXPECT_EQ(oracle::braid_invariant(f3("ab")).m, (oracle::M2{0, 1, -1, 1}));
  // Delta^2 maps to -I: periodic with trivial projective image.
  const auto z = classify(lab->group(), lab->action(), Braid3::delta_squared_power(1));
  EXPECT_EQ(z.verdict, Verdict::kPeriodic);
  EXPECT_EQ(*z.trace, -2);
  EXPECT_EQ(*z.projective_order, 1);
}

TEST(Classify, TreeModelsUseTranslationLength) {
  auto f2 = Lab::make("free:2");
  const auto a = classify(f2->group(), f2->action(), f2->parse("aab"));
  EXPECT_EQ(a.verdict, Verdict::kContractingLoxodromic);
  EXPECT_EQ(*a.translation_length, 3);
  EXPECT_EQ(classify(f2->group(), f2->action(), f2->parse("")).verdict, Verdict::kNonLoxodromic);
  auto z = Lab::make("z2z3");
  EXPECT_EQ(classify(z->group(), z->action(), z->parse("x")).verdict, Verdict::kNonLoxodromic);
  EXPECT_EQ(classify(z->group(), z->action(), z->parse("yxY")).verdict, Verdict::kNonLoxodromic);
  const auto xy = classify(z->group(), z->action(), z->parse("xy"));
  EXPECT_EQ(xy.verdict, Verdict::kContractingLoxodromic);
  EXPECT_EQ(*xy.translation_length, 2);
}

TEST(Classify, UnsupportedModelThrows) {
  auto s3 = build_action_model("free:2");
  auto finite = FiniteSample::symmetric3();
  EXPECT_THROW(classify(*finite, *s3.action, NormalForm{}), UnsupportedModel);
}

TEST(Classify, BraidVerdictIsConjugationInverseAndCenterInvariant) {
  auto lab = Lab::make("braid3");
  const auto& G = lab->group();
  std::mt19937_64 rng(2024);
  const NormalForm z = Braid3::delta_squared_power(1);
  std::array<int, 3> seen{};
  for (int trial = 0; trial < 1000; ++trial) {
    const NormalForm g = G.normalize(oracle::random_word(rng, 2, 12));
    const NormalForm h = G.normalize(oracle::random_word(rng, 2, 8));
    const auto v = classify(G, lab->action(), g).verdict;
    ++seen[v == Verdict::kPseudoAnosov ? 0 : v == Verdict::kReducible ? 1 : 2];
    EXPECT_EQ(classify(G, lab->action(), G.conjugate(g, h)).verdict, v) << G.format(g) << " by " << G.format(h);
    EXPECT_EQ(classify(G, lab->action(), G.inverse(g)).verdict, v) << G.format(g);
    EXPECT_EQ(classify(G, lab->action(), G.multiply(g, z)).verdict, v) << G.format(g);
    // |trace| > 2 exactly when the oracle matrix is hyperbolic.
    const auto m = oracle::braid_invariant(G.representative(g)).m;
    EXPECT_EQ(v == Verdict::kPseudoAnosov, std::abs(m.a + m.d) > 2);
  }
  for (int c : seen) EXPECT_GT(c, 0);
}

// ---- free group counting

TEST(FreeCount, CyclicLengthsMatchClosedForm) {
  const auto c = free_cycle_census(3, 8);
  for (std::int64_t m = 0; m <= 8; ++m)
    for (std::int64_t t = 0; t <= m; ++t)
      EXPECT_EQ(BigInt(c.by_length[m][t]), cyclic_count_formula(3, m, t)) << "m=" << m << " tau=" << t;
  for (std::int64_t n = 0; n <= 8; ++n) EXPECT_EQ(c.ball_size(n), FreeGroup::ball_size(3, n));
  EXPECT_EQ(c.ball_size(2), 37);
}

TEST(FreeCount, ReplacementLetterAndCyclicLength) {
  EXPECT_EQ(replace_letter(3, f3("acA"), 1), f3("bcA"));
  EXPECT_EQ(cyclic_length(f3("bcA")), 3);
  EXPECT_EQ(cyclic_length(f3("acA")), 1);
  EXPECT_EQ(cyclic_length(f3("")), 0);
  // Neighbours rule out letters that would cancel.
  EXPECT_EQ(replacement_letter(3, 2, 1, -3), 2);
  EXPECT_EQ(replacement_letter(3, -2, 1, 0), -2);
  EXPECT_EQ(replacement_letter(3, -2, 1, 3), -2);
  EXPECT_EQ(replacement_letter(3, -2, 1, 2), 3);
  EXPECT_THROW(replacement_letter(2, -2, 1, 2), std::invalid_argument);
  EXPECT_THROW(replace_letter(3, f3("ab"), 3), std::invalid_argument);
}

TEST(FreeCount, DocumentedInstances) {
  const auto q = free_group_threshold_count(3, 2, 0);
  EXPECT_EQ(q.count, 1);
  EXPECT_EQ(q.ball, 37);
  EXPECT_TRUE(q.single_holds);
  EXPECT_EQ(q.single_factor, Rational(7, 6));

  const auto r = free_group_threshold_count(3, 8, 2);
  EXPECT_TRUE(r.single_holds);
  EXPECT_TRUE(r.binomial_holds);
  BigInt oracle_count = 0;
  for (std::int64_t m = 0; m <= 8; ++m)
    for (std::int64_t t = 0; t <= 2; ++t) oracle_count += cyclic_count_formula(3, m, t);
  EXPECT_EQ(r.count, oracle_count);
  EXPECT_GT(r.single_slack(), 0);
  EXPECT_GE(r.single_slack(), r.binomial_slack());
  EXPECT_EQ(r.binomial_factor, Rational(343, 216));  // (7/6)^3

  // T >= n leaves a factor at most 1.
  const auto c = free_cycle_census(3, 6);
  const auto trivial = threshold_inequality(c, 4, 6);
  EXPECT_LE(trivial.single_factor, 1);
  EXPECT_TRUE(trivial.single_holds);

  EXPECT_THROW(free_group_threshold_count(3, 3, 3), std::invalid_argument);
  EXPECT_THROW(free_cycle_census(3, 14), std::invalid_argument);
}

TEST(FreeCount, InequalityAndFibersUpToTwelve) {
  const auto c = free_cycle_census(3, 12);
  EXPECT_EQ(c.ball_size(12), FreeGroup::ball_size(3, 12));
  std::uint64_t violations = 0;
  for (std::int64_t n = 1; n <= 12; ++n)
    for (std::int64_t T = 0; T < n; ++T) {
      const auto q = threshold_inequality(c, n, T);
      if (!q.single_holds || !q.binomial_holds) ++violations;
    }
  EXPECT_EQ(violations, 0u);
  EXPECT_EQ(c.fiber_violations, 0u);
  EXPECT_LE(c.max_fiber_up_to(12), 6u);
  EXPECT_GT(c.replacement_pairs[12], 0u);
}

TEST(FreeCount, HashedFibersAgreeWithLocalCount) {
  const auto c = free_cycle_census(3, 8);
  for (std::int64_t n = 1; n <= 8; ++n) {
    std::uint64_t worst = 0;
    for (std::int64_t T = 0; T < n; ++T) {
      const auto r = single_letter_fibers(3, n, T);
      std::uint64_t total = 0;
      for (const auto& [size, count] : r.histogram) total += size * count;
      EXPECT_EQ(total, r.domain_size);
      EXPECT_LE(r.image_norm_excess, 0);
      worst = std::max(worst, r.max_fiber);
    }
    EXPECT_EQ(worst, c.max_fiber_up_to(n)) << n;
  }
}

TEST(FreeCount, DoubleReplacementChangesBothLetters) {
  const Word g = f3("abcabcabcbab");
  ASSERT_EQ(g.size(), 12u);
  const Word out = replace_two_letters(3, g, 2, 4);
  ASSERT_EQ(out.size(), g.size());
  for (std::size_t p = 0; p < g.size(); ++p) EXPECT_EQ(out[p] != g[p], p == 1 || p == 3) << p;
  EXPECT_EQ(free_reduce(out), out);
  EXPECT_THROW(replace_two_letters(3, g, 4, 4), std::invalid_argument);
  for (std::int64_t n = 5; n <= 8; ++n)
    for (std::int64_t T = 0; T < n; ++T) {
      const auto r = double_letter_fibers(3, n, T);
      std::uint64_t total = 0;
      for (const auto& [size, count] : r.histogram) total += size * count;
      EXPECT_EQ(total, r.domain_size);
      EXPECT_LE(r.max_fiber, 6u * static_cast<std::uint64_t>(n));
    }
}

// ---- A_thick

TEST(AThick, CertifyWindowAndAlignment) {
  auto lab = Lab::make("free:2");
  const auto ledger = census_ledger(2);
  const NormalForm g = lab->parse("bbbaabbbbb");
  // Window [2.5, 3] at |g| = 10.
  const auto good = OrbitSegment::make(lab->action(), lab->parse("bbb"), lab->phi(), 2);
  const auto c = a_thick_certify(*lab, ledger, g, good);
  EXPECT_TRUE(c.certified) << c.reason;
  EXPECT_EQ(c.distance, 3);

  const NormalForm far = lab->parse("bbbbbaabbb");
  const auto off = a_thick_certify(*lab, ledger, far, OrbitSegment::make(lab->action(), lab->parse("bbbbb"), lab->phi(), 2));
  EXPECT_FALSE(off.certified);
  EXPECT_EQ(off.distance, 5);
  EXPECT_NE(off.reason.find("window"), std::string::npos);

  const auto reversed = OrbitSegment::make(lab->action(), lab->parse("bbbaa"), lab->parse("A"), 2);
  const auto rev = a_thick_certify(*lab, ledger, g, reversed);
  EXPECT_FALSE(rev.certified);
  ASSERT_TRUE(rev.alignment.has_value());
  EXPECT_FALSE(rev.alignment->aligned);
  EXPECT_NE(rev.reason.find("aligned"), std::string::npos);

  EXPECT_THROW(a_thick_certify(*lab, ledger, g, OrbitSegment::make(lab->action(), {}, lab->phi(), 3)),
               std::invalid_argument);
}

TEST(AThick, SearchIsSoundAndFlagsDegenerateNorms) {
  auto lab = Lab::make("free:2");
  const auto ledger = census_ledger(2);
  const NormalForm g = lab->parse("bbbaabbbbb");
  const auto yes = a_thick_search(*lab, ledger, g);
  ASSERT_TRUE(yes.found);
  EXPECT_STREQ(yes.label(), "certified-yes");
  EXPECT_TRUE(a_thick_certify(*lab, ledger, g, *yes.witness).certified);

  const NormalForm orth = lab->parse("bbbbbbbbbbbb");
  const auto no = a_thick_search(*lab, ledger, orth);
  EXPECT_FALSE(no.found);
  EXPECT_GT(no.candidates, 0u);
  // A perturbed base can cross the axis of g, which is a genuine certificate.
  for (std::int64_t r : {1, 2}) {
    const auto hit = a_thick_search(*lab, ledger, orth, r);
    ASSERT_TRUE(hit.found) << r;
    EXPECT_TRUE(a_thick_certify(*lab, ledger, orth, *hit.witness).certified);
  }
  const auto tiny = a_thick_search(*lab, ledger, lab->parse("ab"));
  EXPECT_FALSE(tiny.found);
  EXPECT_TRUE(tiny.degenerate);
}

// ---- replacement maps

class TreeReplacement : public ::testing::TestWithParam<const char*> {};

TEST_P(TreeReplacement, SphereImagesAreCertifiedAndBounded) {
  auto lab = Lab::make(GetParam());
  const auto ledger = census_ledger(3);
  const std::int64_t n = 10;
  const auto [lo, hi] = replacement_window(ledger, n);
  ASSERT_EQ(lo, 2);
  ASSERT_EQ(hi, 4);
  const Ball ball = lab->metric().ball(n);
  std::size_t checked = 0;
  for (std::size_t idx = ball.sphere_begin(n); idx < ball.size(); idx += 7) {
    const NormalForm& g = ball.elements()[idx];
    for (std::int64_t i = lo; i <= hi; ++i) {
      const auto r = replacement_map(*lab, ledger, g, i, n);
      EXPECT_TRUE(r.alignment.aligned);
      EXPECT_LE(r.image_norm, n + r.norm_slack);
      EXPECT_EQ(*lab->group().exact_length(r.image), r.image_norm);
      ++checked;
    }
  }
  EXPECT_GT(checked, 10u);
  const NormalForm g = ball.elements()[ball.sphere_begin(n)];
  EXPECT_THROW(replacement_map(*lab, ledger, g, 1, n), std::invalid_argument);
  EXPECT_THROW(replacement_map(*lab, ledger, g, 5, n), std::invalid_argument);
  // The block must fit after the prefix.
  const NormalForm short_g = ball.elements()[ball.sphere_begin(5)];
  EXPECT_THROW(replacement_map(*lab, ledger, short_g, 3, n), std::invalid_argument);
}

TEST_P(TreeReplacement, DoubleReplacementExtendsTheFirst) {
  auto lab = Lab::make(GetParam());
  const auto ledger = census_ledger(3);
  const auto& G = lab->group();
  ASSERT_EQ(ledger.ind2_gap(), 5);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const NormalForm g = lab->random_element(rng, 22);
    const auto word = *lab->metric().geodesic_word(g, 64);
    if (word.size() < 16) continue;
    const std::int64_t n = static_cast<std::int64_t>(word.size());
    const auto [lo, hi] = replacement_window(ledger, n);
    const std::int64_t i = lo, j = i + ledger.ind2_gap() + 1;
    if (j + 2 * ledger.block_length() - 2 > n) continue;
    const auto r = double_replacement(*lab, ledger, g, i, j, n);
    EXPECT_TRUE(r.alignment.aligned);
    ASSERT_EQ(r.linkages.size(), 4u);
    auto key = [&](Letter s) { return s == 0 ? NormalForm{} : lab->gens().key(s); };
    const NormalForm v = lab->metric().evaluate(Word(word.begin() + j + 2 * ledger.block_length() - 2, word.end()));
    NormalForm tail = key(r.linkages[2]);
    tail = G.multiply(tail, G.power(lab->phi(), 2 * ledger.segment_length()));
    tail = G.multiply(tail, key(r.linkages[3]));
    tail = G.multiply(tail, v);
    EXPECT_EQ(G.multiply(r.prefix, tail), r.image);
    EXPECT_LE(r.image_norm, n + r.norm_slack);
    EXPECT_THROW(double_replacement(*lab, ledger, g, i, i + ledger.ind2_gap(), n), std::invalid_argument);
    (void)hi;
  }
}

INSTANTIATE_TEST_SUITE_P(Models, TreeReplacement, ::testing::Values("free:2", "z2z3"),
                         [](const auto& info) { return std::string(info.param) == "free:2" ? "F2" : "Z2Z3"; });

// ---- fibers

TEST(FiberCensus, Z2Z3FibersStayBelowSqrtScale) {
  auto lab = Lab::make("z2z3");
  const auto ledger = census_ledger(3);
  std::vector<FiberReport> reports;
  for (std::int64_t n = 8; n <= 14; ++n) {
    auto r = fiber_census(*lab, ledger, n);
    std::uint64_t total = 0;
    for (const auto& [size, count] : r.histogram) total += size * count;
    EXPECT_EQ(total, r.domain_size);
    EXPECT_GT(r.domain_size, 0u);
    EXPECT_GE(r.max_fiber * r.image_size, r.domain_size);
    EXPECT_LE(r.image_norm_excess, 2 * 2 + 2 - 3);
    reports.push_back(std::move(r));
  }
  EXPECT_LE(least_sqrt_constant(reports), 3.0);
}

TEST(FiberCensus, F2SmallRadii) {
  auto lab = Lab::make("free:2");
  const auto ledger = census_ledger(2);
  std::vector<FiberReport> reports;
  for (std::int64_t n = 8; n <= 9; ++n) reports.push_back(fiber_census(*lab, ledger, n));
  for (const auto& r : reports) {
    EXPECT_GT(r.domain_size, r.image_size);
    EXPECT_FALSE(r.truncated());
  }
  EXPECT_LE(least_sqrt_constant(reports), 20.0);
}

TEST(FiberCensus, EmptyWindowAndBudget) {
  auto lab = Lab::make("z2z3");
  auto ledger = census_ledger(3);
  Windows w = ledger.windows();
  w.replace_lo = Rational(1, 2);
  w.replace_hi = Rational(11, 20);  // [5, 5.5] at n = 10: index 5 leaves no room for the block beyond n
  w.replace_lo = Rational(9, 10);
  w.replace_hi = Rational(9, 10);
  ledger.set_windows(w);
  const auto empty = fiber_census(*lab, ledger, 10);
  EXPECT_EQ(empty.domain_size, 0u);
  EXPECT_EQ(empty.max_fiber, 0u);

  const auto budget = fiber_census(*Lab::make("z2z3"), census_ledger(3), 10, FiberOptions{0, true, 5});
  EXPECT_TRUE(budget.truncated());
}

// ---- genericity

TEST(Genericity, BraidNonPseudoAnosovCosetsThinOut) {
  auto check = [](const Lab& lab) {
    GenericityOptions o;
    o.R_max = 9;
    const auto c = genericity_experiment(lab, o);
    ASSERT_EQ(c.radii.size(), 10u);
    EXPECT_EQ(c.ratios[0], 1);
    for (std::size_t R = 6; R <= 9; R += 2) EXPECT_LE(c.ratios[R], c.ratios[R - 2]) << R;
    for (const auto& q : c.ratios) {
      EXPECT_GE(q, 0);
      EXPECT_LE(q, 1);
    }
    ASSERT_TRUE(c.decay_exponent.has_value());
    EXPECT_LT(*c.decay_exponent, 0);
    const auto census = lab.metric().enumerate_ball(9, false).ball_counts();
    for (std::size_t R = 0; R < c.radii.size(); ++R) {
      EXPECT_EQ(c.element_totals[R], census[R]);
      EXPECT_LE(c.element_counts[R], c.counts[R] * c.max_coset_intersection);
    }
  };
  check(*Lab::make("braid3"));
  // b = a^-k w a^-m, so {a, w} generates.
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> e(-1, 1);
  std::string w;
  const int k = e(rng), m = e(rng);
  auto powa = [](int p) { return p > 0 ? std::string(p, 'a') : std::string(-p, 'A'); };
  w = powa(k) + "b" + powa(m);
  check(*Lab::make("braid3", {"a", w}));
}

TEST(Genericity, FreeNonLoxodromicRatioDecreases) {
  auto lab = Lab::make("free:2");
  GenericityOptions o;
  o.R_max = 12;
  const auto c = genericity_experiment(*lab, o);
  EXPECT_EQ(c.ratios[0], 1);
  for (std::size_t n = 5; n <= 12; ++n) EXPECT_LT(c.ratios[n], c.ratios[n - 1]) << n;
  EXPECT_TRUE(c.tail_monotone);
}

TEST(Genericity, WordTranslationThreshold) {
  auto lab = Lab::make("z2z3");
  GenericityOptions o;
  o.R_max = 8;
  const auto tree_only = genericity_experiment(*lab, o);
  o.tau_s = Rational(7, 20);
  const auto both = genericity_experiment(*lab, o);
  for (std::size_t R = 0; R < both.radii.size(); ++R) {
    EXPECT_GE(both.counts[R], tree_only.counts[R]);
    EXPECT_EQ(both.undecided[R], 0u);
    EXPECT_EQ(both.totals[R], tree_only.totals[R]);
  }
  EXPECT_THROW(genericity_experiment(*Lab::make("cyclic:5"), o), UnsupportedModel);
}

TEST(Genericity, LogLogSlopeUsesTheTail) {
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  std::vector<double> y;
  for (double v : x) y.push_back(v < 4 ? 1.0 : 7.0 / (v * v));
  EXPECT_NEAR(*log_log_slope(x, y), -2.0, 1e-12);
  EXPECT_FALSE(log_log_slope({1, 2}, {1, 1}).has_value());
}

// ---- exponential negligibility

TEST(Negligibility, F2MatchesConjugationScan) {
  auto lab = Lab::make("free:2");
  const auto ledger = census_ledger(2);
  const auto rep = exponential_negligibility_probe(*lab, ledger, 1, 12);
  for (const auto& p : rep.points)
    if (p.n <= 3) EXPECT_EQ(p.decomposable, 0u);
  // Oracle at n = 8: g is decomposable iff some h in B(2) has |h g h^-1| <= 4.
  const auto& G = lab->group();
  const Ball b2 = lab->metric().ball(2);
  const Ball b8 = lab->metric().ball(8);
  std::uint64_t hits = 0;
  for (std::size_t idx = b8.sphere_begin(8); idx < b8.size(); ++idx)
    for (const auto& h : b2.elements())
      if (G.conjugate(b8.elements()[idx], h).size() <= 4) {
        ++hits;
        break;
      }
  EXPECT_EQ(rep.points[7].decomposable, hits);
  // Rounded windows make the ratio non-monotone step to step; it still drops over every span of four.
  for (std::int64_t n = 7; n + 4 <= 12; ++n)
    EXPECT_LT(rep.points[n + 3].ratio, rep.points[n - 1].ratio) << n;
  ASSERT_TRUE(rep.rate.has_value());
  EXPECT_GT(*rep.rate, 1.0);
}
