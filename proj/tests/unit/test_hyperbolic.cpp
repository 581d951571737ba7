#include <gtest/gtest.h>

#include <random>

#include "genlab/hyperbolic.hpp"
#include "oracles.hpp"

using namespace genlab;

namespace {

Point pw(std::initializer_list<int> w) { return Point(w); }  // reduced word as a Cayley-tree vertex

Point power(int letter, int n) { return Point(static_cast<std::size_t>(n), letter); }

std::int64_t set_diameter(const MetricSpace& s, const std::vector<Point>& pts) {
  std::int64_t m = 0;
  for (const auto& p : pts)
    for (const auto& q : pts) m = std::max(m, s.distance(p, q));
  return m;
}

// Reference projection: brute-force minimum over the vertices of the target.
std::vector<std::size_t> brute_projection(const MetricSpace& s, const Point& x, const Geodesic& g) {
  std::int64_t best = -1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto d = s.distance(x, g[i]);
    if (best < 0 || d < best) {
      best = d;
      out.clear();
    }
    if (d == best) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST(GromovProduct, Examples) {
  CayleyTree t(2);
  const Point x0{}, a{1}, b{2};
  EXPECT_EQ(gromov_product(t, a, b, x0), 0);
  EXPECT_EQ(gromov_product(t, a, a, b), t.distance(a, b));
  EXPECT_EQ(gromov_product(t, a, b, a), 0);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Point p = free_reduce(oracle::random_word(rng, 2, 8)), q = free_reduce(oracle::random_word(rng, 2, 8)),
                z = free_reduce(oracle::random_word(rng, 2, 8));
    const Rational gp = gromov_product(t, p, q, z);
    EXPECT_GE(gp, 0);
    EXPECT_EQ(gp, Rational(distance_to(t, z, t.geodesic(p, q))));
  }
}

TEST(Project, Examples) {
  CayleyTree t(2);
  const Point a{1}, b{2}, bb{2, 2};
  const auto g = t.geodesic(b, bb);
  const auto p = project(t, a, g);
  ASSERT_EQ(p.indices.size(), 1u);
  EXPECT_EQ(g[p.first()], b);
  EXPECT_EQ(p.distance, 2);
  const auto h = t.geodesic(pw({1, 1}), pw({2, 2, 2}));
  for (std::size_t i = 0; i < h.size(); ++i) EXPECT_EQ(project(t, h[i], h).indices, std::vector<std::size_t>{i});
}

TEST(Project, TreeFastPathMatchesBruteForce) {
  auto bs = build_bass_serre_tree();
  CayleyTree t(3);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 2000; ++i) {
    const Point p = free_reduce(oracle::random_word(rng, 3, 8)), q = free_reduce(oracle::random_word(rng, 3, 8)),
                x = free_reduce(oracle::random_word(rng, 3, 8));
    const auto g = t.geodesic(p, q);
    EXPECT_EQ(project(t, x, g).indices, brute_projection(t, x, g));
    const auto& G = *bs.group;
    const Point u = bs.action->orbit(G.normalize(oracle::random_word(rng, 2, 10)));
    const Point v = bs.action->orbit(G.normalize(oracle::random_word(rng, 2, 10)));
    const Point y = bs.action->orbit(G.normalize(oracle::random_word(rng, 2, 10)));
    const auto h = bs.space->geodesic(u, v);
    EXPECT_EQ(project(*bs.space, y, h).indices, brute_projection(*bs.space, y, h));
  }
}

TEST(Project, GraphProjectionSetsShareDistance) {
  const auto g = FiniteGraph::cycle(6);
  const auto geo = g.geodesic({0}, {2});
  const auto p = project(g, {4}, geo);
  EXPECT_EQ(p.indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(p.distance, 2);
}

TEST(Alignment, CollinearExamples) {
  CayleyTree t(2);
  const auto path = t.geodesic({}, power(1, 10));
  const auto g1 = path.sub(1, 3), g2 = path.sub(6, 9);
  const auto fwd = check_alignment(t, {g1, g2}, 1);
  EXPECT_TRUE(fwd.aligned);
  EXPECT_EQ(fwd.max_diameter(), 0);
  const auto rev = check_alignment(t, {g2, g1}, 1);
  EXPECT_FALSE(rev.aligned);
  // Each projection lands on the far endpoint, a whole segment away.
  EXPECT_EQ(rev.pairs[0].forward, 3);
  EXPECT_EQ(rev.pairs[0].backward, 2);
  EXPECT_TRUE(check_alignment(t, {Geodesic::degenerate({1})}, Rational(1, 1000)).aligned);
  EXPECT_THROW(check_alignment(t, {}, 1), std::invalid_argument);
  const auto j = fwd.to_json(t);
  EXPECT_EQ(j.at("aligned"), true);
  EXPECT_EQ(j.at("sequence")[0].at("start"), "a");
}

TEST(FellowTraveling, Examples) {
  CayleyTree t(2);
  const auto g = t.geodesic(pw({1, 1}), pw({2, 2}));
  EXPECT_TRUE(fellow_traveling(t, g, g, Rational(1, 100)));
  // [b, ba] and [Ba, B] share no vertex and are at Hausdorff distance 3.
  const auto u = t.geodesic(pw({2}), pw({2, 1}));
  const auto v = t.geodesic(pw({-2, 1}), pw({-2}));
  EXPECT_EQ(hausdorff_distance(t, u, v), 3);
  EXPECT_FALSE(fellow_traveling(t, u, v, 2));
  EXPECT_TRUE(fellow_traveling(t, u, v, 4));
  // 6-cycle: the two halves share endpoints but are Hausdorff distance 1 apart.
  const auto c = FiniteGraph::cycle(6);
  const auto all = c.all_geodesics({0}, {3}, 10);
  ASSERT_EQ(all.size(), 2u);
  const auto ft = fellow_travel(c, all[0], all[1]);
  EXPECT_EQ(ft.start_gap, 0);
  EXPECT_EQ(ft.end_gap, 0);
  EXPECT_EQ(ft.hausdorff, 1);
  EXPECT_FALSE(fellow_traveling(c, all[0], all[1], 1));
  EXPECT_TRUE(fellow_traveling(c, all[0], all[1], 2));
}

TEST(Behrstock, Branches) {
  CayleyTree t(2);
  const auto path = t.geodesic({}, power(1, 10));
  const auto g1 = path.sub(0, 3), g2 = path.sub(4, 7);
  // Beyond g2's far end: (g1, x) is aligned.
  EXPECT_EQ(behrstock_dichotomy(t, power(1, 9), g1, g2, 1, 0).branch, BehrstockBranch::kSecond);
  // Behind g1's near end: (x, g2) is aligned.
  EXPECT_EQ(behrstock_dichotomy(t, power(-1, 2), g1, g2, 1, 0).branch, BehrstockBranch::kFirst);
  // Tripod centre between them.
  const auto h1 = t.geodesic(power(-1, 3), power(-1, 1));
  const auto h2 = t.geodesic(power(2, 1), power(2, 3));
  EXPECT_EQ(behrstock_dichotomy(t, power(-2, 2), h1, h2, 1, 0).branch, BehrstockBranch::kBoth);
  EXPECT_THROW(behrstock_dichotomy(t, {}, g2, g1, 1, 0), HypothesisError);
  try {
    (void)behrstock_dichotomy(t, {}, g2, g1, 1, 0);
  } catch (const HypothesisError& e) {
    ASSERT_TRUE(e.report().has_value());
    EXPECT_FALSE(e.report()->aligned);
  }
}

TEST(Behrstock, NeverNeitherOnRandomTreeConfigs) {
  CayleyTree t(2);
  std::mt19937_64 rng(3);
  int tested = 0;
  for (int i = 0; i < 3000; ++i) {
    const Point a = free_reduce(oracle::random_word(rng, 2, 6)), b = free_reduce(oracle::random_word(rng, 2, 6));
    const Point c = free_reduce(oracle::random_word(rng, 2, 6)), d = free_reduce(oracle::random_word(rng, 2, 6));
    const Point x = free_reduce(oracle::random_word(rng, 2, 6));
    const auto g1 = t.geodesic(a, b), g2 = t.geodesic(c, d);
    const Rational K = 1 + static_cast<int>(rng() % 3);
    if (!check_alignment(t, {g1, g2}, K).aligned) continue;
    ++tested;
    EXPECT_NE(behrstock_dichotomy(t, x, g1, g2, K, 0).branch, BehrstockBranch::kNeither);
  }
  EXPECT_GT(tested, 100);
}

TEST(Behrstock, SixCycleExhaustive) {
  const auto c = FiniteGraph::cycle(6);
  const Rational delta = c.delta();
  std::vector<Geodesic> geos;
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q)
      for (const auto& g : c.all_geodesics({p}, {q}, 10)) geos.push_back(g);
  for (const Rational K : {Rational(1), Rational(2)})
    for (const auto& g1 : geos)
      for (const auto& g2 : geos) {
        if (!check_alignment(c, {g1, g2}, K).aligned) continue;
        for (int x = 0; x < 6; ++x)
          ASSERT_NE(behrstock_dichotomy(c, {x}, g1, g2, K, delta).branch, BehrstockBranch::kNeither);
      }
}

TEST(ChainAlignment, CollinearAndHypotheses) {
  CayleyTree t(2);
  const auto path = t.geodesic({}, power(2, 20));
  const std::vector<Geodesic> seq{path.sub(0, 4), path.sub(5, 9), path.sub(10, 14), path.sub(15, 20)};
  const auto r = chain_alignment(t, seq, 1, 0);
  EXPECT_TRUE(r.holds());
  EXPECT_EQ(r.pairs_checked, 6u);
  EXPECT_TRUE(chain_alignment(t, {seq[0], seq[3]}, 1, 0).holds());
  EXPECT_THROW(chain_alignment(t, {seq[1], seq[0]}, 1, 0), HypothesisError);
  // Interior member too short for 2K + 120 delta.
  EXPECT_THROW(chain_alignment(t, {seq[0], path.sub(6, 7), seq[3]}, 1, 0), HypothesisError);
}

TEST(ChainAlignment, RandomBranchedConfigurations) {
  CayleyTree t(3);
  std::mt19937_64 rng(4);
  int certified = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Word spine = oracle::random_reduced(rng, 3, 40);
    const auto path = t.geodesic({}, spine);
    std::vector<Geodesic> seq;
    std::size_t pos = static_cast<std::size_t>(rng() % 3);
    while (pos + 8 < path.size()) {
      const std::size_t len = 5 + rng() % 4;
      Point s = path[pos], e = path[pos + len];
      // Small branches off the spine keep the projections near the spine points.
      Point sb = free_reduce(concat(s, oracle::random_word(rng, 3, 1)));
      Point eb = free_reduce(concat(e, oracle::random_word(rng, 3, 1)));
      seq.push_back(t.geodesic(sb, eb));
      pos += len + 1 + rng() % 3;
    }
    if (seq.size() < 2) continue;
    const Rational K = 3;
    bool long_enough = true;
    for (std::size_t i = 1; i + 1 < seq.size(); ++i) long_enough = long_enough && seq[i].length() > 6;
    if (!long_enough || !check_alignment(t, seq, K).aligned) continue;
    ++certified;
    const auto r = chain_alignment(t, seq, K, 0);
    ASSERT_TRUE(r.holds()) << r.violation->first << "," << r.violation->second;
  }
  EXPECT_GT(certified, 300);
}

TEST(AlignedSubsegments, CollinearCases) {
  CayleyTree t(2);
  const auto path = t.geodesic({}, power(1, 30));
  const auto one = aligned_subsegments(t, path.start(), {path.sub(5, 12)}, path.end(), 1, 0);
  ASSERT_TRUE(one.certified);
  EXPECT_EQ(one.segments[0].eta, path.sub(5, 12));
  const std::vector<Geodesic> three{path.sub(2, 8), path.sub(10, 17), path.sub(20, 28)};
  const auto r = aligned_subsegments(t, path.start(), three, path.end(), 1, 0);
  ASSERT_TRUE(r.certified);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r.segments[i].eta, three[i]);
  EXPECT_THROW(aligned_subsegments(t, path.end(), three, path.start(), 1, 0), HypothesisError);
}

TEST(AlignedSubsegments, RandomTreeCertificates) {
  CayleyTree t(2);
  std::mt19937_64 rng(5);
  int certified = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Word spine = oracle::random_reduced(rng, 2, 36);
    const auto path = t.geodesic({}, spine);
    std::vector<Geodesic> seq;
    for (std::size_t pos = 2; pos + 9 < path.size(); pos += 11) {
      const Point sb = free_reduce(concat(path[pos], oracle::random_word(rng, 2, 1)));
      const Point eb = free_reduce(concat(path[pos + 8], oracle::random_word(rng, 2, 1)));
      seq.push_back(t.geodesic(sb, eb));
    }
    const Point x = free_reduce(concat(path.start(), oracle::random_word(rng, 2, 1)));
    const Point y = free_reduce(concat(path.end(), oracle::random_word(rng, 2, 1)));
    const Rational K = 3;
    std::vector<Geodesic> full{Geodesic::degenerate(x)};
    full.insert(full.end(), seq.begin(), seq.end());
    full.push_back(Geodesic::degenerate(y));
    bool long_enough = true;
    for (const auto& g : seq) long_enough = long_enough && g.length() > 2 * 3;
    if (!long_enough || !check_alignment(t, full, K).aligned) continue;
    ++certified;
    const auto r = aligned_subsegments(t, x, seq, y, K, 0);
    ASSERT_TRUE(r.certified);
    for (const auto& c : r.segments) {
      EXPECT_TRUE(fellow_traveling(t, c.gamma_prime, r.path.sub(c.begin, c.end), Rational(1, 2)));
    }
  }
  EXPECT_GT(certified, 400);
}

TEST(Properties, ProjectionIsOneLipschitzOnTrees) {
  for (const std::string id : {"free:2", "z2z3"}) {
    auto m = build_action_model(id);
    const auto& G = *m.group;
    std::mt19937_64 rng(6);
    for (int i = 0; i < 10000; ++i) {
      auto rand_pt = [&] { return m.action->orbit(G.normalize(oracle::random_word(rng, 2, 10))); };
      const Point x = rand_pt(), y = rand_pt();
      const auto g = m.space->geodesic(rand_pt(), rand_pt());
      const auto px = project(*m.space, x, g), py = project(*m.space, y, g);
      const std::int64_t diam = static_cast<std::int64_t>(std::max(px.last(), py.last()) - std::min(px.first(), py.first()));
      ASSERT_LE(diam, m.space->distance(x, y));
    }
  }
}

TEST(Properties, FellowTravelersOfOrderedSubsegmentsAreSixKAligned) {
  CayleyTree t(2);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto path = t.geodesic({}, oracle::random_reduced(rng, 2, 24));
    const std::size_t a = rng() % 6, b = a + 3 + rng() % 4, c = b + 1 + rng() % 4, d = c + 3 + rng() % 4;
    const Rational K = 1 + static_cast<int>(rng() % 3);
    auto perturb = [&](const Point& p) {
      const int r = static_cast<int>(rng() % static_cast<unsigned>(floor_i64(K)));
      return free_reduce(concat(p, oracle::random_reduced(rng, 2, r)));
    };
    const auto k1 = t.geodesic(perturb(path[a]), perturb(path[b]));
    const auto k2 = t.geodesic(perturb(path[c]), perturb(path[d]));
    if (!fellow_traveling(t, k1, path.sub(a, b), K) || !fellow_traveling(t, k2, path.sub(c, d), K)) continue;
    EXPECT_TRUE(check_alignment(t, {k1, k2}, 6 * K).aligned);
  }
}

TEST(Properties, ProjectionToOrbitSegmentSnapsWithinTranslation) {
  auto bs = build_bass_serre_tree();
  const auto& G = *bs.group;
  const NormalForm phi = G.normalize({1, 2});
  const auto seg = OrbitSegment::make(*bs.action, G.normalize({2, 1}), phi, 6);
  std::mt19937_64 rng(8);
  for (int i = 0; i < 500; ++i) {
    const NormalForm h = G.normalize(oracle::random_word(rng, 2, 12));
    const auto k = project_to_orbit(*bs.action, seg, h);
    const auto p = project(*bs.space, bs.action->orbit(h), seg.projected);
    EXPECT_LE(std::abs(seg.orbit_positions[k] - static_cast<std::int64_t>(p.first())), 1);
    (void)set_diameter;
  }
}

TEST(Properties, RerunsAreBitIdentical) {
  CayleyTree t(2);
  const auto path = t.geodesic({}, power(1, 12));
  const auto r1 = check_alignment(t, {path.sub(0, 3), path.sub(5, 8)}, 2).to_json(t).dump();
  const auto r2 = check_alignment(t, {path.sub(0, 3), path.sub(5, 8)}, 2).to_json(t).dump();
  EXPECT_EQ(r1, r2);
}
