#include "ncg/classical.hpp"
#include "ncg/theta.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ncg;

namespace {

ClassicalGraph cycle(int n) {
  ClassicalGraph g(n);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

ClassicalGraph random_graph(std::mt19937& rng, int n, double p = 0.5) {
  std::bernoulli_distribution coin(p);
  ClassicalGraph g(n);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      if (coin(rng)) g.add_edge(x, y);
  return g;
}

}  // namespace

TEST(Graph6, SmallFixtures) {
  ClassicalGraph one = parse_graph6("@");
  EXPECT_EQ(one.n(), 1);
  EXPECT_EQ(one.edge_count(), 0);
  ClassicalGraph k2 = parse_graph6("A_");
  EXPECT_EQ(k2.n(), 2);
  EXPECT_TRUE(k2.has_edge(0, 1));
}

TEST(Graph6, EightVertexDecodingFrozen) {
  ClassicalGraph g = parse_graph6("GRddY{");
  ASSERT_EQ(g.n(), 8);
  std::vector<std::pair<int, int>> expected = {{0, 2}, {0, 4}, {0, 6}, {1, 3}, {1, 5}, {1, 7}, {2, 3}, {2, 5},
                                               {2, 6}, {3, 4}, {3, 7}, {4, 6}, {4, 7}, {5, 6}, {5, 7}, {6, 7}};
  EXPECT_EQ(g.edges(), expected);
}

TEST(Graph6, Errors) {
  EXPECT_THROW(parse_graph6(""), std::invalid_argument);
  EXPECT_THROW(parse_graph6("A"), std::invalid_argument);          // truncated
  EXPECT_THROW(parse_graph6("A_?"), std::invalid_argument);        // trailing
  EXPECT_THROW(parse_graph6(std::string("A\x01")), std::invalid_argument);
  EXPECT_THROW(parse_graph6("~"), std::invalid_argument);          // header cut short
}

TEST(Graph6, RoundTrip) {
  std::mt19937 rng(11);
  for (int n : {0, 1, 2, 5, 8, 13, 30, 63, 70}) {
    ClassicalGraph g = random_graph(rng, n);
    EXPECT_EQ(parse_graph6(encode_graph6(g)), g) << n;
  }
  EXPECT_EQ(encode_graph6(parse_graph6("GRddY{")), "GRddY{");
}

TEST(BruteForce, Examples) {
  EXPECT_EQ(clique_number(complete_graph(5)), 5);
  EXPECT_EQ(chromatic_number(complete_graph(5)), 5);
  EXPECT_EQ(clique_number(cycle(5)), 2);
  EXPECT_EQ(chromatic_number(cycle(5)), 3);
  EXPECT_EQ(clique_number(ClassicalGraph(4)), 1);
  EXPECT_EQ(chromatic_number(ClassicalGraph(4)), 1);
  EXPECT_THROW(clique_number(ClassicalGraph(13)), std::invalid_argument);
}

TEST(ClassicalTheta, EdgelessIsOne) {
  for (int n : {1, 3, 4})
    for (auto v : {ThetaVariant::LOVASZ, ThetaVariant::SCHRIJVER, ThetaVariant::SZEGEDY}) {
      auto r = classical_theta(ClassicalGraph(n), v);
      ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
      EXPECT_NEAR(r.value, 1.0, 1e-7);
    }
}

TEST(ClassicalTheta, CompleteGraph) {
  for (int n = 2; n <= 5; ++n) {
    // B = J/n is feasible for every variant with value n.
    RMatrix b = RMatrix::Constant(n, n, 1.0 / n);
    EXPECT_NEAR(b.sum(), n, 1e-12);
    for (auto v : {ThetaVariant::LOVASZ, ThetaVariant::SCHRIJVER, ThetaVariant::SZEGEDY}) {
      auto r = classical_theta(complete_graph(n), v);
      ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
      EXPECT_NEAR(r.value, n, 1e-6);
    }
  }
}

TEST(ClassicalTheta, Pentagon) {
  auto r = classical_theta(cycle(5), ThetaVariant::LOVASZ);
  EXPECT_NEAR(r.value, std::sqrt(5.0), 1e-6);
}

TEST(ClassicalTheta, EightVertexGraphSeparatesVariants) {
  auto t = classical_theta_all(parse_graph6("GRddY{"));
  EXPECT_NEAR(t.schrijver.value, 3.236, 5e-3);
  EXPECT_NEAR(t.lovasz.value, 3.302, 5e-3);
  EXPECT_NEAR(t.szegedy.value, 3.338, 5e-3);
}

TEST(ClassicalTheta, SandwichOnRandomGraphs) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    int n = 2 + trial % 6;
    ClassicalGraph g = random_graph(rng, n);
    auto t = classical_theta_all(g);
    ASSERT_EQ(t.szegedy.status, SolveStatus::Optimal) << encode_graph6(g);
    ASSERT_EQ(t.schrijver.status, SolveStatus::Optimal) << t.schrijver.message;
    ASSERT_EQ(t.lovasz.status, SolveStatus::Optimal) << t.lovasz.message;
    ASSERT_EQ(t.szegedy.status, SolveStatus::Optimal) << t.szegedy.message;
    EXPECT_LE(clique_number(g), t.schrijver.value + 1e-6);
    EXPECT_LE(t.schrijver.value, t.lovasz.value + 1e-6);
    EXPECT_LE(t.lovasz.value, t.szegedy.value + 1e-6);
    EXPECT_LE(t.szegedy.value, chromatic_number(g) + 1e-6);
  }
}

TEST(CharGraph, Examples) {
  const int n = 4;
  SourceDistribution no_side(n, RMatrix::Zero(n, 1));
  for (int i = 0; i < n; ++i) no_side[i](i, 0) = 1.0;
  auto a = classical_char_graph(no_side);
  EXPECT_EQ(a.graph, complete_graph(n));
  EXPECT_FALSE(a.has_loops());

  SourceDistribution perfect(n, RMatrix::Zero(n, n));
  for (int i = 0; i < n; ++i) perfect[i](i, i) = 1.0;
  EXPECT_EQ(classical_char_graph(perfect).graph.edge_count(), 0);

  // Two inputs that can emit the same symbol with the same side information.
  SourceDistribution looped(2, RMatrix::Constant(2, 1, 0.5));
  EXPECT_TRUE(classical_char_graph(looped).has_loops());
}

TEST(CharGraph, AgreesWithOperatorConstruction) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    // 3 inputs, 3 symbols, 2 side-information values, with zeros to make edges sparse.
    SourceDistribution p(3, RMatrix::Zero(3, 2));
    for (int i = 0; i < 3; ++i) {
      p[i](i, 0) = 1.0 + unif(rng);
      for (int x = 0; x < 3; ++x)
        for (int u = 0; u < 2; ++u)
          if (unif(rng) < 0.3) p[i](x, u) += unif(rng);
      p[i] /= p[i].sum();
    }
    auto cg = classical_char_graph(p);
    if (cg.has_loops()) continue;
    LoopedGraph lg = discrete_source_graph(classical_source(p));
    // The operator graph lives on A = symbols; compare against the classical one.
    EXPECT_LT(projector_distance(lg.s, from_classical(cg.graph)), 1e-8);
  }
}

TEST(ClassicalReduction, ThetaPerpMatchesLovasz) {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    ClassicalGraph g = random_graph(rng, 3 + trial % 3);
    auto c = classical_theta(g, ThetaVariant::LOVASZ);
    auto q = theta_perp(from_classical(g));
    ASSERT_EQ(q.status, SolveStatus::Optimal) << q.message;
    EXPECT_NEAR(q.value, c.value, 1e-5);
  }
}

TEST(ClassicalReduction, ConesMatchSchrijverAndSzegedy) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    ClassicalGraph g = random_graph(rng, 3 + trial % 2);
    auto t = classical_theta_all(g);
    OperatorSubspace s = from_classical(g);
    for (ConeId c : {ConeId::PSD, ConeId::PPT, ConeId::PSD_AND_PPT}) {
      auto m = theta_minus(s, c);
      auto p = theta_plus(s, c);
      ASSERT_EQ(m.status, SolveStatus::Optimal) << m.message;
      ASSERT_EQ(p.status, SolveStatus::Optimal) << p.message;
      EXPECT_NEAR(m.value, t.schrijver.value, 1e-5) << to_string(c);
      EXPECT_NEAR(p.value, t.szegedy.value, 1e-5) << to_string(c);
    }
  }
}
