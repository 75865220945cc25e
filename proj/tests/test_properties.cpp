// Structural properties of the theta family on seeded random instances.

#include "ncg/experiments.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace ncg;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

OperatorSubspace random_space(std::uint64_t seed, int d, int k) {
  auto rng = instance_rng(seed, static_cast<std::uint64_t>(d * 16 + k));
  return random_trace_free_subspace(d, k, rng);
}

CMatrix random_diagonal(std::mt19937_64& rng, int size, int rank) {
  std::uniform_real_distribution<double> u(0.2, 1.5);
  CMatrix m = CMatrix::Zero(size, size);
  for (int i = 0; i < rank; ++i) m(i, i) = u(rng);
  return m;
}

// Value on the extended real line; anything but Optimal or certified infinity fails.
double settled(const ThetaResult& r, const std::string& what) {
  if (r.status == SolveStatus::Infeasible && r.certificate_verified) return kInf;
  EXPECT_EQ(r.status, SolveStatus::Optimal) << what << ": " << r.message;
  EXPECT_GE(r.value, 1.0 - 1e-8) << what;
  if (!std::isnan(r.gap)) {
    EXPECT_LT(std::abs(r.gap), 1e-5 * std::max(1.0, std::abs(r.value))) << what;
  }
  return r.value;
}

void expect_le(double a, double b, const std::string& what) {
  if (std::isinf(b)) return;
  EXPECT_FALSE(std::isinf(a)) << what;
  EXPECT_LE(a, b + 1e-6) << what;
}

struct ChainCase {
  int d, k;
};

void PrintTo(const ChainCase& c, std::ostream* os) { *os << "d" << c.d << "k" << c.k; }

}  // namespace

class Chain : public ::testing::TestWithParam<ChainCase> {};

TEST_P(Chain, Ordering) {
  const auto [d, k] = GetParam();
  for (std::uint64_t seed : {1u, 2u}) {
    OperatorSubspace s = random_space(seed, d, k);
    const std::string tag = "d=" + std::to_string(d) + " k=" + std::to_string(k) + " seed=" + std::to_string(seed);
    double perp = settled(theta_perp(s), tag + " theta");
    double m_psd = settled(theta_minus(s, ConeId::PSD), tag + " minus psd");
    double m_ppt = settled(theta_minus(s, ConeId::PPT), tag + " minus ppt");
    double m_both = settled(theta_minus(s, ConeId::PSD_AND_PPT), tag + " minus psd-ppt");
    double p_psd = settled(theta_plus(s, ConeId::PSD), tag + " plus psd");
    double p_ppt = settled(theta_plus(s, ConeId::PPT), tag + " plus ppt");
    double p_both = settled(theta_plus(s, ConeId::PSD_AND_PPT), tag + " plus psd-ppt");
    expect_le(m_both, m_psd, tag + " minus psd-ppt <= minus psd");
    expect_le(m_both, m_ppt, tag + " minus psd-ppt <= minus ppt");
    expect_le(m_psd, perp, tag + " minus psd <= theta");
    expect_le(m_ppt, perp, tag + " minus ppt <= theta");
    expect_le(perp, p_psd, tag + " theta <= plus psd");
    expect_le(perp, p_ppt, tag + " theta <= plus ppt");
    expect_le(p_psd, p_both, tag + " plus psd <= plus psd-ppt");
    expect_le(p_ppt, p_both, tag + " plus ppt <= plus psd-ppt");
  }
}

INSTANTIATE_TEST_SUITE_P(RandomTraceFree, Chain,
                         ::testing::Values(ChainCase{2, 1}, ChainCase{2, 2}, ChainCase{2, 3}, ChainCase{3, 2},
                                           ChainCase{3, 4}, ChainCase{3, 6}),
                         [](const auto& info) {
                           return "d" + std::to_string(info.param.d) + "k" + std::to_string(info.param.k);
                         });

TEST(ThetaPerp, MonotoneUnderInclusion) {
  for (int d : {2, 3}) {
    OperatorSubspace t = random_space(5, d, d == 2 ? 3 : 5);
    for (int k = 1; k < t.dim(); ++k) {
      std::vector<CMatrix> first(t.basis().begin(), t.basis().begin() + k);
      OperatorSubspace s = orthonormalize(d, first);
      ASSERT_TRUE(is_subspace_of(s, t));
      EXPECT_LE(settled(theta_perp(s), "sub"), settled(theta_perp(t), "super") + 1e-6) << "d=" << d << " k=" << k;
    }
  }
}

TEST(ThetaPerp, DisjunctiveProductIsMultiplicative) {
  const std::vector<OperatorSubspace> spaces{random_space(7, 2, 1), random_space(7, 2, 2), complete_quantum(2),
                                             from_classical(complete_graph(2))};
  for (size_t i = 0; i < spaces.size(); ++i) {
    for (size_t j = i; j < spaces.size(); ++j) {
      double a = settled(theta_perp(spaces[i]), "factor"), b = settled(theta_perp(spaces[j]), "factor");
      double ab = settled(theta_perp(disjunctive_product(spaces[i], spaces[j])), "product");
      EXPECT_NEAR(ab / (a * b), 1.0, 1e-4) << i << " " << j;
    }
  }
}

TEST(ThetaPerp, StrongProductIsMultiplicativeWithIdentityLoops) {
  const OperatorSubspace loops = span_of(CMatrix::Identity(2, 2));
  LoopedGraph g(random_space(8, 2, 2), loops), h(random_space(9, 2, 1), loops);
  double a = settled(theta_perp(g.s), "g"), b = settled(theta_perp(h.s), "h");
  double ab = settled(theta_perp(strong_product(g, h).s), "g x h");
  EXPECT_NEAR(ab / (a * b), 1.0, 1e-4);
  double aa = settled(theta_perp(graph_power(g, 2).s), "g^2");
  EXPECT_NEAR(aa / (a * a), 1.0, 1e-4);
}

TEST(ThetaPerp, InvariantUnderTensorWithPositiveLambda) {
  std::mt19937_64 rng(11);
  for (int d : {2, 3}) {
    OperatorSubspace s = random_space(11, d, 2);
    double base = settled(theta_perp(s), "S");
    for (int m = 2; d * m <= 6; ++m) {
      CMatrix lambda = random_diagonal(rng, m, m);
      double v = settled(theta_perp(tensor_space(s, span_of(lambda))), "S (x) Lambda");
      EXPECT_NEAR(v, base, 1e-5 * base) << "d=" << d << " m=" << m;
    }
  }
}

TEST(ThetaMinus, LambdaScaling) {
  std::mt19937_64 rng(13);
  for (int d : {2, 3}) {
    OperatorSubspace s = random_space(13, d, d == 2 ? 3 : 4);
    double base = settled(theta_minus(s, ConeId::PSD), "S");
    ASSERT_GT(base, 1.0 + 1e-3);
    for (int rank : {1, 2, 3}) {
      CMatrix lambda = random_diagonal(rng, 3, rank);
      Eigen::VectorXd ev = lambda.real().diagonal();
      const double ratio = ev.maxCoeff() * ev.sum() / ev.squaredNorm();
      double v = settled(theta_minus(tensor_space(s, span_of(lambda)), ConeId::PSD), "S (x) Lambda");
      EXPECT_NEAR((base - 1.0) / (v - 1.0), ratio, 1e-4 * ratio) << "d=" << d << " rank=" << rank;
    }
    double id = settled(theta_minus(tensor_space(s, span_of(CMatrix::Identity(2, 2))), ConeId::PSD), "S (x) I");
    EXPECT_NEAR(id, base, 1e-5 * base);
  }
}

TEST(ThetaMinus, PptCollapsesUnderRankTwoLambda) {
  std::mt19937_64 rng(17);
  for (int d : {2, 3}) {
    for (int k : {1, 2}) {
      OperatorSubspace s = random_space(17, d, k);
      CMatrix lambda = random_diagonal(rng, 2, 2);
      EXPECT_NEAR(settled(theta_minus(tensor_space(s, span_of(lambda)), ConeId::PPT), "collapse"), 1.0, 1e-6)
          << "d=" << d << " k=" << k;
    }
  }
}

TEST(ThetaPlus, Locc1SubspaceIsInfiniteOverPpt) {
  OperatorSubspace s = discrete_source_graph(locc1_source(std::polar(1.0, 0.7), std::polar(1.0, 1.9))).s;
  ThetaResult r = theta_plus(s, ConeId::PPT);
  EXPECT_EQ(r.status, SolveStatus::Infeasible) << r.message;
  EXPECT_TRUE(r.certificate_verified);
  EXPECT_TRUE(r.is_infinite());
}

// Instance 17 of the seed-1 survey, frozen. The theta-plus PPT program is feasible but
// has no strictly feasible point; an external solver gives 3.000000000 with the same program.
TEST(ThetaPlus, WeaklyFeasiblePptInstanceIsFinite) {
  OperatorSubspace s = load_graph_file(NCG_DATA_DIR "/weakly_feasible_ppt.json").s;
  ThetaResult r = theta_plus(s, ConeId::PPT);
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_NEAR(r.value, 3.0, 1e-6);
  EXPECT_GE(r.facial_reduction_steps, 1);
  EXPECT_GE(r.value + 1e-6, settled(theta_perp(s), "theta"));
}
