#include "ncg/theta.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ncg;

namespace {

OperatorSubspace delta_space(int d) {
  CMatrix delta = -CMatrix::Identity(d, d);
  delta(0, 0) = d - 1;
  return span_of(delta);
}

void expect_value(const ThetaResult& r, double v, double tol = 1e-6) {
  ASSERT_EQ(r.status, SolveStatus::Optimal) << r.message;
  EXPECT_NEAR(r.value, v, tol) << r.message;
}

const ConeId kCones[] = {ConeId::PSD, ConeId::PPT, ConeId::PSD_AND_PPT};

}  // namespace

TEST(ThetaPerp, CompleteClassical) {
  for (int n = 2; n <= 4; ++n) expect_value(theta_perp(complete_classical(n)), n);
}

TEST(ThetaPerp, CompleteQuantum) { expect_value(theta_perp(complete_quantum(2)), 4.0); }

TEST(ThetaPerp, DeltaExample) { expect_value(theta_perp(delta_space(3)), 3.0); }

TEST(ThetaMinus, CompleteClassicalAllCones) {
  for (ConeId c : kCones) expect_value(theta_minus(complete_classical(3), c), 3.0);
}

TEST(ThetaMinus, CompleteQuantum) {
  for (ConeId c : kCones) expect_value(theta_minus(complete_quantum(2), c), 4.0);
}

TEST(ThetaMinus, DeltaPptCollapses) { expect_value(theta_minus(delta_space(3), ConeId::PPT), 1.0); }

TEST(ThetaPlus, CompleteClassicalAllCones) {
  for (ConeId c : kCones) expect_value(theta_plus(complete_classical(3), c), 3.0);
}

TEST(ThetaPlus, CompleteQuantumPsd) { expect_value(theta_plus(complete_quantum(2), ConeId::PSD), 4.0); }

TEST(ThetaPlus, CompleteQuantumPptIsInfinite) {
  for (ConeId c : {ConeId::PPT, ConeId::PSD_AND_PPT}) {
    ThetaResult r = theta_plus(complete_quantum(2), c);
    EXPECT_EQ(r.status, SolveStatus::Infeasible) << r.message;
    EXPECT_TRUE(r.is_infinite());
    EXPECT_TRUE(r.certificate_verified);
  }
}

TEST(Theta, RejectsLoops) {
  EXPECT_THROW(theta_perp(full_space(2)), std::invalid_argument);
  EXPECT_THROW(theta_minus(full_space(2), ConeId::PSD), std::invalid_argument);
  EXPECT_THROW(theta_plus(full_space(2), ConeId::PSD), std::invalid_argument);
}

TEST(CostRate, Examples) {
  LoopedGraph q2(complete_quantum(2), span_of(CMatrix::Identity(2, 2)));
  EXPECT_NEAR(cost_rate_bound(q2, complete_quantum(4)), 0.5, 1e-6);
  LoopedGraph k2(complete_classical(2), diagonal_space(2));
  EXPECT_NEAR(cost_rate_bound(k2, complete_classical(2)), 1.0, 1e-6);
  LoopedGraph k4(complete_classical(4), diagonal_space(4));
  EXPECT_NEAR(cost_rate_bound(k4, complete_quantum(2)), 1.0, 1e-6);
}

TEST(CostRate, Hypotheses) {
  LoopedGraph no_identity(complete_classical(2), span_of(matrix_unit(2, 0, 0)));
  EXPECT_THROW(cost_rate_bound(no_identity, complete_classical(2)), std::invalid_argument);
  LoopedGraph k2(complete_classical(2), diagonal_space(2));
  EXPECT_THROW(cost_rate_bound(k2, OperatorSubspace(2)), std::invalid_argument);
}
