#include "ncg/experiments.hpp"

#include <gtest/gtest.h>

using namespace ncg;

namespace {

void expect_all_checks_pass(const ExperimentReport& rep) {
  for (const auto& e : rep.entries) {
    if (!e.checked) continue;
    EXPECT_TRUE(e.passed) << rep.name << ": " << e.label << " " << e.quantity << " " << e.cone << " value " << e.value
                          << " expected " << e.expected;
  }
  EXPECT_TRUE(rep.passed());
}

}  // namespace

TEST(Sampler, TraceFreeHermitianOfRequestedDimension) {
  for (int d = 2; d <= 4; ++d) {
    for (int k : {1, d, d * d - 1}) {
      auto rng = instance_rng(7, static_cast<std::uint64_t>(d * 100 + k));
      OperatorSubspace s = random_trace_free_subspace(d, k, rng);
      EXPECT_EQ(s.dim(), k);
      EXPECT_EQ(s.ambient_dim(), d);
      EXPECT_TRUE(s.is_trace_free());
      for (const auto& h : s.basis()) EXPECT_LT((h.matrix() - h.matrix().adjoint()).norm(), 1e-12);
    }
  }
}

TEST(Sampler, Deterministic) {
  auto r1 = instance_rng(42, 3), r2 = instance_rng(42, 3), r3 = instance_rng(42, 4);
  OperatorSubspace a = random_trace_free_subspace(3, 4, r1);
  OperatorSubspace b = random_trace_free_subspace(3, 4, r2);
  OperatorSubspace c = random_trace_free_subspace(3, 4, r3);
  EXPECT_LT(projector_distance(a, b), 1e-14);
  EXPECT_GT(projector_distance(a, c), 1e-3);
}

TEST(Sampler, RejectsBadDimensions) {
  auto rng = instance_rng(1, 0);
  EXPECT_THROW(random_trace_free_subspace(2, 4, rng), std::invalid_argument);
  EXPECT_THROW(random_trace_free_subspace(2, 0, rng), std::invalid_argument);
  EXPECT_THROW(random_trace_free_subspace(1, 1, rng), std::invalid_argument);
}

TEST(Sampler, FullTraceFreeSpaceInDimensionTwoIsQ2) {
  for (std::uint64_t i = 0; i < 5; ++i) {
    auto rng = instance_rng(9, i);
    EXPECT_LT(projector_distance(random_trace_free_subspace(2, 3, rng), complete_quantum(2)), 1e-8);
  }
}

TEST(Experiments, CompleteGraphTable) {
  ExperimentReport rep = run_complete_graph_table(2);
  EXPECT_EQ(rep.entries.size(), 14u);
  expect_all_checks_pass(rep);
  EXPECT_THROW(run_complete_graph_table(5), std::invalid_argument);
}

TEST(Experiments, Delta) {
  for (int d : {2, 3}) expect_all_checks_pass(run_delta_example(d));
  EXPECT_THROW(run_delta_example(6), std::invalid_argument);
}

TEST(Experiments, NonMaximalChannelDirect) {
  ExperimentReport rep = run_nonmaximal_channel(2, 3, true);
  expect_all_checks_pass(rep);
  EXPECT_NEAR(rep.aggregates["c"].get<double>(), 1.0 / (std::sqrt(3.0) - 1.0), 1e-12);
  EXPECT_NEAR(rep.aggregates["predicted_theta_minus_psd"].get<double>(), 3.196152, 1e-6);
}

TEST(Experiments, NonMaximalChannelAnalytic) {
  ExperimentReport rep = run_nonmaximal_channel(2, 26, false);
  expect_all_checks_pass(rep);
  EXPECT_NEAR(rep.aggregates["c"].get<double>(), 3.0495, 1e-4);
  EXPECT_NEAR(rep.aggregates["predicted_theta_minus_psd"].get<double>(), 1.98376, 1e-5);
  EXPECT_TRUE(rep.aggregates["below_two"].get<bool>());
  EXPECT_FALSE(rep.notes.empty());
  EXPECT_THROW(run_nonmaximal_channel(2, 26, true), std::invalid_argument);
  EXPECT_THROW(run_nonmaximal_channel(3, 3, true), std::invalid_argument);
}

TEST(Experiments, Locc1) {
  ExperimentReport rep = run_locc1_example();
  expect_all_checks_pass(rep);
  Json j = rep.to_json();
  EXPECT_EQ(j["entries"][0]["value"], "inf");
  EXPECT_EQ(j["entries"][0]["status"], "INFEASIBLE");
  EXPECT_EQ(j["entries"][2]["source"], "closed-form");
}

TEST(Experiments, Locc1GraphNeedsGeneralPhases) {
  // With omega = gamma = 1 the graph picks up extra structure.
  const OperatorSubspace target = tensor_space(orthonormalize(2, {CMatrix::Identity(2, 2), pauli_z()}),
                                               complete_quantum(2));
  LoopedGraph general = discrete_source_graph(locc1_source(std::polar(1.0, 0.7), std::polar(1.0, 1.9)));
  EXPECT_LT(projector_distance(general.s, target), 1e-8);
  LoopedGraph special = discrete_source_graph(locc1_source(1.0, 1.0));
  EXPECT_GT(projector_distance(special.s, target), 1e-3);
}

TEST(Experiments, SurveyIsIndependentOfJobs) {
  ExperimentReport a = run_random_survey(3, 4, 6, 5, 1);
  ExperimentReport b = run_random_survey(3, 4, 6, 5, 3);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (size_t i = 0; i < a.entries.size(); ++i) {
    EXPECT_EQ(a.entries[i].label, b.entries[i].label);
    EXPECT_EQ(a.entries[i].status, b.entries[i].status);
    if (std::isfinite(a.entries[i].value)) {
      EXPECT_NEAR(a.entries[i].value, b.entries[i].value, 1e-7);
    }
  }
  EXPECT_EQ(a.aggregates, b.aggregates);
}

TEST(Experiments, SurveyForcedQ2) {
  ExperimentReport rep = run_random_survey(2, 3, 4, 11, 1);
  EXPECT_LT(rep.aggregates["max_projector_distance_to_Q_2"].get<double>(), 1e-8);
  EXPECT_EQ(rep.aggregates["theta_plus_ppt_infinite"].get<int>(), 4);
}

TEST(Experiments, SurveyRejectsBadParameters) {
  EXPECT_THROW(run_random_survey(5, 4, 10, 1), std::invalid_argument);
  EXPECT_THROW(run_random_survey(3, 9, 10, 1), std::invalid_argument);
  EXPECT_THROW(run_random_survey(3, 4, 10001, 1), std::invalid_argument);
}

TEST(Report, JsonShape) {
  ExperimentReport rep = run_delta_example(2);
  Json j = rep.to_json();
  EXPECT_EQ(j["experiment"], "delta");
  EXPECT_EQ(j["parameters"]["d"], 2);
  EXPECT_EQ(j["status_histogram"]["OPTIMAL"], 2);
  EXPECT_TRUE(j["passed"].get<bool>());
  for (const auto& e : j["entries"]) {
    EXPECT_TRUE(e.contains("runtime_ms"));
    EXPECT_TRUE(e.contains("expected"));
  }
}
