#pragma once

// Canned experiments and the random subspace sampler behind the CLI.
// Every reported number comes from a solve or from a closed-form evaluation,
// and each entry says which.

#include "ncg/io.hpp"
#include "ncg/theta.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace ncg {

/// Trace-free dagger-closed subspace of L(C^d) of dimension k, 1 <= k <= d^2 - 1:
/// k complex Gaussian matrices, hermitianized, made trace-free, orthonormalized;
/// redrawn on rank deficiency.
OperatorSubspace random_trace_free_subspace(int d, int k, std::mt19937_64& rng);

/// Deterministic per-instance generator, independent of evaluation order.
std::mt19937_64 instance_rng(std::uint64_t seed, std::uint64_t index);

enum class Source { Solve, ClosedForm };

struct ReportEntry {
  std::string label;     ///< instance, e.g. "Q_2"
  std::string quantity;  ///< theta, theta-minus, theta-plus, or a named closed form
  std::string cone;      ///< empty when not applicable
  Source source = Source::Solve;
  double value = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::Unknown;  ///< Optimal for closed forms
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool certificate_verified = false;
  double runtime_ms = 0.0;
  /// Optional check against an expected value.
  bool checked = false;
  double expected = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  bool passed = true;
  std::string note;
};

struct ExperimentReport {
  std::string name;
  Json parameters = Json::object();
  std::vector<ReportEntry> entries;
  Json aggregates = Json::object();
  std::vector<std::string> notes;
  double wall_ms = 0.0;

  std::map<std::string, int> status_histogram() const;
  /// All checks passed.
  bool passed() const;
  Json to_json() const;
};

ReportEntry entry_from(const std::string& label, const std::string& quantity, ConeId* cone, const ThetaResult& r,
                       double runtime_ms);
/// Records the comparison; infinite expected values match INFEASIBLE with a verified certificate.
void check(ReportEntry& e, double expected, double tolerance);

/// theta_perp, theta_minus and theta_plus over all cones for K_n and Q_n, n = 2..n_max (n_max <= 4).
ExperimentReport run_complete_graph_table(int n_max, const SolverOptions& opt = SolverOptions::from_env());

/// theta_perp and theta_minus_PPT of span{diag(d-1, -1, ..., -1)}, 2 <= d <= 5.
ExperimentReport run_delta_example(int d, const SolverOptions& opt = SolverOptions::from_env());

/// Lambda = diag(1, alpha, ..., alpha) on C^m with alpha = (sqrt m - 1)/(m - 1), and
/// T = Q_n (x) C Lambda. Direct mode (m <= 4) solves theta_minus_PSD(T); otherwise the
/// scaling identity is evaluated from a direct solve of theta_minus_PSD(Q_n). n = 2 only.
ExperimentReport run_nonmaximal_channel(int n, int m, bool direct, const SolverOptions& opt = SolverOptions::from_env());

/// theta_minus_PPT and theta_plus_PPT of random trace-free subspaces. jobs <= 0 uses the hardware concurrency.
ExperimentReport run_random_survey(int dim, int subspace_dim, int count, std::uint64_t seed, int jobs = 1,
                                   const SolverOptions& opt = SolverOptions::from_env());

/// span{I, Z} (x) Q_2: theta_plus_PPT, theta_perp, and the characteristic graph of the
/// three-state source with phases omega = e^{0.7i}, gamma = e^{1.9i}.
ExperimentReport run_locc1_example(const SolverOptions& opt = SolverOptions::from_env());

/// The three states as a source on A = A1 A2, B = B1 B2.
DiscreteSource locc1_source(Complex omega, Complex gamma);

}  // namespace ncg
