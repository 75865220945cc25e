#pragma once

// Generalised Lovasz numbers of non-commutative graphs:
//   theta_perp   max ||I + X||, X in S (x) L(A'), I + X >= 0
//   theta_minus  Schrijver-type value with rot(T) in a cone C (primal side)
//   theta_plus   Szegedy-type value with rot(Y) in a cone C (dual side)
// The ancilla A' has the same dimension as A; Phi = sum_i |ii> is unnormalised.

#include "ncg/conic.hpp"
#include "ncg/ncgraph.hpp"

#include <limits>
#include <string>

namespace ncg {

enum class ConeId { PSD, PPT, PSD_AND_PPT };

const char* to_string(ConeId c);
/// Accepts "psd", "ppt", "psd-ppt" (also "psd_and_ppt").
ConeId parse_cone(const std::string& s);

struct ThetaWitness {
  /// Max-form solution: density operator on A' and T.
  CMatrix rho;
  CMatrix t;
  /// Min-form solution: Y and lambda = ||Tr_A Y||.
  CMatrix y;
  double lambda = std::numeric_limits<double>::quiet_NaN();
};

struct ThetaResult {
  /// +inf when the minimisation is infeasible.
  double value = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::Unknown;
  double primal_value = std::numeric_limits<double>::quiet_NaN();  ///< max form
  double dual_value = std::numeric_limits<double>::quiet_NaN();    ///< min form
  double gap = std::numeric_limits<double>::quiet_NaN();
  bool certificate_verified = false;
  int iterations = 0;
  int facial_reduction_steps = 0;
  std::string message;
  ThetaWitness witness;

  bool is_infinite() const { return value == std::numeric_limits<double>::infinity(); }
};

/// Solves both forms and reports the min-form value; gap is their difference.
ThetaResult theta_perp(const OperatorSubspace& s, const SolverOptions& opt = SolverOptions::from_env());
ThetaResult theta_minus(const OperatorSubspace& s, ConeId cone, const SolverOptions& opt = SolverOptions::from_env());
ThetaResult theta_plus(const OperatorSubspace& s, ConeId cone, const SolverOptions& opt = SolverOptions::from_env());

/// The programs themselves, for inspection and JSON dumps.
ConicProgram theta_perp_max_program(const OperatorSubspace& s);
ConicProgram theta_perp_min_program(const OperatorSubspace& s);
ConicProgram theta_minus_program(const OperatorSubspace& s, ConeId cone);
ConicProgram theta_plus_program(const OperatorSubspace& s, ConeId cone);

/// log theta_perp(S.s) / log theta_perp(T). Requires I in S.s0 and theta_perp(T) > 1.
double cost_rate_bound(const LoopedGraph& s, const OperatorSubspace& t,
                       const SolverOptions& opt = SolverOptions::from_env());

}  // namespace ncg
