#pragma once

// Classical graphs: graph6 I/O, the theta-bar family of SDPs, brute-force
// clique and chromatic numbers, and characteristic graphs of sources.

#include "ncg/conic.hpp"
#include "ncg/ncgraph.hpp"

#include <limits>
#include <string>

namespace ncg {

/// Throws std::invalid_argument on malformed input.
ClassicalGraph parse_graph6(const std::string& s);
std::string encode_graph6(const ClassicalGraph& g);

enum class ThetaVariant { LOVASZ, SCHRIJVER, SZEGEDY };
const char* to_string(ThetaVariant v);

struct ClassicalThetaResult {
  double value = std::numeric_limits<double>::quiet_NaN();
  ThetaVariant variant = ThetaVariant::LOVASZ;
  SolveStatus status = SolveStatus::Unknown;
  double primal_value = std::numeric_limits<double>::quiet_NaN();  ///< max form over B
  double dual_value = std::numeric_limits<double>::quiet_NaN();    ///< min form over Z
  double gap = std::numeric_limits<double>::quiet_NaN();
  RMatrix b;  ///< optimal B of the max form
  RMatrix z;  ///< optimal Z of the min form
  std::string message;
};

/// theta-bar of G, in the convention where the complete graph K_n gives n:
///   LOVASZ     max <B, J>, B >= 0, Tr B = 1, B supported on edges and diagonal
///   SCHRIJVER  additionally B entrywise nonnegative
///   SZEGEDY    B may also be negative off the edges
/// Both the max form and the min form are solved; value is the min form.
ClassicalThetaResult classical_theta(const ClassicalGraph& g, ThetaVariant variant,
                                     const SolverOptions& opt = SolverOptions::from_env());

struct ClassicalThetaTriple {
  ClassicalThetaResult schrijver, lovasz, szegedy;
};
/// All three variants; throws std::logic_error if Schrijver <= Lovasz <= Szegedy fails by more than 1e-6.
ClassicalThetaTriple classical_theta_all(const ClassicalGraph& g, const SolverOptions& opt = SolverOptions::from_env());

/// Exact by exhaustive search; n <= 12.
int clique_number(const ClassicalGraph& g);
int chromatic_number(const ClassicalGraph& g);

struct CharacteristicGraph {
  ClassicalGraph graph;
  /// Symbols x with x ~ x; a source with loops admits no zero-error code.
  std::vector<int> loops;
  bool has_loops() const { return !loops.empty(); }
};

/// x ~ y iff P(x,u|i) P(y,u|j) != 0 for some u and some i != j.
CharacteristicGraph classical_char_graph(const SourceDistribution& p, double tol = 0.0);

}  // namespace ncg
