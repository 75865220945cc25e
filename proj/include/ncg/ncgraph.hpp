#pragma once

// Non-commutative graphs built from classical graphs, channels and sources,
// together with the disjunctive and strong products.

#include "ncg/operator_core.hpp"

#include <utility>
#include <vector>

namespace ncg {

/// Simple undirected loop-free graph on vertices 0..n-1.
class ClassicalGraph {
 public:
  explicit ClassicalGraph(int n = 0);

  int n() const { return n_; }
  bool has_edge(int x, int y) const;
  void add_edge(int x, int y);
  void remove_edge(int x, int y);
  int edge_count() const;
  /// Edges (x, y) with x < y in lexicographic order.
  std::vector<std::pair<int, int>> edges() const;
  bool operator==(const ClassicalGraph& other) const = default;

 private:
  void check_pair(int x, int y) const;
  int n_;
  std::vector<char> adj_;
};

ClassicalGraph complete_graph(int n);
/// Classical strong product: distinct pairs adjacent or equal in each coordinate.
ClassicalGraph strong_product(const ClassicalGraph& g, const ClassicalGraph& h);

/// Quantum channel given by Kraus operators N_i : C^dim_in -> C^dim_out.
class QuantumChannel {
 public:
  /// Validates sum_i N_i^dagger N_i = I to within tol.
  explicit QuantumChannel(std::vector<CMatrix> kraus, double tol = 1e-9);

  int dim_in() const { return dim_in_; }
  int dim_out() const { return dim_out_; }
  const std::vector<CMatrix>& kraus() const { return kraus_; }

 private:
  int dim_in_;
  int dim_out_;
  std::vector<CMatrix> kraus_;
};

/// Lift of a classical channel with column-stochastic matrix p(v, s) = N(v|s),
/// Kraus operators sqrt(N(v|s)) |v><s|.
QuantumChannel classical_channel(const RMatrix& p);

/// A non-commutative graph s together with its generalised loops s0. Sources
/// with non-orthogonal states produce an s that is not trace-free, so that is
/// not enforced here.
struct LoopedGraph {
  LoopedGraph(OperatorSubspace s, OperatorSubspace s0);
  OperatorSubspace s;
  OperatorSubspace s0;
};

/// Pure states |psi_i> on A (x) B (x) C; index (a, b, c) maps to (a * dim_b + b) * dim_c + c.
struct DiscreteSource {
  DiscreteSource(int dim_a, int dim_b, int dim_c, std::vector<CVector> states);
  int dim_a;
  int dim_b;
  int dim_c;
  std::vector<CVector> states;
};

/// P(x, u | i) for a classical source with side information: p[i](x, u).
using SourceDistribution = std::vector<RMatrix>;

/// Purifies the diagonal states rho_i = sum P(x,u|i) |x><x| (x) |u><u| with C indexed by (x, u).
DiscreteSource classical_source(const SourceDistribution& p);

/// Purifies mixed states rho_i on A (x) B by eigendecomposition; C has the
/// largest rank among the rho_i and shorter purifications are zero padded.
DiscreteSource purify(int dim_a, int dim_b, const std::vector<CMatrix>& rhos);

// --- Graph constructions -------------------------------------------------------

/// K_n = span{|x><y| : x != y}.
OperatorSubspace complete_classical(int n);
/// Q_n = (C I)^perp.
OperatorSubspace complete_quantum(int n);
/// span{|x><y| : x ~ y}.
OperatorSubspace from_classical(const ClassicalGraph& g);

struct ChannelGraphs {
  OperatorSubspace confusability;
  OperatorSubspace distinguishability;
};
ChannelGraphs channel_graphs(const QuantumChannel& channel);

LoopedGraph discrete_source_graph(const DiscreteSource& src);

/// j is an isometry from C^r into A (x) B (x) C (shape dim_a*dim_b*dim_c x r).
LoopedGraph coherent_source_graph(const CMatrix& j, int dim_a, int dim_b, int dim_c);

/// Two-input source whose characteristic graph is s.
DiscreteSource source_from_graph(const OperatorSubspace& s);

// --- Products -------------------------------------------------------------------

/// S (x) L(B) + L(A) (x) T, which equals (S^perp (x) T^perp)^perp.
OperatorSubspace disjunctive_product(const OperatorSubspace& s, const OperatorSubspace& t);
/// The same product computed directly as (S^perp (x) T^perp)^perp.
OperatorSubspace disjunctive_product_via_perp(const OperatorSubspace& s, const OperatorSubspace& t);

LoopedGraph strong_product(const LoopedGraph& g, const LoopedGraph& h);
/// g strong-multiplied with itself m >= 1 times.
LoopedGraph graph_power(const LoopedGraph& g, int m);

/// (S + C I)^perp for trace-free S.
OperatorSubspace proposed_complement(const OperatorSubspace& s);

/// Span of the diagonal matrix units, the loops of a classical graph.
OperatorSubspace diagonal_space(int n);

}  // namespace ncg
