#include "ncg/ncgraph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ncg {

namespace {

// Partial dyad operators M_{i,l} of a source, with (M_{i,l})_{ab} = psi_i[a, b, l].
std::vector<std::vector<CMatrix>> slices(const std::vector<CVector>& states, int da, int db, int dc) {
  std::vector<std::vector<CMatrix>> out(states.size(), std::vector<CMatrix>(dc, CMatrix(da, db)));
  for (size_t i = 0; i < states.size(); ++i) {
    for (int a = 0; a < da; ++a)
      for (int b = 0; b < db; ++b)
        for (int c = 0; c < dc; ++c) out[i][c](a, b) = states[i]((a * db + b) * dc + c);
  }
  return out;
}

// All operators M_{i,l} M_{j,l'}^dagger over the given (i, j) pairs and every l, l'.
std::vector<CMatrix> dyad_traces(const std::vector<std::vector<CMatrix>>& m,
                                 const std::vector<std::pair<int, int>>& pairs) {
  std::vector<CMatrix> out;
  for (auto [i, j] : pairs) {
    for (const auto& mi : m[i])
      for (const auto& mj : m[j]) out.push_back(mi * mj.adjoint());
  }
  return out;
}

}  // namespace

// --- ClassicalGraph ------------------------------------------------------------

ClassicalGraph::ClassicalGraph(int n) : n_(n), adj_(static_cast<size_t>(n) * n, 0) {
  if (n < 0) throw std::invalid_argument("ClassicalGraph: negative vertex count");
}

void ClassicalGraph::check_pair(int x, int y) const {
  if (x < 0 || y < 0 || x >= n_ || y >= n_) throw std::out_of_range("ClassicalGraph: vertex out of range");
}

bool ClassicalGraph::has_edge(int x, int y) const {
  check_pair(x, y);
  return adj_[static_cast<size_t>(x) * n_ + y] != 0;
}

void ClassicalGraph::add_edge(int x, int y) {
  check_pair(x, y);
  if (x == y) throw std::invalid_argument("ClassicalGraph: self-loops are not allowed");
  adj_[static_cast<size_t>(x) * n_ + y] = adj_[static_cast<size_t>(y) * n_ + x] = 1;
}

void ClassicalGraph::remove_edge(int x, int y) {
  check_pair(x, y);
  adj_[static_cast<size_t>(x) * n_ + y] = adj_[static_cast<size_t>(y) * n_ + x] = 0;
}

int ClassicalGraph::edge_count() const {
  return static_cast<int>(std::count(adj_.begin(), adj_.end(), 1)) / 2;
}

std::vector<std::pair<int, int>> ClassicalGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < n_; ++x)
    for (int y = x + 1; y < n_; ++y)
      if (has_edge(x, y)) out.emplace_back(x, y);
  return out;
}

ClassicalGraph complete_graph(int n) {
  ClassicalGraph g(n);
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) g.add_edge(x, y);
  return g;
}

ClassicalGraph strong_product(const ClassicalGraph& g, const ClassicalGraph& h) {
  const int m = h.n();
  ClassicalGraph out(g.n() * m);
  for (int x = 0; x < g.n(); ++x)
    for (int y = 0; y < g.n(); ++y)
      for (int xp = 0; xp < m; ++xp)
        for (int yp = 0; yp < m; ++yp) {
          if (x == y && xp == yp) continue;
          bool first = x == y || g.has_edge(x, y);
          bool second = xp == yp || h.has_edge(xp, yp);
          if (first && second) out.add_edge(x * m + xp, y * m + yp);
        }
  return out;
}

// --- Channels and sources ------------------------------------------------------------

QuantumChannel::QuantumChannel(std::vector<CMatrix> kraus, double tol) : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw std::invalid_argument("QuantumChannel: no Kraus operators");
  dim_out_ = static_cast<int>(kraus_.front().rows());
  dim_in_ = static_cast<int>(kraus_.front().cols());
  CMatrix sum = CMatrix::Zero(dim_in_, dim_in_);
  for (const auto& k : kraus_) {
    if (k.rows() != dim_out_ || k.cols() != dim_in_) throw DimensionError("QuantumChannel: Kraus shape mismatch");
    sum += k.adjoint() * k;
  }
  if ((sum - CMatrix::Identity(dim_in_, dim_in_)).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument("QuantumChannel: Kraus operators are not trace preserving");
  }
}

QuantumChannel classical_channel(const RMatrix& p) {
  std::vector<CMatrix> kraus;
  for (int s = 0; s < p.cols(); ++s)
    for (int v = 0; v < p.rows(); ++v) {
      if (p(v, s) < 0) throw std::invalid_argument("classical_channel: negative probability");
      if (p(v, s) == 0) continue;
      CMatrix k = CMatrix::Zero(p.rows(), p.cols());
      k(v, s) = std::sqrt(p(v, s));
      kraus.push_back(k);
    }
  return QuantumChannel(std::move(kraus));
}

LoopedGraph::LoopedGraph(OperatorSubspace s_, OperatorSubspace s0_) : s(std::move(s_)), s0(std::move(s0_)) {
  if (s.ambient_dim() != s0.ambient_dim()) throw DimensionError("LoopedGraph: ambient dimension mismatch");
}

DiscreteSource::DiscreteSource(int a, int b, int c, std::vector<CVector> st)
    : dim_a(a), dim_b(b), dim_c(c), states(std::move(st)) {
  if (a <= 0 || b <= 0 || c <= 0) throw DimensionError("DiscreteSource: dimensions must be positive");
  if (states.empty()) throw std::invalid_argument("DiscreteSource: no states");
  for (const auto& psi : states) {
    if (psi.size() != a * b * c) throw DimensionError("DiscreteSource: state dimension mismatch");
    if (std::abs(psi.norm() - 1.0) > 1e-9) throw std::invalid_argument("DiscreteSource: state not normalised");
  }
}

DiscreteSource classical_source(const SourceDistribution& p) {
  if (p.empty()) throw std::invalid_argument("classical_source: no inputs");
  const int nx = static_cast<int>(p.front().rows());
  const int nu = static_cast<int>(p.front().cols());
  std::vector<CVector> states;
  for (const auto& pi : p) {
    if (pi.rows() != nx || pi.cols() != nu) throw DimensionError("classical_source: shape mismatch");
    if (pi.minCoeff() < 0) throw std::invalid_argument("classical_source: negative probability");
    CVector psi = CVector::Zero(nx * nu * nx * nu);
    for (int x = 0; x < nx; ++x)
      for (int u = 0; u < nu; ++u) psi((x * nu + u) * (nx * nu) + (x * nu + u)) = std::sqrt(pi(x, u));
    states.push_back(psi);
  }
  return DiscreteSource(nx, nu, nx * nu, std::move(states));
}

DiscreteSource purify(int dim_a, int dim_b, const std::vector<CMatrix>& rhos) {
  const int d = dim_a * dim_b;
  std::vector<std::vector<std::pair<double, CVector>>> eig;
  int rank = 1;
  for (const auto& rho : rhos) {
    if (rho.rows() != d || rho.cols() != d) throw DimensionError("purify: state dimension mismatch");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()));
    std::vector<std::pair<double, CVector>> terms;
    double top = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int k = d - 1; k >= 0; --k) {
      double lam = es.eigenvalues()(k);
      if (lam < -1e-9 * top) throw std::invalid_argument("purify: state is not positive semidefinite");
      if (lam > 1e-12 * top) terms.emplace_back(lam, es.eigenvectors().col(k));
    }
    rank = std::max(rank, static_cast<int>(terms.size()));
    eig.push_back(std::move(terms));
  }
  std::vector<CVector> states;
  for (const auto& terms : eig) {
    CVector psi = CVector::Zero(d * rank);
    for (int k = 0; k < static_cast<int>(terms.size()); ++k)
      for (int ab = 0; ab < d; ++ab) psi(ab * rank + k) = std::sqrt(terms[k].first) * terms[k].second(ab);
    psi.normalize();
    states.push_back(psi);
  }
  return DiscreteSource(dim_a, dim_b, rank, std::move(states));
}

// --- Graph constructions ---------------------------------------------------------------

OperatorSubspace complete_classical(int n) {
  if (n <= 0) throw std::invalid_argument("complete_classical: n must be positive");
  return from_classical(complete_graph(n));
}

OperatorSubspace complete_quantum(int n) {
  if (n <= 0) throw std::invalid_argument("complete_quantum: n must be positive");
  std::vector<CMatrix> span;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y) span.push_back(matrix_unit(n, x, y));
  for (int x = 0; x + 1 < n; ++x) span.push_back(matrix_unit(n, x, x) - matrix_unit(n, x + 1, x + 1));
  return orthonormalize(n, span);
}

OperatorSubspace from_classical(const ClassicalGraph& g) {
  if (g.n() <= 0) throw std::invalid_argument("from_classical: empty graph");
  std::vector<CMatrix> span;
  for (auto [x, y] : g.edges()) span.push_back(matrix_unit(g.n(), x, y));
  return orthonormalize(g.n(), span);
}

OperatorSubspace diagonal_space(int n) {
  std::vector<CMatrix> span;
  for (int x = 0; x < n; ++x) span.push_back(matrix_unit(n, x, x));
  return orthonormalize(n, span);
}

ChannelGraphs channel_graphs(const QuantumChannel& channel) {
  std::vector<CMatrix> span;
  for (const auto& a : channel.kraus())
    for (const auto& b : channel.kraus()) span.push_back(a.adjoint() * b);
  OperatorSubspace conf = orthonormalize(channel.dim_in(), span);
  OperatorSubspace dist = perp(conf);
  return {std::move(conf), std::move(dist)};
}

LoopedGraph discrete_source_graph(const DiscreteSource& src) {
  auto m = slices(src.states, src.dim_a, src.dim_b, src.dim_c);
  const int n = static_cast<int>(src.states.size());
  std::vector<std::pair<int, int>> off, diag;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) (i == j ? diag : off).emplace_back(i, j);
  return LoopedGraph(orthonormalize(src.dim_a, dyad_traces(m, off)),
                     orthonormalize(src.dim_a, dyad_traces(m, diag)));
}

LoopedGraph coherent_source_graph(const CMatrix& j, int dim_a, int dim_b, int dim_c) {
  if (j.rows() != dim_a * dim_b * dim_c) throw DimensionError("coherent_source_graph: J row dimension mismatch");
  const int r = static_cast<int>(j.cols());
  if ((j.adjoint() * j - CMatrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-9) {
    throw std::invalid_argument("coherent_source_graph: J is not an isometry");
  }
  std::vector<CVector> cols;
  for (int x = 0; x < r; ++x) cols.push_back(j.col(x));
  auto m = slices(cols, dim_a, dim_b, dim_c);

  // Tr_BC{L(C) J q J^dagger} for q ranging over a spanning set of Q_r.
  std::vector<CMatrix> span;
  auto add_for = [&](const std::vector<std::pair<std::pair<int, int>, double>>& q) {
    for (int l = 0; l < dim_c; ++l)
      for (int lp = 0; lp < dim_c; ++lp) {
        CMatrix acc = CMatrix::Zero(dim_a, dim_a);
        for (const auto& [xy, coef] : q) acc += coef * m[xy.first][l] * m[xy.second][lp].adjoint();
        span.push_back(acc);
      }
  };
  for (int x = 0; x < r; ++x)
    for (int y = 0; y < r; ++y)
      if (x != y) add_for({{{x, y}, 1.0}});
  for (int x = 0; x + 1 < r; ++x) add_for({{{x, x}, 1.0}, {{x + 1, x + 1}, -1.0}});
  OperatorSubspace s = orthonormalize(dim_a, span);

  span.clear();
  std::vector<std::pair<std::pair<int, int>, double>> identity;
  for (int x = 0; x < r; ++x) identity.push_back({{x, x}, 1.0});
  add_for(identity);
  return LoopedGraph(std::move(s), orthonormalize(dim_a, span));
}

DiscreteSource source_from_graph(const OperatorSubspace& s) {
  const int d = s.ambient_dim();
  const CVector phi = max_entangled(d) / std::sqrt(static_cast<double>(d));
  if (s.is_zero()) {
    // Orthogonal flags on B' make every cross term vanish.
    CVector psi0 = CVector::Zero(d * d * 2), psi1 = CVector::Zero(d * d * 2);
    for (int ab = 0; ab < d * d; ++ab) {
      psi0(ab * 2) = phi(ab);
      psi1(ab * 2 + 1) = phi(ab);
    }
    return DiscreteSource(d, 2 * d, 1, {psi0, psi1});
  }
  const int nx = s.dim();
  const int db = d * nx;  // B (x) B'
  const double norm = 1.0 / std::sqrt(static_cast<double>(nx));
  CVector psi0 = CVector::Zero(d * db * nx), psi1 = CVector::Zero(d * db * nx);
  for (int x = 0; x < nx; ++x) {
    const CMatrix& sx = s.basis()[x].matrix();
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        int idx = (a * db + (b * nx + x)) * nx + x;
        psi0(idx) = norm * phi(a * d + b);
        psi1(idx) = norm * sx(a, b);
      }
  }
  return DiscreteSource(d, db, nx, {psi0, psi1});
}

// --- Products -----------------------------------------------------------------------------

OperatorSubspace disjunctive_product(const OperatorSubspace& s, const OperatorSubspace& t) {
  OperatorSubspace sum = sum_space(tensor_space(s, full_space(t.ambient_dim())),
                                   tensor_space(full_space(s.ambient_dim()), t));
  // Cross-check against the perp form while it stays cheap.
  if (sum.ambient_dim() <= 9) {
    if (!same_subspace(sum, disjunctive_product_via_perp(s, t))) {
      throw std::logic_error("disjunctive_product: sum and perp forms disagree");
    }
  }
  return sum;
}

OperatorSubspace disjunctive_product_via_perp(const OperatorSubspace& s, const OperatorSubspace& t) {
  return perp(tensor_space(perp(s), perp(t)));
}

LoopedGraph strong_product(const LoopedGraph& g, const LoopedGraph& h) {
  OperatorSubspace s = sum_space(sum_space(tensor_space(g.s, h.s), tensor_space(g.s0, h.s)),
                                 tensor_space(g.s, h.s0));
  return LoopedGraph(std::move(s), tensor_space(g.s0, h.s0));
}

LoopedGraph graph_power(const LoopedGraph& g, int m) {
  if (m < 1) throw std::invalid_argument("graph_power: exponent must be at least 1");
  LoopedGraph out = g;
  for (int k = 1; k < m; ++k) out = strong_product(out, g);
  return out;
}

OperatorSubspace proposed_complement(const OperatorSubspace& s) {
  if (!s.is_trace_free()) throw std::invalid_argument("proposed_complement: graph is not trace-free");
  const int d = s.ambient_dim();
  return perp(sum_space(s, span_of(CMatrix::Identity(d, d))));
}

}  // namespace ncg
