#include "ncg/classical.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

namespace ncg {

// --- graph6 -------------------------------------------------------------------

ClassicalGraph parse_graph6(const std::string& s) {
  for (unsigned char ch : s) {
    if (ch < 63 || ch > 126) throw std::invalid_argument("graph6: byte outside the printable range 63..126");
  }
  if (s.empty()) throw std::invalid_argument("graph6: empty string");
  size_t pos = 0;
  std::uint64_t n = 0;
  auto take = [&](int count) {
    if (pos + count > s.size()) throw std::invalid_argument("graph6: truncated size header");
    std::uint64_t v = 0;
    for (int k = 0; k < count; ++k) v = (v << 6) | static_cast<std::uint64_t>(s[pos++] - 63);
    return v;
  };
  if (s[0] != 126) {
    n = take(1);
  } else if (s.size() > 1 && s[1] != 126) {
    ++pos;
    n = take(3);
  } else {
    pos += 2;
    n = take(6);
  }
  if (n > 100000) throw std::invalid_argument("graph6: graph too large");
  const std::uint64_t bits = n * (n - (n > 0 ? 1 : 0)) / 2;
  const std::uint64_t bytes = (bits + 5) / 6;
  if (s.size() - pos < bytes) throw std::invalid_argument("graph6: truncated edge data");
  if (s.size() - pos > bytes) throw std::invalid_argument("graph6: trailing bytes after edge data");
  ClassicalGraph g(static_cast<int>(n));
  std::uint64_t k = 0;
  for (std::uint64_t j = 1; j < n; ++j) {
    for (std::uint64_t i = 0; i < j; ++i, ++k) {
      int byte = s[pos + k / 6] - 63;
      if ((byte >> (5 - k % 6)) & 1) g.add_edge(static_cast<int>(i), static_cast<int>(j));
    }
  }
  // Padding bits must be zero.
  for (; k < bytes * 6; ++k) {
    int byte = s[pos + k / 6] - 63;
    if ((byte >> (5 - k % 6)) & 1) throw std::invalid_argument("graph6: nonzero padding bits");
  }
  return g;
}

std::string encode_graph6(const ClassicalGraph& g) {
  std::string out;
  const std::uint64_t n = g.n();
  if (n <= 62) {
    out.push_back(static_cast<char>(63 + n));
  } else if (n <= 258047) {
    out.push_back(126);
    for (int sh = 12; sh >= 0; sh -= 6) out.push_back(static_cast<char>(63 + ((n >> sh) & 63)));
  } else {
    out.push_back(126);
    out.push_back(126);
    for (int sh = 30; sh >= 0; sh -= 6) out.push_back(static_cast<char>(63 + ((n >> sh) & 63)));
  }
  int acc = 0, used = 0;
  for (int j = 1; j < g.n(); ++j) {
    for (int i = 0; i < j; ++i) {
      acc = (acc << 1) | (g.has_edge(i, j) ? 1 : 0);
      if (++used == 6) {
        out.push_back(static_cast<char>(63 + acc));
        acc = used = 0;
      }
    }
  }
  if (used > 0) out.push_back(static_cast<char>(63 + (acc << (6 - used))));
  return out;
}

// --- theta-bar family ---------------------------------------------------------

const char* to_string(ThetaVariant v) {
  switch (v) {
    case ThetaVariant::LOVASZ: return "lovasz";
    case ThetaVariant::SCHRIJVER: return "schrijver";
    case ThetaVariant::SZEGEDY: return "szegedy";
  }
  return "lovasz";
}

namespace {

struct PairVar {
  int x, y, var;
};

// max <B, J> over B >= 0, Tr B = 1. Off-diagonal entries exist on edges, and
// also off edges for Szegedy (where they must be <= 0). Schrijver wants B >= 0.
struct ClassicalMax {
  ConicProgram p;
  std::vector<int> diag;
  std::vector<PairVar> off;
};

ClassicalMax classical_max(const ClassicalGraph& g, ThetaVariant v) {
  ClassicalMax m;
  const int n = g.n();
  for (int i = 0; i < n; ++i) m.diag.push_back(m.p.add_variable("b" + std::to_string(i)));
  std::vector<int> nonneg, nonpos;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      const bool edge = g.has_edge(x, y);
      if (!edge && v != ThetaVariant::SZEGEDY) continue;
      int var = m.p.add_variable("b" + std::to_string(x) + "_" + std::to_string(y));
      m.off.push_back({x, y, var});
      if (edge && v == ThetaVariant::SCHRIJVER) nonneg.push_back(var);
      if (!edge) nonpos.push_back(var);
    }
  int blk = m.p.add_block(BlockKind::RealSymmetric, n, "B");
  for (int i = 0; i < n; ++i) m.p.add_entry(blk, m.diag[i], i, i, 1.0);
  for (const auto& o : m.off) m.p.add_entry(blk, o.var, o.x, o.y, 1.0);
  if (!nonneg.empty() || !nonpos.empty()) {
    int lin = m.p.add_block(BlockKind::Linear, static_cast<int>(nonneg.size() + nonpos.size()), "sign");
    int r = 0;
    for (int var : nonneg) m.p.add_entry(lin, var, r, r, 1.0), ++r;
    for (int var : nonpos) m.p.add_entry(lin, var, r, r, -1.0), ++r;
  }
  std::vector<std::pair<int, double>> tr;
  for (int i : m.diag) tr.emplace_back(i, 1.0);
  m.p.add_equality(tr, 1.0);
  RVector c = RVector::Zero(m.p.num_variables());
  for (int i : m.diag) c(i) = 1.0;
  for (const auto& o : m.off) c(o.var) = 2.0;
  m.p.set_objective(Sense::Maximize, c);
  return m;
}

// min lambda over Z - J >= 0, Z_ii = lambda. Off-diagonal entries exist off
// the edges; Schrijver also allows Z <= 0 on edges, Szegedy wants Z >= 0 off edges.
struct ClassicalMin {
  ConicProgram p;
  int lambda = 0;
  std::vector<PairVar> off;
};

ClassicalMin classical_min(const ClassicalGraph& g, ThetaVariant v) {
  ClassicalMin m;
  const int n = g.n();
  m.lambda = m.p.add_variable("lambda");
  std::vector<int> nonneg, nonpos;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) {
      const bool edge = g.has_edge(x, y);
      if (edge && v != ThetaVariant::SCHRIJVER) continue;
      int var = m.p.add_variable("z" + std::to_string(x) + "_" + std::to_string(y));
      m.off.push_back({x, y, var});
      if (edge) nonpos.push_back(var);
      if (!edge && v == ThetaVariant::SZEGEDY) nonneg.push_back(var);
    }
  int blk = m.p.add_block(BlockKind::RealSymmetric, n, "Z-J");
  for (int i = 0; i < n; ++i) m.p.add_entry(blk, m.lambda, i, i, 1.0);
  for (int x = 0; x < n; ++x)
    for (int y = x; y < n; ++y) m.p.add_entry(blk, -1, x, y, -1.0);
  for (const auto& o : m.off) m.p.add_entry(blk, o.var, o.x, o.y, 1.0);
  if (!nonneg.empty() || !nonpos.empty()) {
    int lin = m.p.add_block(BlockKind::Linear, static_cast<int>(nonneg.size() + nonpos.size()), "sign");
    int r = 0;
    for (int var : nonneg) m.p.add_entry(lin, var, r, r, 1.0), ++r;
    for (int var : nonpos) m.p.add_entry(lin, var, r, r, -1.0), ++r;
  }
  RVector c = RVector::Zero(m.p.num_variables());
  c(m.lambda) = 1.0;
  m.p.set_objective(Sense::Minimize, c);
  return m;
}

}  // namespace

ClassicalThetaResult classical_theta(const ClassicalGraph& g, ThetaVariant variant, const SolverOptions& opt) {
  if (g.n() < 1) throw std::invalid_argument("classical_theta: graph has no vertices");
  ClassicalThetaResult r;
  r.variant = variant;
  const int n = g.n();
  ClassicalMax mx = classical_max(g, variant);
  ClassicalMin mn = classical_min(g, variant);
  Solution a = solve(mx.p, opt);
  Solution b = solve(mn.p, opt);
  r.message = std::string("max form: ") + to_string(a.status) + ", " + a.message + "; min form: " + to_string(b.status) +
              ", " + b.message;
  if (a.status == SolveStatus::Optimal) {
    r.primal_value = a.primal_value;
    r.b = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) r.b(i, i) = a.y(mx.diag[i]);
    for (const auto& o : mx.off) r.b(o.x, o.y) = r.b(o.y, o.x) = a.y(o.var);
  }
  if (b.status == SolveStatus::Optimal) {
    r.dual_value = b.primal_value;
    r.z = b.y(mn.lambda) * RMatrix::Identity(n, n);
    for (const auto& o : mn.off) r.z(o.x, o.y) = r.z(o.y, o.x) = b.y(o.var);
  }
  if (a.status == SolveStatus::Optimal && b.status == SolveStatus::Optimal) {
    r.value = r.dual_value;
    r.gap = std::abs(r.primal_value - r.dual_value);
    r.status = r.gap < 1e-6 * std::max(1.0, r.value) ? SolveStatus::Optimal : SolveStatus::Unknown;
    if (r.status != SolveStatus::Optimal) r.message += "; max and min forms disagree";
  } else {
    r.value = b.status == SolveStatus::Optimal ? r.dual_value : r.primal_value;
  }
  return r;
}

ClassicalThetaTriple classical_theta_all(const ClassicalGraph& g, const SolverOptions& opt) {
  ClassicalThetaTriple t{classical_theta(g, ThetaVariant::SCHRIJVER, opt), classical_theta(g, ThetaVariant::LOVASZ, opt),
                         classical_theta(g, ThetaVariant::SZEGEDY, opt)};
  const bool ok = t.schrijver.status == SolveStatus::Optimal && t.lovasz.status == SolveStatus::Optimal &&
                  t.szegedy.status == SolveStatus::Optimal;
  if (ok && (t.schrijver.value > t.lovasz.value + 1e-6 || t.lovasz.value > t.szegedy.value + 1e-6)) {
    throw std::logic_error("classical_theta_all: Schrijver <= Lovasz <= Szegedy violated");
  }
  return t;
}

// --- brute force ----------------------------------------------------------------

namespace {

void check_small(const ClassicalGraph& g, const char* who) {
  if (g.n() > 12) throw std::invalid_argument(std::string(who) + ": exhaustive search limited to 12 vertices");
}

std::vector<unsigned> neighbour_masks(const ClassicalGraph& g) {
  std::vector<unsigned> nb(g.n(), 0);
  for (auto [x, y] : g.edges()) nb[x] |= 1u << y, nb[y] |= 1u << x;
  return nb;
}

}  // namespace

int clique_number(const ClassicalGraph& g) {
  check_small(g, "clique_number");
  const auto nb = neighbour_masks(g);
  int best = 0;
  // Bron-Kerbosch with pivoting.
  std::function<void(unsigned, unsigned, unsigned, int)> bk = [&](unsigned r, unsigned p, unsigned x, int size) {
    if (p == 0 && x == 0) {
      best = std::max(best, size);
      return;
    }
    unsigned px = p | x;
    int pivot = __builtin_ctz(px);
    unsigned cand = p & ~nb[pivot];
    while (cand) {
      int v = __builtin_ctz(cand);
      cand &= cand - 1;
      bk(r | (1u << v), p & nb[v], x & nb[v], size + 1);
      p &= ~(1u << v);
      x |= 1u << v;
    }
  };
  if (g.n() > 0) bk(0, (1u << g.n()) - 1, 0, 0);
  return best;
}

int chromatic_number(const ClassicalGraph& g) {
  check_small(g, "chromatic_number");
  const int n = g.n();
  if (n == 0) return 0;
  const auto nb = neighbour_masks(g);
  std::vector<int> colour(n, -1);
  for (int k = 1; k <= n; ++k) {
    // Vertex v may only open colour maxc + 1, which removes colour permutations.
    std::function<bool(int, int)> go = [&](int v, int maxc) {
      if (v == n) return true;
      for (int c = 0; c <= std::min(maxc + 1, k - 1); ++c) {
        bool clash = false;
        for (int u = 0; u < v && !clash; ++u) clash = (nb[v] >> u & 1) && colour[u] == c;
        if (clash) continue;
        colour[v] = c;
        if (go(v + 1, std::max(maxc, c))) return true;
        colour[v] = -1;
      }
      return false;
    };
    if (go(0, -1)) return k;
  }
  return n;
}

// --- characteristic graph -------------------------------------------------------

CharacteristicGraph classical_char_graph(const SourceDistribution& p, double tol) {
  if (p.empty()) throw std::invalid_argument("classical_char_graph: no inputs");
  const Eigen::Index nx = p[0].rows(), nu = p[0].cols();
  for (const auto& pi : p) {
    if (pi.rows() != nx || pi.cols() != nu) throw DimensionError("classical_char_graph: shape mismatch");
    if (pi.minCoeff() < 0) throw std::invalid_argument("classical_char_graph: negative probability");
    if (std::abs(pi.sum() - 1.0) > 1e-9) throw std::invalid_argument("classical_char_graph: distribution not normalised");
  }
  CharacteristicGraph out{ClassicalGraph(static_cast<int>(nx)), {}};
  const size_t k = p.size();
  for (int x = 0; x < nx; ++x)
    for (int y = x; y < nx; ++y) {
      bool linked = false;
      for (int u = 0; u < nu && !linked; ++u)
        for (size_t i = 0; i < k && !linked; ++i)
          for (size_t j = 0; j < k && !linked; ++j)
            linked = i != j && p[i](x, u) * p[j](y, u) > tol;
      if (!linked) continue;
      if (x == y) {
        out.loops.push_back(x);
      } else {
        out.graph.add_edge(x, y);
      }
    }
  return out;
}

}  // namespace ncg
