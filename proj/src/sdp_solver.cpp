// Interior-point solver for ConicProgram.
//
// Pipeline: realify the blocks, eliminate equalities, drop rows that are
// identically zero, turn zero-diagonal rows into equalities, remove linearly
// dependent variables, then optionally run a feasibility phase
// (min t s.t. F(y) + t I >= 0). A positive phase value with a verified dual
// is a Farkas certificate; a value of zero exposes a face of the cone and
// the program is restricted to it. The main solve is an infeasible
// primal-dual path-following method with the HKM direction and a Mehrotra
// predictor-corrector.

#include "ncg/conic.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ncg {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

constexpr double kZero = 1e-13;

double sp_dot(const SpMat& a, const SpMat& b) {
  if (a.nonZeros() == 0 || b.nonZeros() == 0) return 0.0;
  return a.cwiseProduct(b).sum();
}

double sp_dot(const SpMat& a, const RMatrix& b) {
  double s = 0.0;
  for (int k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it) s += it.value() * b(it.row(), it.col());
  return s;
}

// Pairing with a multiplier; linear-block multipliers are stored as columns.
double pair_dot(const SpMat& f, const RMatrix& x, bool linear) {
  if (!linear) return sp_dot(f, x);
  double s = 0.0;
  for (int k = 0; k < f.outerSize(); ++k)
    for (SpMat::InnerIterator it(f, k); it; ++it)
      if (it.row() == it.col()) s += it.value() * x(it.row(), 0);
  return s;
}

template <class M>
double max_abs(const M& m) {
  return m.size() ? static_cast<double>(m.cwiseAbs().maxCoeff()) : 0.0;
}

SpMat prune(SpMat m, double ref) {
  m.prune([ref](Eigen::Index, Eigen::Index, double v) { return std::abs(v) > kZero * ref; });
  m.makeCompressed();
  return m;
}

SpMat to_sparse(const RMatrix& m) {
  double ref = std::max(1.0, max_abs(m));
  return prune(m.sparseView(), ref);
}

// Affine LMI in maximisation form: maximise c'y + c0 s.t. F_b(y) >= 0.
struct Lmi {
  std::vector<int> dim;
  std::vector<bool> linear;
  std::vector<SpMat> f0;
  std::vector<std::vector<SpMat>> f;  // [var][block]
  RVector c;
  double c0 = 0.0;
  std::vector<RVector> eq_rows;
  std::vector<double> eq_rhs;
  // Recovery: original y = y_offset + y_map * y, original real block = basis * block * basis'.
  RVector y_offset;
  RMatrix y_map;
  std::vector<RMatrix> basis;
  std::vector<int> origin;  // original block index

  int m() const { return static_cast<int>(c.size()); }
  int nb() const { return static_cast<int>(dim.size()); }
};

// ---------------------------------------------------------------------------
// Construction and recovery

int real_dim(const ConicProgram::Block& b) { return b.kind == BlockKind::Hermitian ? 2 * b.dim : b.dim; }

Lmi build_lmi(const ConicProgram& p) {
  Lmi l;
  const int m = p.num_variables();
  const int nb = p.num_blocks();
  l.c = RVector::Zero(m);
  const double sign = p.sense() == Sense::Maximize ? 1.0 : -1.0;
  for (int i = 0; i < m; ++i) l.c(i) = sign * p.objective_coefficient(i);
  l.c0 = sign * p.objective_constant();
  l.f.assign(m, std::vector<SpMat>(nb));
  for (int b = 0; b < nb; ++b) {
    const auto& blk = p.blocks()[b];
    const int n = real_dim(blk);
    const int d = blk.dim;
    l.dim.push_back(n);
    l.linear.push_back(blk.kind == BlockKind::Linear);
    l.basis.push_back(RMatrix::Identity(n, n));
    l.origin.push_back(b);
    std::vector<std::vector<Triplet>> trip(m + 1);
    for (const auto& [key, z] : blk.entries) {
      auto& t = trip[key.var + 1];
      const int r = key.row, c = key.col;
      if (blk.kind != BlockKind::Hermitian) {
        t.emplace_back(r, c, z.real());
        if (r != c) t.emplace_back(c, r, z.real());
        continue;
      }
      if (r == c) {
        t.emplace_back(r, r, z.real());
        t.emplace_back(r + d, r + d, z.real());
        continue;
      }
      if (z.real() != 0.0) {
        t.emplace_back(r, c, z.real());
        t.emplace_back(c, r, z.real());
        t.emplace_back(r + d, c + d, z.real());
        t.emplace_back(c + d, r + d, z.real());
      }
      if (z.imag() != 0.0) {
        t.emplace_back(r, c + d, -z.imag());
        t.emplace_back(c + d, r, -z.imag());
        t.emplace_back(c, r + d, z.imag());
        t.emplace_back(r + d, c, z.imag());
      }
    }
    for (int v = -1; v < m; ++v) {
      SpMat s(n, n);
      s.setFromTriplets(trip[v + 1].begin(), trip[v + 1].end());
      s.makeCompressed();
      if (v < 0) {
        l.f0.push_back(std::move(s));
      } else {
        l.f[v][b] = std::move(s);
      }
    }
  }
  for (const auto& e : p.equalities()) {
    RVector row = RVector::Zero(m);
    for (const auto& [v, a] : e.coeffs) row(v) += a;
    l.eq_rows.push_back(row);
    l.eq_rhs.push_back(e.rhs);
  }
  l.y_offset = RVector::Zero(m);
  l.y_map = RMatrix::Identity(m, m);
  return l;
}

// ---------------------------------------------------------------------------
// Presolve

enum class PresolveResult { Ok, Infeasible, Unbounded };

struct PresolveInfo {
  PresolveResult result = PresolveResult::Ok;
  std::string message;
};

void restrict_block(Lmi& l, int b, const RMatrix& q) {
  SpMat qs = to_sparse(q);
  SpMat qt = qs.transpose();
  double ref = 1.0;
  auto apply = [&](SpMat& s) {
    if (s.nonZeros() == 0) {
      s = SpMat(q.cols(), q.cols());
      return;
    }
    ref = std::max(1.0, s.coeffs().cwiseAbs().maxCoeff());
    SpMat r = qt * s * qs;
    s = prune(r, ref);
  };
  apply(l.f0[b]);
  for (int i = 0; i < l.m(); ++i) apply(l.f[i][b]);
  l.basis[b] = l.basis[b] * q;
  l.dim[b] = static_cast<int>(q.cols());
}

RMatrix selection(int n, const std::vector<int>& keep) {
  RMatrix q = RMatrix::Zero(n, keep.size());
  for (size_t k = 0; k < keep.size(); ++k) q(keep[k], k) = 1.0;
  return q;
}

void remove_block(Lmi& l, int b) {
  l.dim.erase(l.dim.begin() + b);
  l.linear.erase(l.linear.begin() + b);
  l.f0.erase(l.f0.begin() + b);
  for (auto& fi : l.f) fi.erase(fi.begin() + b);
  l.basis.erase(l.basis.begin() + b);
  l.origin.erase(l.origin.begin() + b);
}

// Substitutes y = offset + t * z into the LMI.
void substitute(Lmi& l, const RVector& offset, const RMatrix& t) {
  const int m = l.m();
  const int mz = static_cast<int>(t.cols());
  for (int b = 0; b < l.nb(); ++b) {
    SpMat f0 = l.f0[b];
    for (int i = 0; i < m; ++i)
      if (offset(i) != 0.0 && l.f[i][b].nonZeros() > 0) f0 += offset(i) * l.f[i][b];
    double ref = f0.nonZeros() ? std::max(1.0, f0.coeffs().cwiseAbs().maxCoeff()) : 1.0;
    l.f0[b] = prune(f0, ref);
  }
  std::vector<std::vector<SpMat>> nf(mz, std::vector<SpMat>(l.nb()));
  for (int j = 0; j < mz; ++j) {
    for (int b = 0; b < l.nb(); ++b) {
      SpMat acc(l.dim[b], l.dim[b]);
      double ref = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t(i, j) == 0.0 || l.f[i][b].nonZeros() == 0) continue;
        acc += t(i, j) * l.f[i][b];
        ref = std::max(ref, std::abs(t(i, j)) * l.f[i][b].coeffs().cwiseAbs().maxCoeff());
      }
      nf[j][b] = prune(acc, std::max(ref, 1e-300));
    }
  }
  l.f = std::move(nf);
  l.c0 += l.c.dot(offset);
  l.c = t.transpose() * l.c;
  for (size_t k = 0; k < l.eq_rows.size(); ++k) {
    l.eq_rhs[k] -= l.eq_rows[k].dot(offset);
    l.eq_rows[k] = t.transpose() * l.eq_rows[k];
  }
  l.y_offset += l.y_map * offset;
  l.y_map = l.y_map * t;
}

PresolveInfo eliminate_equalities(Lmi& l, double tol) {
  PresolveInfo info;
  if (l.eq_rows.empty()) return info;
  const int m = l.m();
  const int k = static_cast<int>(l.eq_rows.size());
  // One scale for the whole system, so rows that are rounding noise next to
  // the largest row stay below the pivot tolerance.
  double top = 0.0;
  for (int r = 0; r < k; ++r) top = std::max({top, max_abs(l.eq_rows[r]), std::abs(l.eq_rhs[r])});
  if (top == 0.0) top = 1.0;
  RMatrix e(k, m);
  RVector g(k);
  for (int r = 0; r < k; ++r) {
    e.row(r) = l.eq_rows[r].transpose() / top;
    g(r) = l.eq_rhs[r] / top;
  }
  l.eq_rows.clear();
  l.eq_rhs.clear();

  // Gauss-Jordan elimination with complete pivoting.
  std::vector<int> pivot_col;
  std::vector<bool> col_used(m, false);
  int rank = 0;
  for (; rank < std::min(k, m); ++rank) {
    Eigen::Index pr = 0, pc = 0;
    double best = 0.0;
    for (int r = rank; r < k; ++r)
      for (int c = 0; c < m; ++c)
        if (!col_used[c] && std::abs(e(r, c)) > best) best = std::abs(e(r, c)), pr = r, pc = c;
    if (best <= tol) break;
    e.row(rank).swap(e.row(pr));
    std::swap(g(rank), g(pr));
    double piv = e(rank, pc);
    e.row(rank) /= piv;
    g(rank) /= piv;
    for (int r = 0; r < k; ++r) {
      if (r == rank || e(r, pc) == 0.0) continue;
      double f = e(r, pc);
      e.row(r) -= f * e.row(rank);
      g(r) -= f * g(rank);
    }
    col_used[pc] = true;
    pivot_col.push_back(static_cast<int>(pc));
  }
  for (int r = rank; r < k; ++r) {
    if (std::abs(g(r)) > std::max(1e-7, tol)) {
      info.result = PresolveResult::Infeasible;
      info.message = "linear equalities are inconsistent";
      return info;
    }
  }
  if (rank == 0) return info;
  std::vector<int> free_cols;
  for (int c = 0; c < m; ++c)
    if (!col_used[c]) free_cols.push_back(c);
  RVector offset = RVector::Zero(m);
  RMatrix t = RMatrix::Zero(m, free_cols.size());
  for (size_t j = 0; j < free_cols.size(); ++j) t(free_cols[j], j) = 1.0;
  for (int r = 0; r < rank; ++r) {
    int pc = pivot_col[r];
    offset(pc) = g(r);
    for (size_t j = 0; j < free_cols.size(); ++j) {
      double v = e(r, free_cols[j]);
      if (std::abs(v) > 1e-14) t(pc, j) = -v;
    }
  }
  substitute(l, offset, t);
  return info;
}

// Drops rows that vanish identically; turns rows with an identically zero
// diagonal into equalities. Returns whether anything changed.
bool reduce_rows(Lmi& l, PresolveInfo& info) {
  bool changed = false;
  for (int b = l.nb() - 1; b >= 0; --b) {
    const int n = l.dim[b];
    std::vector<char> nonzero(n, 0), diag_nonzero(n, 0);
    auto mark = [&](const SpMat& s) {
      for (int k = 0; k < s.outerSize(); ++k)
        for (SpMat::InnerIterator it(s, k); it; ++it) {
          nonzero[it.row()] = 1;
          if (it.row() == it.col()) diag_nonzero[it.row()] = 1;
        }
    };
    bool has_var = false;
    for (int i = 0; i < l.m(); ++i) {
      if (l.f[i][b].nonZeros()) has_var = true;
      mark(l.f[i][b]);
    }
    if (l.linear[b]) {
      std::vector<int> keep;
      for (int r = 0; r < n; ++r) {
        if (nonzero[r]) {
          keep.push_back(r);
          continue;
        }
        double v = l.f0[b].coeff(r, r);
        if (v < -1e-12) {
          info.result = PresolveResult::Infeasible;
          info.message = "constant linear constraint is violated";
          return false;
        }
      }
      if (static_cast<int>(keep.size()) < n) {
        restrict_block(l, b, selection(n, keep));
        changed = true;
      }
      if (l.dim[b] == 0) remove_block(l, b);
      continue;
    }
    mark(l.f0[b]);
    if (!has_var) {
      // Constant block: it either holds or certifies infeasibility.
      RMatrix f0 = RMatrix(l.f0[b]);
      if (n > 0 && f0.size() > 0) {
        Eigen::SelfAdjointEigenSolver<RMatrix> es(f0, Eigen::EigenvaluesOnly);
        double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        if (es.eigenvalues()(0) < -1e-10 * scale) {
          info.result = PresolveResult::Infeasible;
          info.message = "a constant block is not positive semidefinite";
          return false;
        }
      }
      remove_block(l, b);
      changed = true;
      continue;
    }
    std::vector<int> keep;
    std::vector<int> zero_diag;
    for (int r = 0; r < n; ++r) {
      if (!nonzero[r]) continue;
      if (!diag_nonzero[r]) {
        zero_diag.push_back(r);
        continue;
      }
      keep.push_back(r);
    }
    // A PSD matrix with a zero diagonal entry has the whole row zero.
    for (int r : zero_diag) {
      std::vector<int> cols;
      for (int c = 0; c < n; ++c) {
        bool any = std::abs(l.f0[b].coeff(r, c)) > 0.0;
        for (int i = 0; i < l.m() && !any; ++i) any = std::abs(l.f[i][b].coeff(r, c)) > 0.0;
        if (any) cols.push_back(c);
      }
      for (int c : cols) {
        RVector row(l.m());
        for (int i = 0; i < l.m(); ++i) row(i) = l.f[i][b].coeff(r, c);
        l.eq_rows.push_back(row);
        l.eq_rhs.push_back(-l.f0[b].coeff(r, c));
      }
    }
    if (static_cast<int>(keep.size()) < n) {
      restrict_block(l, b, selection(n, keep));
      changed = true;
    }
    if (l.dim[b] == 0) remove_block(l, b);
  }
  return changed;
}

// Removes variables whose coefficient matrices are linear combinations of
// the others.
PresolveInfo remove_dependent(Lmi& l) {
  PresolveInfo info;
  const int m = l.m();
  if (m == 0) return info;
  RMatrix g = RMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int b = 0; b < l.nb(); ++b) s += sp_dot(l.f[i][b], l.f[j][b]);
      g(i, j) = g(j, i) = s;
    }
  // Greedy pivoted Cholesky.
  double maxdiag = g.diagonal().maxCoeff();
  std::vector<int> basis;
  std::vector<bool> taken(m, false);
  RMatrix lmat = RMatrix::Zero(m, m);
  RVector resid = g.diagonal();
  const double tol = 1e-12 * std::max(maxdiag, 1e-300);
  while (static_cast<int>(basis.size()) < m) {
    int p = -1;
    double best = tol;
    for (int i = 0; i < m; ++i)
      if (!taken[i] && resid(i) > best) best = resid(i), p = i;
    if (p < 0) break;
    const int k = static_cast<int>(basis.size());
    taken[p] = true;
    basis.push_back(p);
    double piv = std::sqrt(resid(p));
    for (int i = 0; i < m; ++i) {
      if (taken[i] && i != p) continue;
      double v = g(i, p);
      for (int q = 0; q < k; ++q) v -= lmat(i, q) * lmat(p, q);
      lmat(i, k) = (i == p) ? piv : v / piv;
      if (i != p) resid(i) -= lmat(i, k) * lmat(i, k);
    }
  }
  if (static_cast<int>(basis.size()) == m) return info;
  std::sort(basis.begin(), basis.end());
  RMatrix gbb(basis.size(), basis.size());
  RVector cb(basis.size());
  for (size_t a = 0; a < basis.size(); ++a) {
    cb(a) = l.c(basis[a]);
    for (size_t b = 0; b < basis.size(); ++b) gbb(a, b) = g(basis[a], basis[b]);
  }
  Eigen::LDLT<RMatrix> ldlt(gbb);
  double cscale = std::max(1.0, max_abs(l.c));
  for (int j = 0; j < m; ++j) {
    if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
    RVector gbj(basis.size());
    for (size_t a = 0; a < basis.size(); ++a) gbj(a) = g(basis[a], j);
    RVector alpha = basis.empty() ? RVector() : RVector(ldlt.solve(gbj));
    double reduced = l.c(j) - (basis.empty() ? 0.0 : alpha.dot(cb));
    if (std::abs(reduced) > 1e-9 * cscale) {
      info.result = PresolveResult::Unbounded;
      info.message = "objective improves along a direction that leaves every block unchanged";
    }
  }
  RMatrix t = selection(m, basis);
  substitute(l, RVector::Zero(m), t);
  return info;
}

// Equations derived from an inexact multiplier (facial reduction) carry noise
// of order sqrt(solver accuracy), hence the loose pivot tolerance.
PresolveInfo presolve(Lmi& l, bool rows, bool loose = false) {
  PresolveInfo info;
  for (int round = 0; round < 50; ++round) {
    info = eliminate_equalities(l, loose ? 1e-3 : 1e-9);
    if (info.result != PresolveResult::Ok) return info;
    if (!rows) break;
    bool changed = reduce_rows(l, info);
    if (info.result != PresolveResult::Ok) return info;
    if (!changed && l.eq_rows.empty()) break;
  }
  return remove_dependent(l);
}

// ---------------------------------------------------------------------------
// Interior point method on max b'y s.t. C - sum y_i A_i = S >= 0 with
// C = F0, A_i = -F_i; the multiplier problem is min <C, X>, A(X) = b, X >= 0.

struct Coef {
  int var;
  bool dense = false;
  RMatrix full;                     // dense A_i (already negated)
  std::vector<int> r, c;            // sparse entries, both triangles
  std::vector<double> v;
  std::vector<int> cols;            // distinct columns
  std::vector<std::vector<std::pair<int, double>>> by_col;  // rows and values grouped by column
};

struct IpmBlock {
  int n;
  bool lp;
  RMatrix cmat;          // n x n, or n x 1 for linear blocks
  std::vector<Coef> coefs;
  RMatrix lp_a;          // n x m for linear blocks
};

enum class IpmOutcome { Converged, Relaxed, LmiInfeasible, LmiUnbounded, Stalled, MaxIter, Failed };

struct IpmResult {
  IpmOutcome outcome = IpmOutcome::Failed;
  RVector y;
  std::vector<RMatrix> x;  // multipliers per block (linear: n x 1)
  double lmi_obj = 0.0;    // b'y
  double mult_obj = 0.0;   // <C, X>
  double relgap = 1.0, pinf = 1.0, dinf = 1.0;
  int iterations = 0;
  RVector last_dy;
};

std::vector<IpmBlock> setup_blocks(const Lmi& l) {
  std::vector<IpmBlock> blocks(l.nb());
  for (int b = 0; b < l.nb(); ++b) {
    auto& blk = blocks[b];
    blk.n = l.dim[b];
    blk.lp = l.linear[b];
    if (blk.lp) {
      blk.cmat = RMatrix(l.f0[b]).diagonal();
      blk.lp_a = RMatrix::Zero(blk.n, l.m());
      for (int i = 0; i < l.m(); ++i)
        if (l.f[i][b].nonZeros()) blk.lp_a.col(i) = -RMatrix(l.f[i][b]).diagonal();
      continue;
    }
    blk.cmat = RMatrix(l.f0[b]);
    for (int i = 0; i < l.m(); ++i) {
      const SpMat& s = l.f[i][b];
      if (s.nonZeros() == 0) continue;
      Coef c;
      c.var = i;
      if (s.nonZeros() > blk.n * blk.n / 4) {
        c.dense = true;
        c.full = -RMatrix(s);
      } else {
        std::vector<int> seen(blk.n, -1);
        for (int k = 0; k < s.outerSize(); ++k)
          for (SpMat::InnerIterator it(s, k); it; ++it) {
            c.r.push_back(static_cast<int>(it.row()));
            c.c.push_back(static_cast<int>(it.col()));
            c.v.push_back(-it.value());
            int col = static_cast<int>(it.col());
            if (seen[col] < 0) {
              seen[col] = static_cast<int>(c.cols.size());
              c.cols.push_back(col);
              c.by_col.emplace_back();
            }
            c.by_col[seen[col]].emplace_back(static_cast<int>(it.row()), -it.value());
          }
      }
      blk.coefs.push_back(std::move(c));
    }
  }
  return blocks;
}

double coef_dot(const Coef& c, const RMatrix& y) {
  if (c.dense) return c.full.cwiseProduct(y).sum();
  double s = 0.0;
  for (size_t k = 0; k < c.v.size(); ++k) s += c.v[k] * y(c.r[k], c.c[k]);
  return s;
}

void coef_add(const Coef& c, double w, RMatrix& out) {
  if (c.dense) {
    out += w * c.full;
    return;
  }
  for (size_t k = 0; k < c.v.size(); ++k) out(c.r[k], c.c[k]) += w * c.v[k];
}

class Ipm {
 public:
  Ipm(const Lmi& l, const SolverOptions& o) : m_(l.m()), opt_(o), blocks_(setup_blocks(l)), b_(l.c) {}

  IpmResult run();

 private:
  RVector a_op(const std::vector<RMatrix>& y) const {
    RVector out = RVector::Zero(m_);
    for (size_t b = 0; b < blocks_.size(); ++b) {
      const auto& blk = blocks_[b];
      if (blk.lp) {
        out += blk.lp_a.transpose() * y[b];
        continue;
      }
      for (const auto& c : blk.coefs) out(c.var) += coef_dot(c, y[b]);
    }
    return out;
  }

  RMatrix at_op(size_t b, const RVector& y) const {
    const auto& blk = blocks_[b];
    if (blk.lp) return blk.lp_a * y;
    RMatrix out = RMatrix::Zero(blk.n, blk.n);
    for (const auto& c : blk.coefs)
      if (y(c.var) != 0.0) coef_add(c, y(c.var), out);
    return out;
  }

  RMatrix schur(const std::vector<RMatrix>& x, const std::vector<RMatrix>& sinv) const;
  static double max_step(const RMatrix& x, const RMatrix& dx, bool lp);

  int m_;
  SolverOptions opt_;
  std::vector<IpmBlock> blocks_;
  RVector b_;
};

RMatrix Ipm::schur(const std::vector<RMatrix>& x, const std::vector<RMatrix>& sinv) const {
  RMatrix mm = RMatrix::Zero(m_, m_);
  for (size_t bi = 0; bi < blocks_.size(); ++bi) {
    const auto& blk = blocks_[bi];
    if (blk.lp) {
      RVector w = x[bi].col(0).cwiseProduct(sinv[bi].col(0));
      mm.noalias() += blk.lp_a.transpose() * w.asDiagonal() * blk.lp_a;
      continue;
    }
    const int n = blk.n;
    const RMatrix& xb = x[bi];
    const RMatrix& si = sinv[bi];
    RMatrix g(n, n);
    for (size_t jj = 0; jj < blk.coefs.size(); ++jj) {
      const Coef& cj = blk.coefs[jj];
      if (cj.dense) {
        g.noalias() = xb * cj.full * si;
      } else {
        const int k = static_cast<int>(cj.cols.size());
        RMatrix t = RMatrix::Zero(n, k);
        RMatrix srows(k, n);
        for (int q = 0; q < k; ++q) {
          for (const auto& [r, v] : cj.by_col[q]) t.col(q) += v * xb.col(r);
          srows.row(q) = si.row(cj.cols[q]);
        }
        g.noalias() = t * srows;
      }
      for (size_t ii = jj; ii < blk.coefs.size(); ++ii) {
        const Coef& ci = blk.coefs[ii];
        double s;
        if (ci.dense) {
          s = ci.full.cwiseProduct(g.transpose()).sum();
        } else {
          s = 0.0;
          for (size_t e = 0; e < ci.v.size(); ++e) s += ci.v[e] * g(ci.c[e], ci.r[e]);
        }
        mm(ci.var, cj.var) += s;
        if (ci.var != cj.var) mm(cj.var, ci.var) += s;
      }
    }
  }
  return mm;
}

double Ipm::max_step(const RMatrix& x, const RMatrix& dx, bool lp) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (lp) {
    double a = inf;
    for (int k = 0; k < x.rows(); ++k)
      if (dx(k, 0) < 0) a = std::min(a, -x(k, 0) / dx(k, 0));
    return a;
  }
  Eigen::LLT<RMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  RMatrix w = llt.matrixL().solve(dx);
  RMatrix z = llt.matrixL().solve(w.transpose());
  Eigen::SelfAdjointEigenSolver<RMatrix> es(0.5 * (z + z.transpose()), Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues()(0);
  return lmin >= 0 ? inf : -1.0 / lmin;
}

IpmResult Ipm::run() {
  IpmResult res;
  const size_t nb = blocks_.size();
  int ntotal = 0;
  for (const auto& blk : blocks_) ntotal += blk.n;
  res.y = RVector::Zero(m_);
  if (ntotal == 0) {
    res.outcome = b_.size() == 0 || b_.cwiseAbs().maxCoeff() == 0 ? IpmOutcome::Converged : IpmOutcome::LmiUnbounded;
    return res;
  }

  // Starting point in the style of SDPT3.
  std::vector<RMatrix> x(nb), s(nb);
  double cnorm = 0.0;
  for (size_t b = 0; b < nb; ++b) {
    const auto& blk = blocks_[b];
    double anorm_max = 0.0, ratio = 0.0;
    if (blk.lp) {
      for (int i = 0; i < m_; ++i) {
        double an = blk.lp_a.col(i).norm();
        anorm_max = std::max(anorm_max, an);
        if (an > 0) ratio = std::max(ratio, (1.0 + std::abs(b_(i))) / (1.0 + an));
      }
    } else {
      for (const auto& c : blk.coefs) {
        double an = c.dense ? c.full.norm() : Eigen::Map<const RVector>(c.v.data(), c.v.size()).norm();
        anorm_max = std::max(anorm_max, an);
        ratio = std::max(ratio, (1.0 + std::abs(b_(c.var))) / (1.0 + an));
      }
    }
    double sn = std::sqrt(static_cast<double>(blk.n));
    double xi = std::max({10.0, sn, sn * ratio});
    double eta = std::max({10.0, sn, anorm_max, blk.cmat.norm()});
    cnorm += blk.cmat.squaredNorm();
    if (blk.lp) {
      x[b] = RMatrix::Constant(blk.n, 1, xi);
      s[b] = RMatrix::Constant(blk.n, 1, eta);
    } else {
      x[b] = xi * RMatrix::Identity(blk.n, blk.n);
      s[b] = eta * RMatrix::Identity(blk.n, blk.n);
    }
  }
  cnorm = std::sqrt(cnorm);
  const double bnorm = b_.norm();
  RVector y = RVector::Zero(m_);
  double best_err = std::numeric_limits<double>::infinity();
  int no_progress = 0;
  // Late iterations can lose accuracy; the best iterate seen is kept.
  IpmResult best;
  double best_seen = std::numeric_limits<double>::infinity();
  auto bail = [&](IpmOutcome fallback) {
    if (best_seen <= opt_.relaxed_tol) {
      best.outcome = best_seen <= std::max(opt_.gap_tol, opt_.feas_tol) ? IpmOutcome::Converged : IpmOutcome::Relaxed;
      best.iterations = res.iterations;
      return best;
    }
    res.outcome = fallback;
    return res;
  };

  auto block_dot = [&](const std::vector<RMatrix>& a, const std::vector<RMatrix>& c) {
    double v = 0.0;
    for (size_t b = 0; b < nb; ++b) v += a[b].cwiseProduct(c[b]).sum();
    return v;
  };

  for (int it = 0;; ++it) {
    res.iterations = it;
    std::vector<RMatrix> rd(nb);
    double rdn = 0.0;
    for (size_t b = 0; b < nb; ++b) {
      rd[b] = blocks_[b].cmat - at_op(b, y) - s[b];
      rdn += rd[b].squaredNorm();
    }
    rdn = std::sqrt(rdn);
    RVector rp = b_ - a_op(x);
    double pobj = 0.0;
    for (size_t b = 0; b < nb; ++b) pobj += blocks_[b].cmat.cwiseProduct(x[b]).sum();
    double dobj = b_.dot(y);
    double mu = block_dot(x, s) / ntotal;
    res.relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    res.pinf = rp.norm() / (1.0 + bnorm);
    res.dinf = rdn / (1.0 + cnorm);
    res.lmi_obj = dobj;
    res.mult_obj = pobj;
    res.y = y;
    res.x = x;
    if (opt_.verbosity > 1) {
      std::fprintf(stderr, "  it %3d  b'y %+.10e  <C,X> %+.10e  gap %.2e  pinf %.2e  dinf %.2e  mu %.2e\n", it,
                   dobj, pobj, res.relgap, res.pinf, res.dinf, mu);
    }
    if (res.relgap <= opt_.gap_tol && res.pinf <= opt_.feas_tol && res.dinf <= opt_.feas_tol) {
      res.outcome = IpmOutcome::Converged;
      return res;
    }
    double xnorm = 0.0, snorm = 0.0;
    for (size_t b = 0; b < nb; ++b) xnorm += x[b].squaredNorm(), snorm += s[b].squaredNorm();
    xnorm = std::sqrt(xnorm);
    snorm = std::sqrt(snorm);
    if (xnorm > 1e10 && res.dinf > opt_.feas_tol) {
      res.outcome = IpmOutcome::LmiInfeasible;
      return res;
    }
    if ((y.norm() > 1e10 || snorm > 1e12) && res.pinf > opt_.feas_tol) {
      res.outcome = IpmOutcome::LmiUnbounded;
      return res;
    }
    double err = std::max({res.relgap, res.pinf, res.dinf});
    if (err < best_seen) {
      best_seen = err;
      best = res;
    }
    if (err < 0.5 * best_err) {
      best_err = err;
      no_progress = 0;
    } else if (++no_progress >= 12 || (best_seen <= opt_.relaxed_tol && err > 100 * best_seen)) {
      return bail(IpmOutcome::Stalled);
    }
    if (it >= opt_.max_iterations) return bail(IpmOutcome::MaxIter);

    std::vector<RMatrix> sinv(nb);
    for (size_t b = 0; b < nb; ++b) {
      if (blocks_[b].lp) {
        sinv[b] = s[b].cwiseInverse();
        continue;
      }
      Eigen::LLT<RMatrix> llt(s[b]);
      if (llt.info() != Eigen::Success) return bail(IpmOutcome::Failed);
      sinv[b] = llt.solve(RMatrix::Identity(blocks_[b].n, blocks_[b].n));
      sinv[b] = (0.5 * (sinv[b] + sinv[b].transpose())).eval();
    }
    RMatrix mm = schur(x, sinv);
    double dscale = std::max(1e-300, max_abs(mm.diagonal()));
    Eigen::LLT<RMatrix> mfac(mm);
    for (double reg = 1e-14; mfac.info() != Eigen::Success && reg < 1e-6; reg *= 100) {
      mfac.compute(mm + reg * dscale * RMatrix::Identity(m_, m_));
    }
    if (mfac.info() != Eigen::Success) return bail(IpmOutcome::Failed);

    // X Rd S^{-1}, shared by predictor and corrector.
    std::vector<RMatrix> xrs(nb);
    for (size_t b = 0; b < nb; ++b) {
      xrs[b] = blocks_[b].lp ? RMatrix(x[b].cwiseProduct(rd[b]).cwiseProduct(sinv[b])) : RMatrix(x[b] * rd[b] * sinv[b]);
    }
    const RVector a_xrs = a_op(xrs);

    auto direction = [&](const std::vector<RMatrix>& comp, RVector& dy, std::vector<RMatrix>& dx,
                         std::vector<RMatrix>& ds) {
      // comp_b is the complementarity target K_b; dX = K S^{-1} - X - X dS S^{-1}.
      std::vector<RMatrix> ks(nb);
      for (size_t b = 0; b < nb; ++b) {
        ks[b] = blocks_[b].lp ? RMatrix(comp[b].cwiseProduct(sinv[b])) : RMatrix(comp[b] * sinv[b]);
      }
      RVector rhs = b_ - a_op(ks) + a_xrs;
      dy = mfac.solve(rhs);
      for (size_t b = 0; b < nb; ++b) {
        ds[b] = rd[b] - at_op(b, dy);
        if (blocks_[b].lp) {
          dx[b] = ks[b] - x[b] - x[b].cwiseProduct(ds[b]).cwiseProduct(sinv[b]);
        } else {
          RMatrix t = ks[b] - x[b] - x[b] * ds[b] * sinv[b];
          dx[b] = 0.5 * (t + t.transpose());
        }
      }
    };

    std::vector<RMatrix> comp(nb), dx(nb), ds(nb);
    RVector dy;
    for (size_t b = 0; b < nb; ++b) comp[b] = RMatrix::Zero(x[b].rows(), x[b].cols());
    direction(comp, dy, dx, ds);
    double ap = 1.0, ad = 1.0;
    for (size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(x[b], dx[b], blocks_[b].lp));
      ad = std::min(ad, max_step(s[b], ds[b], blocks_[b].lp));
    }
    double mu_aff = 0.0;
    for (size_t b = 0; b < nb; ++b) mu_aff += (x[b] + ap * dx[b]).cwiseProduct(s[b] + ad * ds[b]).sum();
    mu_aff /= ntotal;
    double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    for (size_t b = 0; b < nb; ++b) {
      if (blocks_[b].lp) {
        comp[b] = (RMatrix::Constant(x[b].rows(), 1, sigma * mu) - dx[b].cwiseProduct(ds[b]));
      } else {
        comp[b] = sigma * mu * RMatrix::Identity(blocks_[b].n, blocks_[b].n) - dx[b] * ds[b];
      }
    }
    direction(comp, dy, dx, ds);
    ap = ad = std::numeric_limits<double>::infinity();
    for (size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(x[b], dx[b], blocks_[b].lp));
      ad = std::min(ad, max_step(s[b], ds[b], blocks_[b].lp));
    }
    const double tau = 0.98;
    ap = std::min(1.0, tau * ap);
    ad = std::min(1.0, tau * ad);
    for (size_t b = 0; b < nb; ++b) {
      x[b] += ap * dx[b];
      s[b] += ad * ds[b];
      if (!blocks_[b].lp) {
        x[b] = (0.5 * (x[b] + x[b].transpose())).eval();
        s[b] = (0.5 * (s[b] + s[b].transpose())).eval();
      }
    }
    y += ad * dy;
    res.last_dy = dy;
  }
}

// ---------------------------------------------------------------------------
// Feasibility phase and facial reduction

Lmi phase_one_problem(const Lmi& l) {
  Lmi q = l;
  const int m = l.m();
  q.c = RVector::Zero(m + 1);
  q.c(m) = -1.0;
  q.c0 = 0.0;
  q.f.push_back(std::vector<SpMat>(l.nb()));
  for (int b = 0; b < l.nb(); ++b) {
    SpMat id(l.dim[b], l.dim[b]);
    id.setIdentity();
    q.f[m][b] = id;
  }
  // t >= -1 keeps the phase bounded.
  q.dim.push_back(1);
  q.linear.push_back(true);
  SpMat one(1, 1);
  one.insert(0, 0) = 1.0;
  q.f0.push_back(one);
  for (int i = 0; i < m; ++i) q.f[i].push_back(SpMat(1, 1));
  q.f[m].push_back(one);
  q.basis.push_back(RMatrix::Identity(1, 1));
  q.origin.push_back(-1);
  q.eq_rows.clear();
  q.eq_rhs.clear();
  return q;
}

struct PhaseOne {
  IpmResult ipm;
  double t = 0.0;
  bool certificate = false;  // verified Farkas certificate for l
  std::vector<RMatrix> x;    // multipliers on the blocks of l
};

PhaseOne phase_one(const Lmi& l, const SolverOptions& o) {
  PhaseOne out;
  Lmi q = phase_one_problem(l);
  SolverOptions po = o;
  po.max_iterations = std::max(o.max_iterations, 100);
  out.ipm = Ipm(q, po).run();
  out.t = out.ipm.y.size() ? out.ipm.y(l.m()) : 0.0;
  out.x.assign(out.ipm.x.begin(), out.ipm.x.begin() + l.nb());
  if (out.t > 1e-6) {
    double v0 = 0.0, xnorm = 0.0;
    for (int b = 0; b < l.nb(); ++b) {
      v0 += pair_dot(l.f0[b], out.x[b], l.linear[b]);
      xnorm += out.x[b].squaredNorm();
    }
    xnorm = std::sqrt(xnorm);
    double worst = 0.0;
    for (int i = 0; i < l.m(); ++i) {
      double r = 0.0, fn = 0.0;
      for (int b = 0; b < l.nb(); ++b) {
        r += pair_dot(l.f[i][b], out.x[b], l.linear[b]);
        fn += l.f[i][b].squaredNorm();
      }
      if (fn > 0) worst = std::max(worst, std::abs(r) / (std::sqrt(fn) * std::max(xnorm, 1e-300)));
    }
    out.certificate = v0 < -1e-7 * std::max(1.0, xnorm) && worst < 1e-6;
  }
  return out;
}

// Restricts l to the face exposed by the phase-one multipliers; false if
// the multipliers do not expose anything usable.
bool expose_face(Lmi& l, const std::vector<RMatrix>& x, double rel_cut) {
  double top = 0.0;
  std::vector<Eigen::SelfAdjointEigenSolver<RMatrix>> eig(l.nb());
  for (int b = 0; b < l.nb(); ++b) {
    if (l.dim[b] == 0) continue;
    if (l.linear[b]) {
      top = std::max(top, x[b].maxCoeff());
      continue;
    }
    eig[b].compute(0.5 * (x[b] + x[b].transpose()));
    top = std::max(top, eig[b].eigenvalues().maxCoeff());
  }
  if (!(top > 0)) return false;
  const double cut = rel_cut * top;
  bool any = false;
  std::vector<RMatrix> range(l.nb()), null(l.nb());
  for (int b = 0; b < l.nb(); ++b) {
    const int n = l.dim[b];
    std::vector<int> r_idx, n_idx;
    if (l.linear[b]) {
      for (int k = 0; k < n; ++k) (x[b](k, 0) > cut ? r_idx : n_idx).push_back(k);
      range[b] = selection(n, r_idx);
      null[b] = selection(n, n_idx);
    } else {
      for (int k = 0; k < n; ++k) (eig[b].eigenvalues()(k) > cut ? r_idx : n_idx).push_back(k);
      range[b] = RMatrix(n, r_idx.size());
      null[b] = RMatrix(n, n_idx.size());
      for (size_t k = 0; k < r_idx.size(); ++k) range[b].col(k) = eig[b].eigenvectors().col(r_idx[k]);
      for (size_t k = 0; k < n_idx.size(); ++k) null[b].col(k) = eig[b].eigenvectors().col(n_idx[k]);
    }
    if (!r_idx.empty()) any = true;
  }
  if (!any) return false;

  // Every feasible F(y) satisfies F(y) Q_r = 0.
  for (int b = 0; b < l.nb(); ++b) {
    const int r = static_cast<int>(range[b].cols());
    if (r == 0) continue;
    const int n = l.dim[b];
    RMatrix all(n, n);
    all << null[b], range[b];
    auto project = [&](const SpMat& s) -> RMatrix {
      if (l.linear[b]) return RMatrix(s).diagonal().transpose() * range[b];
      return all.transpose() * (s * range[b]);
    };
    RMatrix p0 = project(l.f0[b]);
    std::vector<RMatrix> pi(l.m());
    for (int i = 0; i < l.m(); ++i) pi[i] = project(l.f[i][b]);
    const int rows = static_cast<int>(p0.rows());
    const int nn = static_cast<int>(null[b].cols());
    for (int p = 0; p < rows; ++p)
      for (int q = 0; q < r; ++q) {
        if (!l.linear[b] && p >= nn && p - nn > q) continue;  // symmetric duplicate
        RVector row(l.m());
        for (int i = 0; i < l.m(); ++i) row(i) = pi[i](p, q);
        l.eq_rows.push_back(row);
        l.eq_rhs.push_back(-p0(p, q));
      }
  }
  for (int b = l.nb() - 1; b >= 0; --b) {
    if (range[b].cols() == 0) continue;
    restrict_block(l, b, null[b]);
    if (l.dim[b] == 0) remove_block(l, b);
  }
  return true;
}

}  // namespace

namespace {

// Maps multipliers of the reduced program back to the original blocks.
std::vector<CMatrix> recover_multipliers(const ConicProgram& p, const Lmi& l, const std::vector<RMatrix>& x) {
  std::vector<RMatrix> real(p.num_blocks());
  for (int ob = 0; ob < p.num_blocks(); ++ob) {
    const int n = real_dim(p.blocks()[ob]);
    real[ob] = RMatrix::Zero(n, n);
  }
  for (int b = 0; b < l.nb() && b < static_cast<int>(x.size()); ++b) {
    const int ob = l.origin[b];
    if (ob < 0) continue;
    RMatrix xb = l.linear[b] ? RMatrix(x[b].col(0).asDiagonal()) : x[b];
    real[ob] += l.basis[b] * xb * l.basis[b].transpose();
  }
  std::vector<CMatrix> out(p.num_blocks());
  for (int ob = 0; ob < p.num_blocks(); ++ob) {
    const auto& blk = p.blocks()[ob];
    if (blk.kind != BlockKind::Hermitian) {
      out[ob] = real[ob].cast<Complex>();
      continue;
    }
    const int d = blk.dim;
    const RMatrix& r = real[ob];
    CMatrix z(d, d);
    z.real() = r.topLeftCorner(d, d) + r.bottomRightCorner(d, d);
    z.imag() = r.bottomLeftCorner(d, d) - r.topRightCorner(d, d);
    out[ob] = 0.5 * (z + z.adjoint());
  }
  return out;
}

Solution finish(const ConicProgram& p, const Lmi& l, const IpmResult& r, SolveStatus status) {
  Solution s;
  s.status = status;
  s.iterations = r.iterations;
  RVector y = r.y.size() == l.m() ? r.y : RVector::Zero(l.m());
  s.y = l.y_offset + l.y_map * y;
  const double sign = p.sense() == Sense::Maximize ? 1.0 : -1.0;
  s.primal_value = p.evaluate_objective(s.y);
  s.dual_value = sign * (r.mult_obj + l.c0);
  s.multipliers = recover_multipliers(p, l, r.x);
  return s;
}

const char* outcome_name(IpmOutcome o) {
  switch (o) {
    case IpmOutcome::Converged: return "converged";
    case IpmOutcome::Relaxed: return "converged to relaxed tolerance";
    case IpmOutcome::LmiInfeasible: return "multipliers diverged";
    case IpmOutcome::LmiUnbounded: return "variables diverged";
    case IpmOutcome::Stalled: return "stalled";
    case IpmOutcome::MaxIter: return "iteration limit";
    case IpmOutcome::Failed: return "numerical failure";
  }
  return "";
}

}  // namespace

Solution solve(const ConicProgram& program, const SolverOptions& opt) {
  Lmi l = build_lmi(program);
  auto fail = [&](SolveStatus st, const std::string& msg) {
    Solution s;
    s.status = st;
    s.message = msg;
    s.y = RVector::Zero(program.num_variables());
    s.multipliers.resize(program.num_blocks());
    for (int b = 0; b < program.num_blocks(); ++b) {
      int n = program.block_dim(b);
      s.multipliers[b] = CMatrix::Zero(n, n);
    }
    const bool inf = st == SolveStatus::Infeasible;
    const bool maxi = program.sense() == Sense::Maximize;
    double v = std::numeric_limits<double>::infinity();
    if (inf == maxi) v = -v;
    if (st == SolveStatus::Infeasible || st == SolveStatus::Unbounded) s.primal_value = s.dual_value = v;
    return s;
  };

  // Light presolve: equalities, zero rows, constant blocks, dependent variables.
  PresolveInfo pre = presolve(l, false);
  if (pre.result == PresolveResult::Infeasible) return fail(SolveStatus::Infeasible, pre.message);
  {
    PresolveInfo rows;
    // Only rows that vanish identically; zero-diagonal rows are left for the reduction stage.
    for (int b = l.nb() - 1; b >= 0; --b) {
      const int n = l.dim[b];
      std::vector<char> nz(n, 0);
      auto mark = [&](const SpMat& s) {
        for (int k = 0; k < s.outerSize(); ++k)
          for (SpMat::InnerIterator it(s, k); it; ++it) nz[it.row()] = 1;
      };
      bool has_var = false;
      for (int i = 0; i < l.m(); ++i) {
        if (l.f[i][b].nonZeros()) has_var = true;
        mark(l.f[i][b]);
      }
      if (!has_var) {
        RMatrix f0 = RMatrix(l.f0[b]);
        if (l.linear[b]) {
          if (f0.diagonal().minCoeff() < -1e-12) return fail(SolveStatus::Infeasible, "constant linear constraint is violated");
        } else {
          Eigen::SelfAdjointEigenSolver<RMatrix> es(f0, Eigen::EigenvaluesOnly);
          double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
          if (es.eigenvalues()(0) < -1e-10 * scale) {
            return fail(SolveStatus::Infeasible, "a constant block is not positive semidefinite");
          }
        }
        remove_block(l, b);
        continue;
      }
      if (!l.linear[b]) mark(l.f0[b]);
      std::vector<int> keep;
      for (int r = 0; r < n; ++r) {
        if (nz[r]) {
          keep.push_back(r);
        } else if (l.linear[b] && l.f0[b].coeff(r, r) < -1e-12) {
          return fail(SolveStatus::Infeasible, "constant linear constraint is violated");
        }
      }
      if (static_cast<int>(keep.size()) < n) restrict_block(l, b, selection(n, keep));
      if (l.dim[b] == 0) remove_block(l, b);
    }
  }
  const bool maybe_unbounded = pre.result == PresolveResult::Unbounded;
  const Lmi p1 = l;

  int fr_steps = 0;
  std::string notes;
  auto note = [&](const std::string& s) {
    if (!notes.empty()) notes += "; ";
    notes += s;
  };
  auto log = [&](const std::string& s) {
    if (opt.verbosity > 0) std::fprintf(stderr, "[solver] %s\n", s.c_str());
  };

  // Feasibility phase on the lightly presolved program, then reductions.
  // Returns true when the program is known to be infeasible (status in out).
  auto feasibility = [&](Lmi& cur, Solution& out) -> bool {
    PhaseOne ph = phase_one(p1, opt);
    log("phase one t = " + std::to_string(ph.t) + " (" + outcome_name(ph.ipm.outcome) + ")");
    if (ph.t > 1e-6 && ph.certificate) {
      IpmResult r;
      r.x = ph.x;
      r.iterations = ph.ipm.iterations;
      out = finish(program, p1, r, SolveStatus::Infeasible);
      out.certificate_verified = true;
      const double inf = std::numeric_limits<double>::infinity();
      out.primal_value = out.dual_value = program.sense() == Sense::Maximize ? -inf : inf;
      out.message = "infeasible: phase one value " + std::to_string(ph.t);
      out.y = RVector::Zero(program.num_variables());
      return true;
    }
    cur = p1;
    if (ph.t < -1e-7 || !opt.facial_reduction) return false;
    // No strictly feasible point: reduce to the minimal face.
    PresolveInfo info = presolve(cur, true);
    if (info.result == PresolveResult::Infeasible) {
      out = fail(SolveStatus::Infeasible, info.message);
      return true;
    }
    // Face equations inherit the multiplier's error, so solve these tightly.
    SolverOptions tight = opt;
    tight.gap_tol = std::min(opt.gap_tol, 1e-12);
    tight.feas_tol = std::min(opt.feas_tol, 1e-12);
    for (int round = 0; round < 6; ++round) {
      PhaseOne q = phase_one(cur, tight);
      log("reduced phase one t = " + std::to_string(q.t));
      if (q.t < -1e-7) break;
      if (q.t > 1e-6) {
        out = fail(SolveStatus::Infeasible, "infeasible after facial reduction");
        out.iterations = q.ipm.iterations;
        return true;
      }
      // An inexact multiplier perturbs the face equations; when they come out
      // inconsistent, expose only the better resolved directions.
      const Lmi before = cur;
      bool exposed = false;
      for (double cut : {1e-5, 1e-3, 1e-1}) {
        cur = before;
        if (!expose_face(cur, q.x, cut)) break;
        exposed = true;
        info = presolve(cur, true, true);
        if (info.result != PresolveResult::Infeasible) break;
        log("face equations inconsistent at cut " + std::to_string(cut));
      }
      if (!exposed) {
        cur = before;
        break;
      }
      ++fr_steps;
      if (info.result == PresolveResult::Infeasible) {
        out = fail(SolveStatus::Infeasible, "infeasible after facial reduction: " + info.message);
        return true;
      }
    }
    return false;
  };

  Lmi cur = l;
  bool phase_done = false;
  if (opt.phase_one_first || maybe_unbounded) {
    Solution out;
    if (feasibility(cur, out)) {
      out.facial_reduction_steps = fr_steps;
      return out;
    }
    phase_done = true;
    if (maybe_unbounded) {
      Solution s = fail(SolveStatus::Unbounded, pre.message);
      return s;
    }
  }

  IpmResult r = Ipm(cur, opt).run();
  log(std::string("main solve: ") + outcome_name(r.outcome) + " after " + std::to_string(r.iterations) + " iterations");
  if (r.outcome != IpmOutcome::Converged && !phase_done) {
    Solution out;
    if (feasibility(cur, out)) {
      out.facial_reduction_steps = fr_steps;
      return out;
    }
    note(std::string("first attempt ") + outcome_name(r.outcome));
    IpmResult r2 = Ipm(cur, opt).run();
    log(std::string("second solve: ") + outcome_name(r2.outcome));
    auto rank = [](IpmOutcome o) { return o == IpmOutcome::Converged ? 0 : o == IpmOutcome::Relaxed ? 1 : 2; };
    if (rank(r2.outcome) <= rank(r.outcome)) r = r2;
  }

  SolveStatus st = SolveStatus::Unknown;
  if (r.outcome == IpmOutcome::Converged || r.outcome == IpmOutcome::Relaxed) {
    st = SolveStatus::Optimal;
  } else if (r.outcome == IpmOutcome::LmiUnbounded && r.lmi_obj > 1e8) {
    st = SolveStatus::Unbounded;
  }
  Solution s = finish(program, cur, r, st);
  if (st == SolveStatus::Unbounded) {
    const double inf = std::numeric_limits<double>::infinity();
    s.primal_value = s.dual_value = program.sense() == Sense::Maximize ? inf : -inf;
  }
  s.facial_reduction_steps = fr_steps;
  note(outcome_name(r.outcome));
  char buf[160];
  std::snprintf(buf, sizeof buf, " (gap %.1e, primal residual %.1e, dual residual %.1e)", r.relgap, r.pinf, r.dinf);
  s.message = notes + buf;
  return s;
}

}  // namespace ncg
