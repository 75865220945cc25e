#include "ncg/operator_core.hpp"

#include <algorithm>
#include <cmath>

namespace ncg {

namespace {

const double kSqrtHalf = std::sqrt(0.5);

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square");
  }
}

void require_shape(const CMatrix& x, BipartiteShape shape, const char* what) {
  require_square(x, what);
  if (shape.dim_a <= 0 || shape.dim_b <= 0 || x.rows() != shape.total()) {
    throw DimensionError(std::string(what) + ": matrix dimension " + std::to_string(x.rows()) +
                         " does not match bipartite shape " + std::to_string(shape.dim_a) + "x" +
                         std::to_string(shape.dim_b));
  }
}

double hermitian_defect(const CMatrix& m) {
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

// Gram-Schmidt with one re-orthogonalisation pass. Vectors whose residual
// falls below `cutoff` are dropped.
void gram_schmidt_append(std::vector<RVector>& accepted, RVector v, double cutoff) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& q : accepted) v -= q.dot(v) * q;
  }
  double n = v.norm();
  if (n > cutoff) accepted.push_back(v / n);
}

OperatorSubspace from_coordinates(int d, const std::vector<RVector>& coords) {
  std::vector<HermitianMatrix> basis;
  basis.reserve(coords.size());
  for (const auto& c : coords) basis.push_back(HermitianMatrix::hermitian_part(unhvec(c, d)));
  return OperatorSubspace::from_orthonormal(d, std::move(basis));
}

}  // namespace

// --- HermitianMatrix --------------------------------------------------------

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol) {
  require_square(m, "HermitianMatrix");
  if (hermitian_defect(m) > tol) {
    throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& m) {
  require_square(m, "HermitianMatrix::hermitian_part");
  return HermitianMatrix(CMatrix(0.5 * (m + m.adjoint())), Unchecked{});
}

// --- OperatorSubspace --------------------------------------------------------

OperatorSubspace::OperatorSubspace(int ambient_dim) : ambient_dim_(ambient_dim) {
  if (ambient_dim <= 0) throw DimensionError("OperatorSubspace: ambient dimension must be positive");
}

OperatorSubspace OperatorSubspace::from_orthonormal(int ambient_dim,
                                                    std::vector<HermitianMatrix> basis) {
  OperatorSubspace s(ambient_dim);
  for (const auto& b : basis) {
    if (b.dim() != ambient_dim) throw DimensionError("OperatorSubspace: basis dimension mismatch");
  }
  for (size_t i = 0; i < basis.size(); ++i) {
    for (size_t j = i; j < basis.size(); ++j) {
      double g = std::abs(hs_inner(basis[i], basis[j]) - (i == j ? 1.0 : 0.0));
      if (g > 1e-9) throw std::invalid_argument("OperatorSubspace: basis is not orthonormal");
    }
  }
  s.basis_ = std::move(basis);
  return s;
}

bool OperatorSubspace::is_trace_free(double tol) const {
  return std::all_of(basis_.begin(), basis_.end(),
                     [tol](const HermitianMatrix& b) { return std::abs(b.matrix().trace()) < tol; });
}

CMatrix OperatorSubspace::project(const CMatrix& x) const {
  if (x.rows() != ambient_dim_ || x.cols() != ambient_dim_) {
    throw DimensionError("OperatorSubspace::project: dimension mismatch");
  }
  CMatrix out = CMatrix::Zero(ambient_dim_, ambient_dim_);
  for (const auto& b : basis_) out += hs_inner(b, x) * b.matrix();
  return out;
}

CMatrix OperatorSubspace::projector() const {
  const int n = ambient_dim_ * ambient_dim_;
  CMatrix p = CMatrix::Zero(n, n);
  for (const auto& b : basis_) {
    Eigen::Map<const CVector> v(b.matrix().data(), n);
    p += v * v.adjoint();
  }
  return p;
}

RMatrix OperatorSubspace::coordinates() const {
  RMatrix q(ambient_dim_ * ambient_dim_, dim());
  for (int i = 0; i < dim(); ++i) q.col(i) = hvec(basis_[i]);
  return q;
}

// --- Hermitian coordinates ---------------------------------------------------

std::vector<HermitianMatrix> standard_hermitian_basis(int d) {
  std::vector<HermitianMatrix> out;
  out.reserve(static_cast<size_t>(d) * d);
  for (int k = 0; k < d; ++k) out.push_back(HermitianMatrix::hermitian_part(matrix_unit(d, k, k)));
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      CMatrix re = CMatrix::Zero(d, d);
      re(k, l) = re(l, k) = kSqrtHalf;
      CMatrix im = CMatrix::Zero(d, d);
      im(k, l) = Complex(0, kSqrtHalf);
      im(l, k) = Complex(0, -kSqrtHalf);
      out.push_back(HermitianMatrix::hermitian_part(re));
      out.push_back(HermitianMatrix::hermitian_part(im));
    }
  }
  return out;
}

RVector hvec(const CMatrix& h) {
  require_square(h, "hvec");
  const int d = static_cast<int>(h.rows());
  RVector v(d * d);
  int idx = 0;
  for (int k = 0; k < d; ++k) v(idx++) = h(k, k).real();
  const double s2 = std::sqrt(2.0);
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      // Average the two triangles so slightly non-Hermitian input projects cleanly.
      Complex z = 0.5 * (h(k, l) + std::conj(h(l, k)));
      v(idx++) = s2 * z.real();
      v(idx++) = s2 * z.imag();
    }
  }
  return v;
}

CMatrix unhvec(const RVector& v, int d) {
  if (v.size() != d * d) throw DimensionError("unhvec: coordinate length mismatch");
  CMatrix h = CMatrix::Zero(d, d);
  int idx = 0;
  for (int k = 0; k < d; ++k) h(k, k) = v(idx++);
  for (int k = 0; k < d; ++k) {
    for (int l = k + 1; l < d; ++l) {
      double re = v(idx++) * kSqrtHalf;
      double im = v(idx++) * kSqrtHalf;
      h(k, l) = Complex(re, im);
      h(l, k) = Complex(re, -im);
    }
  }
  return h;
}

// --- Basic algebra -------------------------------------------------------------

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Complex hs_inner(const CMatrix& x, const CMatrix& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("hs_inner: shape mismatch");
  return (x.conjugate().cwiseProduct(y)).sum();
}

CMatrix matrix_unit(int d, int row, int col) {
  CMatrix e = CMatrix::Zero(d, d);
  e(row, col) = 1.0;
  return e;
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMatrix pauli_y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMatrix pauli_z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CVector max_entangled(int d) {
  CVector phi = CVector::Zero(d * d);
  for (int i = 0; i < d; ++i) phi(i * d + i) = 1.0;
  return phi;
}

CMatrix max_entangled_projector(int d) {
  CVector phi = max_entangled(d);
  return phi * phi.adjoint();
}

CMatrix swap_operator(int d) {
  CMatrix s = CMatrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) s(j * d + i, i * d + j) = 1.0;
  }
  return s;
}

// --- Subspace operations -----------------------------------------------------

OperatorSubspace orthonormalize(const std::vector<CMatrix>& spanning, double tol) {
  if (spanning.empty()) {
    throw std::invalid_argument("orthonormalize: empty spanning set needs an explicit ambient dimension");
  }
  return orthonormalize(static_cast<int>(spanning.front().rows()), spanning, tol);
}

OperatorSubspace orthonormalize(int ambient_dim, const std::vector<CMatrix>& spanning, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("orthonormalize: tolerance must be positive");
  double scale = 0.0;
  for (const auto& x : spanning) {
    if (x.rows() != ambient_dim || x.cols() != ambient_dim) {
      throw DimensionError("orthonormalize: dimension mismatch among inputs");
    }
    scale = std::max(scale, x.norm());
  }
  std::vector<RVector> accepted;
  if (scale == 0.0) return OperatorSubspace(ambient_dim);
  const double cutoff = tol * scale;
  const Complex i_unit(0, 1);
  for (const auto& x : spanning) {
    CMatrix herm = x + x.adjoint();
    CMatrix anti = i_unit * (x - x.adjoint());
    gram_schmidt_append(accepted, hvec(herm), cutoff);
    gram_schmidt_append(accepted, hvec(anti), cutoff);
  }
  return from_coordinates(ambient_dim, accepted);
}

bool contains(const OperatorSubspace& s, const CMatrix& x, double tol) {
  double nx = x.norm();
  if (nx == 0.0) return true;
  return (x - s.project(x)).norm() <= tol * nx;
}

OperatorSubspace perp(const OperatorSubspace& s) {
  const int d = s.ambient_dim();
  const int n = d * d;
  const int target = n - s.dim();
  RMatrix q = s.coordinates();
  // Column-pivoted Gram-Schmidt over the standard basis keeps sparse
  // complements sparse (e.g. the complement of a coordinate-aligned space).
  RMatrix residual = RMatrix::Identity(n, n);
  if (s.dim() > 0) {
    residual -= q * (q.transpose() * residual);
    residual -= q * (q.transpose() * residual);
  }
  std::vector<RVector> accepted;
  std::vector<bool> used(n, false);
  while (static_cast<int>(accepted.size()) < target) {
    int best = -1;
    double best_norm = 0.0;
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      double nc = residual.col(c).norm();
      if (nc > best_norm * (1.0 + 1e-12)) {
        best_norm = nc;
        best = c;
      }
    }
    if (best < 0 || best_norm < 1e-7) break;
    used[best] = true;
    RVector v = residual.col(best) / best_norm;
    for (const auto& a : accepted) v -= a.dot(v) * a;
    v.normalize();
    accepted.push_back(v);
    residual -= v * (v.transpose() * residual);
  }
  return from_coordinates(d, accepted);
}

OperatorSubspace tensor_space(const OperatorSubspace& s, const OperatorSubspace& t) {
  std::vector<HermitianMatrix> basis;
  basis.reserve(static_cast<size_t>(s.dim()) * t.dim());
  for (const auto& a : s.basis()) {
    for (const auto& b : t.basis()) basis.push_back(HermitianMatrix::hermitian_part(kron(a, b)));
  }
  return OperatorSubspace::from_orthonormal(s.ambient_dim() * t.ambient_dim(), std::move(basis));
}

OperatorSubspace conj_space(const OperatorSubspace& s) {
  std::vector<HermitianMatrix> basis;
  basis.reserve(s.dim());
  for (const auto& b : s.basis()) basis.push_back(HermitianMatrix::hermitian_part(b.matrix().conjugate()));
  return OperatorSubspace::from_orthonormal(s.ambient_dim(), std::move(basis));
}

OperatorSubspace sum_space(const OperatorSubspace& s, const OperatorSubspace& t) {
  if (s.ambient_dim() != t.ambient_dim()) throw DimensionError("sum_space: ambient dimension mismatch");
  std::vector<RVector> accepted;
  for (const auto* space : {&s, &t}) {
    for (const auto& b : space->basis()) gram_schmidt_append(accepted, hvec(b), kBasisTol);
  }
  return from_coordinates(s.ambient_dim(), accepted);
}

double projector_distance(const OperatorSubspace& s, const OperatorSubspace& t) {
  if (s.ambient_dim() != t.ambient_dim()) throw DimensionError("projector_distance: ambient mismatch");
  // ||P_s - P_t||^2 = ||(1 - P_t) Q_s||^2 + ||(1 - P_s) Q_t||^2, which avoids
  // the cancellation in dim(s) + dim(t) - 2 ||Q_s^T Q_t||^2.
  RMatrix qs = s.coordinates();
  RMatrix qt = t.coordinates();
  auto residual = [](const RMatrix& a, const RMatrix& b) {
    if (a.cols() == 0) return 0.0;
    if (b.cols() == 0) return a.squaredNorm();
    return (a - b * (b.transpose() * a)).squaredNorm();
  };
  return std::sqrt(residual(qs, qt) + residual(qt, qs));
}

bool same_subspace(const OperatorSubspace& s, const OperatorSubspace& t, double tol) {
  return s.ambient_dim() == t.ambient_dim() && projector_distance(s, t) < tol;
}

bool is_subspace_of(const OperatorSubspace& s, const OperatorSubspace& t, double tol) {
  if (s.ambient_dim() != t.ambient_dim()) return false;
  if (s.is_zero()) return true;
  if (t.is_zero()) return false;
  RMatrix qs = s.coordinates();
  RMatrix qt = t.coordinates();
  return (qs - qt * (qt.transpose() * qs)).norm() < tol;
}

OperatorSubspace full_space(int d) {
  return OperatorSubspace::from_orthonormal(d, standard_hermitian_basis(d));
}

OperatorSubspace span_of(const CMatrix& x) {
  require_square(x, "span_of");
  return orthonormalize(static_cast<int>(x.rows()), {x});
}

// --- Bipartite superoperators -------------------------------------------------

CMatrix partial_trace(const CMatrix& x, BipartiteShape shape, Factor traced) {
  require_shape(x, shape, "partial_trace");
  const int da = shape.dim_a;
  const int db = shape.dim_b;
  if (traced == Factor::A) {
    CMatrix out = CMatrix::Zero(db, db);
    for (int a = 0; a < da; ++a) out += x.block(a * db, a * db, db, db);
    return out;
  }
  CMatrix out(da, da);
  for (int a = 0; a < da; ++a) {
    for (int ap = 0; ap < da; ++ap) out(a, ap) = x.block(a * db, ap * db, db, db).trace();
  }
  return out;
}

CMatrix partial_transpose(const CMatrix& x, BipartiteShape shape, Factor transposed) {
  require_shape(x, shape, "partial_transpose");
  const int da = shape.dim_a;
  const int db = shape.dim_b;
  CMatrix out(x.rows(), x.cols());
  for (int a = 0; a < da; ++a) {
    for (int ap = 0; ap < da; ++ap) {
      if (transposed == Factor::B) {
        out.block(a * db, ap * db, db, db) = x.block(a * db, ap * db, db, db).transpose();
      } else {
        out.block(a * db, ap * db, db, db) = x.block(ap * db, a * db, db, db);
      }
    }
  }
  return out;
}

CMatrix rot(const CMatrix& x, BipartiteShape shape) {
  require_shape(x, shape, "rot");
  if (shape.dim_a != shape.dim_b) throw DimensionError("rot: factors must have equal dimension");
  const int d = shape.dim_a;
  CMatrix out(x.rows(), x.cols());
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) out(i * d + j, k * d + l) = x(i * d + k, j * d + l);
      }
    }
  }
  return out;
}

CMatrix ddag(const CMatrix& x, BipartiteShape shape) {
  return rot(CMatrix(rot(x, shape).adjoint()), shape);
}

RMatrix realify(const HermitianMatrix& h) {
  const auto& m = h.matrix();
  const Eigen::Index n = m.rows();
  RMatrix out(2 * n, 2 * n);
  RMatrix re = m.real();
  RMatrix im = m.imag();
  out.topLeftCorner(n, n) = re;
  out.topRightCorner(n, n) = -im;
  out.bottomLeftCorner(n, n) = im;
  out.bottomRightCorner(n, n) = re;
  return out;
}

RMatrix realify(const CMatrix& h) { return realify(HermitianMatrix(h)); }

double min_eigenvalue(const CMatrix& h) {
  require_square(h, "min_eigenvalue");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double operator_norm(const CMatrix& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(x);
  return svd.singularValues()(0);
}

}  // namespace ncg
