#pragma once

// Dense complex operator algebra: Hermitian matrices, Hermitian-basis operator
// subspaces, and the bipartite superoperators (partial trace, partial transpose,
// rot, double dagger) used by every graph construction and SDP in the library.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncg {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Thrown on any shape or size inconsistency between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kBasisTol = 1e-9;
inline constexpr double kSubspaceEqualTol = 1e-8;

/// A square complex matrix H with H = H^dagger.
///
/// Construction checks the Hermitian property entrywise, relative to the
/// largest entry magnitude, and then stores the exact Hermitian part so that
/// downstream code may rely on exact symmetry.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m, double tol = kHermitianTol);

  /// (m + m^dagger)/2 without any check.
  static HermitianMatrix hermitian_part(const CMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  operator const CMatrix&() const { return m_; }

 private:
  struct Unchecked {};
  HermitianMatrix(CMatrix m, Unchecked) : m_(std::move(m)) {}
  CMatrix m_;
};

/// Factorisation A (x) B of a Hilbert space; index (a, b) maps to a * dim_b + b.
struct BipartiteShape {
  int dim_a = 1;
  int dim_b = 1;
  int total() const { return dim_a * dim_b; }
};

enum class Factor { A, B };

/// A dagger-closed subspace of d x d complex matrices, stored as a basis of
/// Hermitian matrices that is orthonormal under <X, Y> = Tr(X^dagger Y).
class OperatorSubspace {
 public:
  /// The zero subspace of L(C^ambient_dim).
  explicit OperatorSubspace(int ambient_dim = 1);

  /// Adopts a basis that is already Hermitian and orthonormal; validated to 1e-9.
  static OperatorSubspace from_orthonormal(int ambient_dim, std::vector<HermitianMatrix> basis);

  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  bool is_zero() const { return basis_.empty(); }
  const std::vector<HermitianMatrix>& basis() const { return basis_; }

  bool is_trace_free(double tol = kBasisTol) const;

  /// Orthogonal projection of X onto the (complex) span.
  CMatrix project(const CMatrix& x) const;

  /// The d^2 x d^2 superoperator matrix of the orthogonal projector, acting on
  /// column-stacked vec(X).
  CMatrix projector() const;

  /// Real coordinates (see hvec) of the basis, one column per basis element.
  RMatrix coordinates() const;

 private:
  int ambient_dim_;
  std::vector<HermitianMatrix> basis_;
};

// --- Hermitian coordinates -------------------------------------------------

/// Orthonormal Hermitian basis of L(C^d): E_kk, then for k < l the pair
/// (E_kl + E_lk)/sqrt2, i(E_kl - E_lk)/sqrt2.
std::vector<HermitianMatrix> standard_hermitian_basis(int d);

/// Coordinates of a Hermitian matrix in standard_hermitian_basis; an isometry
/// from (Herm(d), Re Tr(X^dagger Y)) onto R^{d^2}.
RVector hvec(const CMatrix& h);
CMatrix unhvec(const RVector& v, int d);

// --- Basic algebra -----------------------------------------------------------

CMatrix kron(const CMatrix& a, const CMatrix& b);
Complex hs_inner(const CMatrix& x, const CMatrix& y);  ///< Tr(X^dagger Y)
CMatrix matrix_unit(int d, int row, int col);
CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
/// Unnormalised sum_i |i>|i> as a d^2-vector.
CVector max_entangled(int d);
/// |Phi><Phi| for the unnormalised Phi.
CMatrix max_entangled_projector(int d);
CMatrix swap_operator(int d);

// --- Subspace operations -----------------------------------------------------

/// Orthonormal Hermitian basis of the dagger-closure of span(spanning).
/// Each X contributes X + X^dagger and i(X - X^dagger); Gram-Schmidt drops
/// directions whose residual is below tol times the largest input norm.
OperatorSubspace orthonormalize(const std::vector<CMatrix>& spanning, double tol = kBasisTol);
OperatorSubspace orthonormalize(int ambient_dim, const std::vector<CMatrix>& spanning,
                                double tol = kBasisTol);

/// True iff ||X - P_S X|| <= tol ||X||; the zero matrix is always contained.
bool contains(const OperatorSubspace& s, const CMatrix& x, double tol = 1e-8);

/// Hilbert-Schmidt orthogonal complement inside L(C^d).
OperatorSubspace perp(const OperatorSubspace& s);

/// span{s (x) t}.
OperatorSubspace tensor_space(const OperatorSubspace& s, const OperatorSubspace& t);

/// Entrywise complex conjugate of every element.
OperatorSubspace conj_space(const OperatorSubspace& s);

/// Subspace sum, re-orthonormalised.
OperatorSubspace sum_space(const OperatorSubspace& s, const OperatorSubspace& t);

/// Frobenius distance between the two orthogonal projectors.
double projector_distance(const OperatorSubspace& s, const OperatorSubspace& t);
bool same_subspace(const OperatorSubspace& s, const OperatorSubspace& t,
                   double tol = kSubspaceEqualTol);
/// s contained in t (every basis element of s lies in t).
bool is_subspace_of(const OperatorSubspace& s, const OperatorSubspace& t, double tol = 1e-8);

/// L(C^d) itself.
OperatorSubspace full_space(int d);
/// The line spanned by a single nonzero matrix (dagger-closed).
OperatorSubspace span_of(const CMatrix& x);

// --- Bipartite superoperators -------------------------------------------------

CMatrix partial_trace(const CMatrix& x, BipartiteShape shape, Factor traced);
CMatrix partial_transpose(const CMatrix& x, BipartiteShape shape, Factor transposed);

/// Rotated transpose: |i><j| (x) |k><l|  ->  |i><k| (x) |j><l|; both factors
/// must have equal dimension.
CMatrix rot(const CMatrix& x, BipartiteShape shape);
/// X^ddag = rot(rot(X)^dagger).
CMatrix ddag(const CMatrix& x, BipartiteShape shape);

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]].
RMatrix realify(const HermitianMatrix& h);
RMatrix realify(const CMatrix& h);  ///< Throws if h is not Hermitian.

/// Smallest eigenvalue of a Hermitian matrix.
double min_eigenvalue(const CMatrix& h);
/// Operator norm (largest singular value).
double operator_norm(const CMatrix& x);

}  // namespace ncg
