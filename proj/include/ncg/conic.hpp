#pragma once

// Linear matrix inequality programs over scalar variables and a primal-dual
// interior-point solver for them.
//
// A program has real variables y, a linear objective, linear equalities, and
// blocks F_b(y) = F_b0 + sum_i y_i F_bi that must be positive semidefinite.
// Blocks are complex Hermitian, real symmetric, or "linear" (a vector of
// scalar affine expressions that must be nonnegative).

#include "ncg/operator_core.hpp"

#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace ncg {

enum class BlockKind { Hermitian, RealSymmetric, Linear };
enum class Sense { Minimize, Maximize };
enum class SolveStatus { Optimal, Infeasible, Unbounded, Unknown };

const char* to_string(SolveStatus s);

class ConicProgram {
 public:
  int add_variable(std::string name = {});
  int num_variables() const { return static_cast<int>(var_names_.size()); }
  const std::string& variable_name(int i) const { return var_names_.at(i); }

  /// Linear blocks have `dim` scalar rows, each constrained to be >= 0.
  int add_block(BlockKind kind, int dim, std::string name = {});
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  BlockKind block_kind(int b) const { return blocks_.at(b).kind; }
  int block_dim(int b) const { return blocks_.at(b).dim; }
  const std::string& block_name(int b) const { return blocks_.at(b).name; }

  /// Adds m to the constant term (var = -1) or to the coefficient of variable
  /// var. Only the upper triangle of m is read; m must be Hermitian (real
  /// symmetric for RealSymmetric blocks). Linear blocks take a dim x 1 column
  /// or a diagonal matrix.
  void add_term(int block, int var, const CMatrix& m);
  void add_entry(int block, int var, int row, int col, Complex value);

  /// sum_j coeffs[j].second * y[coeffs[j].first] = rhs.
  void add_equality(const std::vector<std::pair<int, double>>& coeffs, double rhs);

  void set_objective(Sense sense, const RVector& c, double constant = 0.0);
  void set_objective_coefficient(int var, double c);
  Sense sense() const { return sense_; }
  double objective_constant() const { return objective_constant_; }
  double objective_coefficient(int var) const;

  /// Evaluates F_b(y); Linear blocks come back as a diagonal matrix.
  CMatrix evaluate_block(int block, const RVector& y) const;
  double evaluate_objective(const RVector& y) const;

  /// Deterministic JSON description (blocks, sparse triplets, equalities).
  std::string to_json() const;

  struct Key {
    int var;
    int row;
    int col;
    bool operator<(const Key& o) const { return std::tie(var, row, col) < std::tie(o.var, o.row, o.col); }
  };
  struct Block {
    BlockKind kind;
    int dim;
    std::string name;
    std::map<Key, Complex> entries;  ///< upper triangle, var = -1 for the constant
  };
  struct Equality {
    std::vector<std::pair<int, double>> coeffs;
    double rhs;
  };
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<Equality>& equalities() const { return equalities_; }

 private:
  std::vector<std::string> var_names_;
  std::vector<Block> blocks_;
  std::vector<Equality> equalities_;
  std::map<int, double> objective_;
  double objective_constant_ = 0.0;
  Sense sense_ = Sense::Minimize;
};

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  /// Results that stall between this and the tolerances above still count as optimal.
  double relaxed_tol = 1e-6;
  int max_iterations = 150;
  /// Run the feasibility phase before the main solve (needed to certify
  /// infeasibility and to reduce programs without a strictly feasible point).
  bool phase_one_first = false;
  bool facial_reduction = true;
  int verbosity = 0;

  /// Defaults overridden by NCG_GAP_TOL, NCG_FEAS_TOL, NCG_MAX_ITER, NCG_VERBOSE.
  static SolverOptions from_env();
};

struct Solution {
  SolveStatus status = SolveStatus::Unknown;
  /// Objective of the program at y (including the constant).
  double primal_value = 0.0;
  /// Objective of the Lagrange dual at the returned multipliers.
  double dual_value = 0.0;
  RVector y;
  /// Multiplier for each block, in the block's own space (real matrices are
  /// stored with zero imaginary part; Linear blocks as a diagonal matrix).
  /// For INFEASIBLE results these form the Farkas certificate:
  /// <F_bi, Z_b> summed over blocks is ~0 for every i and the constant pairing is < 0.
  std::vector<CMatrix> multipliers;
  bool certificate_verified = false;
  int iterations = 0;
  int facial_reduction_steps = 0;
  std::string message;

  double gap() const { return std::abs(primal_value - dual_value); }
};

Solution solve(const ConicProgram& program, const SolverOptions& options = SolverOptions::from_env());

}  // namespace ncg
