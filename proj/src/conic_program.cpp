#include "ncg/conic.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace ncg {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::Unbounded: return "UNBOUNDED";
    case SolveStatus::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

int ConicProgram::add_variable(std::string name) {
  if (name.empty()) name = "y" + std::to_string(var_names_.size());
  var_names_.push_back(std::move(name));
  return num_variables() - 1;
}

int ConicProgram::add_block(BlockKind kind, int dim, std::string name) {
  if (dim <= 0) throw DimensionError("ConicProgram::add_block: dimension must be positive");
  if (name.empty()) name = "block" + std::to_string(blocks_.size());
  blocks_.push_back(Block{kind, dim, std::move(name), {}});
  return num_blocks() - 1;
}

void ConicProgram::add_entry(int block, int var, int row, int col, Complex value) {
  auto& b = blocks_.at(block);
  if (var < -1 || var >= num_variables()) throw std::out_of_range("ConicProgram: unknown variable");
  if (row < 0 || col < 0 || row >= b.dim || col >= b.dim) throw std::out_of_range("ConicProgram: entry out of range");
  if (b.kind == BlockKind::Linear && row != col) throw std::invalid_argument("ConicProgram: linear blocks are diagonal");
  if (b.kind != BlockKind::Hermitian && value.imag() != 0.0) {
    throw std::invalid_argument("ConicProgram: complex entry in a real block");
  }
  if (row > col) {
    std::swap(row, col);
    value = std::conj(value);
  }
  if (row == col && value.imag() != 0.0) throw std::invalid_argument("ConicProgram: complex diagonal entry");
  if (value == Complex(0.0)) return;
  Complex& slot = b.entries[Key{var, row, col}];
  slot += value;
  if (slot == Complex(0.0)) b.entries.erase(Key{var, row, col});
}

void ConicProgram::add_term(int block, int var, const CMatrix& m) {
  const auto& b = blocks_.at(block);
  if (b.kind == BlockKind::Linear) {
    if (m.cols() == 1 && m.rows() == b.dim) {
      for (int k = 0; k < b.dim; ++k) add_entry(block, var, k, k, m(k, 0));
      return;
    }
    if (m.rows() != b.dim || m.cols() != b.dim) throw DimensionError("ConicProgram::add_term: shape mismatch");
    for (int k = 0; k < b.dim; ++k) add_entry(block, var, k, k, m(k, k));
    return;
  }
  if (m.rows() != b.dim || m.cols() != b.dim) throw DimensionError("ConicProgram::add_term: shape mismatch");
  double scale = m.cwiseAbs().maxCoeff();
  if (scale == 0.0) return;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale)) {
    throw std::invalid_argument("ConicProgram::add_term: matrix is not Hermitian");
  }
  // Drop round-off so structurally zero entries stay zero.
  const double cut = 1e-14 * scale;
  for (int r = 0; r < b.dim; ++r) {
    for (int c = r; c < b.dim; ++c) {
      Complex v = (r == c) ? Complex(m(r, r).real(), 0.0) : 0.5 * (m(r, c) + std::conj(m(c, r)));
      if (b.kind == BlockKind::RealSymmetric) v = v.real();
      if (std::abs(v.real()) <= cut) v = Complex(0.0, v.imag());
      if (std::abs(v.imag()) <= cut) v = Complex(v.real(), 0.0);
      if (v != Complex(0.0)) add_entry(block, var, r, c, v);
    }
  }
}

void ConicProgram::add_equality(const std::vector<std::pair<int, double>>& coeffs, double rhs) {
  for (const auto& [v, a] : coeffs) {
    if (v < 0 || v >= num_variables()) throw std::out_of_range("ConicProgram::add_equality: unknown variable");
    (void)a;
  }
  equalities_.push_back({coeffs, rhs});
}

void ConicProgram::set_objective(Sense sense, const RVector& c, double constant) {
  if (c.size() != num_variables()) throw DimensionError("ConicProgram::set_objective: length mismatch");
  sense_ = sense;
  objective_constant_ = constant;
  objective_.clear();
  for (int i = 0; i < c.size(); ++i)
    if (c(i) != 0.0) objective_[i] = c(i);
}

void ConicProgram::set_objective_coefficient(int var, double c) {
  if (var < 0 || var >= num_variables()) throw std::out_of_range("ConicProgram: unknown variable");
  if (c == 0.0) {
    objective_.erase(var);
  } else {
    objective_[var] = c;
  }
}

double ConicProgram::objective_coefficient(int var) const {
  auto it = objective_.find(var);
  return it == objective_.end() ? 0.0 : it->second;
}

CMatrix ConicProgram::evaluate_block(int block, const RVector& y) const {
  const auto& b = blocks_.at(block);
  if (y.size() != num_variables()) throw DimensionError("ConicProgram::evaluate_block: length mismatch");
  CMatrix out = CMatrix::Zero(b.dim, b.dim);
  for (const auto& [key, v] : b.entries) {
    double w = key.var < 0 ? 1.0 : y(key.var);
    out(key.row, key.col) += w * v;
    if (key.row != key.col) out(key.col, key.row) += w * std::conj(v);
  }
  return out;
}

double ConicProgram::evaluate_objective(const RVector& y) const {
  double v = objective_constant_;
  for (const auto& [i, c] : objective_) v += c * y(i);
  return v;
}

std::string ConicProgram::to_json() const {
  using nlohmann::json;
  json j;
  j["sense"] = sense_ == Sense::Minimize ? "minimize" : "maximize";
  j["variables"] = var_names_;
  json obj = json::array();
  for (const auto& [i, c] : objective_) obj.push_back({i, c});
  j["objective"] = {{"constant", objective_constant_}, {"coefficients", obj}};
  json blocks = json::array();
  for (const auto& b : blocks_) {
    const char* kind = b.kind == BlockKind::Hermitian ? "hermitian"
                       : b.kind == BlockKind::RealSymmetric ? "real_symmetric" : "linear";
    json entries = json::array();
    for (const auto& [key, v] : b.entries) entries.push_back({key.var, key.row, key.col, v.real(), v.imag()});
    blocks.push_back({{"name", b.name}, {"kind", kind}, {"dim", b.dim}, {"entries", entries}});
  }
  j["blocks"] = blocks;
  json eqs = json::array();
  for (const auto& e : equalities_) {
    json row = json::array();
    for (const auto& [v, a] : e.coeffs) row.push_back({v, a});
    eqs.push_back({{"coefficients", row}, {"rhs", e.rhs}});
  }
  j["equalities"] = eqs;
  return j.dump(1);
}

SolverOptions SolverOptions::from_env() {
  SolverOptions o;
  if (const char* s = std::getenv("NCG_GAP_TOL")) o.gap_tol = std::strtod(s, nullptr);
  if (const char* s = std::getenv("NCG_FEAS_TOL")) o.feas_tol = std::strtod(s, nullptr);
  if (const char* s = std::getenv("NCG_MAX_ITER")) o.max_iterations = std::atoi(s);
  if (const char* s = std::getenv("NCG_VERBOSE")) o.verbosity = std::atoi(s);
  if (!(o.gap_tol > 0) || !(o.feas_tol > 0) || o.max_iterations <= 0) {
    throw std::invalid_argument("SolverOptions: invalid tolerance override in environment");
  }
  return o;
}

}  // namespace ncg
