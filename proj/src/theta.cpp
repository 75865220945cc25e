#include "ncg/theta.hpp"

#include <cmath>
#include <stdexcept>

namespace ncg {

const char* to_string(ConeId c) {
  switch (c) {
    case ConeId::PSD: return "psd";
    case ConeId::PPT: return "ppt";
    case ConeId::PSD_AND_PPT: return "psd-ppt";
  }
  return "psd";
}

ConeId parse_cone(const std::string& s) {
  if (s == "psd") return ConeId::PSD;
  if (s == "ppt") return ConeId::PPT;
  if (s == "psd-ppt" || s == "psd_and_ppt" || s == "psd+ppt") return ConeId::PSD_AND_PPT;
  throw std::invalid_argument("unknown cone '" + s + "' (expected psd, ppt or psd-ppt)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_trace_free(const OperatorSubspace& s, const char* who) {
  if (!s.is_trace_free()) throw std::invalid_argument(std::string(who) + ": subspace is not trace-free");
}

// Orthonormal basis of the traceless Hermitian d x d matrices.
std::vector<CMatrix> traceless_basis(int d) {
  const OperatorSubspace q = perp(span_of(CMatrix::Identity(d, d)));
  std::vector<CMatrix> out;
  for (const auto& h : q.basis()) out.push_back(h.matrix());
  return out;
}

// Hermitian basis of {sum t_ab s_a (x) conj(s_b) : t real symmetric}, the part of
// S (x) conj(S) on which rot is Hermitian.
struct SymBasis {
  std::vector<std::pair<int, int>> pairs;
  std::vector<CMatrix> v;
};

SymBasis sym_basis(const OperatorSubspace& s) {
  SymBasis out;
  const auto& b = s.basis();
  const int k = s.dim();
  std::vector<CMatrix> conj(k);
  for (int a = 0; a < k; ++a) conj[a] = b[a].matrix().conjugate();
  for (int a = 0; a < k; ++a) {
    for (int c = a; c < k; ++c) {
      CMatrix v = kron(b[a].matrix(), conj[c]);
      if (a != c) v = (v + kron(b[c].matrix(), conj[a])) / std::sqrt(2.0);
      out.pairs.emplace_back(a, c);
      out.v.push_back(std::move(v));
    }
  }
  return out;
}

// Adds the cone constraint on rot(sum y_j V_j). For the PSD cone this is the
// coefficient matrix t itself, since rot(s_a (x) conj s_b) = |s_a>><<s_b| with
// orthonormal |s_a>>.
void add_cone_blocks(ConicProgram& p, const SymBasis& sb, const std::vector<int>& vars, int k, int d, ConeId cone) {
  if (cone == ConeId::PSD || cone == ConeId::PSD_AND_PPT) {
    int blk = p.add_block(BlockKind::RealSymmetric, k, "rot_psd");
    for (size_t j = 0; j < sb.v.size(); ++j) {
      auto [a, c] = sb.pairs[j];
      p.add_entry(blk, vars[j], a, c, a == c ? 1.0 : 1.0 / std::sqrt(2.0));
    }
  }
  if (cone == ConeId::PPT || cone == ConeId::PSD_AND_PPT) {
    const BipartiteShape sh{d, d};
    int blk = p.add_block(BlockKind::Hermitian, d * d, "rot_ppt");
    for (size_t j = 0; j < sb.v.size(); ++j) p.add_term(blk, vars[j], partial_transpose(rot(sb.v[j], sh), sh, Factor::B));
  }
}

// max <Phi|I (x) rho + T|Phi> over rho >= 0, Tr rho = 1, I (x) rho + T >= 0 and
// T in the real span of `tbasis`; rho = I/d + sum r_k g_k.
struct MaxForm {
  ConicProgram p;
  std::vector<int> rho_vars;
  std::vector<int> t_vars;
  std::vector<CMatrix> g;
  std::vector<CMatrix> tbasis;
  int d = 0;
};

MaxForm max_form(int d, std::vector<CMatrix> tbasis) {
  MaxForm m;
  m.d = d;
  m.g = traceless_basis(d);
  m.tbasis = std::move(tbasis);
  const CMatrix id = CMatrix::Identity(d, d);
  const CVector phi = max_entangled(d);
  for (size_t k = 0; k < m.g.size(); ++k) m.rho_vars.push_back(m.p.add_variable("rho" + std::to_string(k)));
  for (size_t k = 0; k < m.tbasis.size(); ++k) m.t_vars.push_back(m.p.add_variable("t" + std::to_string(k)));
  int rho_blk = m.p.add_block(BlockKind::Hermitian, d, "rho");
  int main_blk = m.p.add_block(BlockKind::Hermitian, d * d, "I(x)rho+T");
  m.p.add_term(rho_blk, -1, id / d);
  m.p.add_term(main_blk, -1, kron(id, id) / d);
  for (size_t k = 0; k < m.g.size(); ++k) {
    m.p.add_term(rho_blk, m.rho_vars[k], m.g[k]);
    m.p.add_term(main_blk, m.rho_vars[k], kron(id, m.g[k]));
  }
  RVector c = RVector::Zero(m.p.num_variables());
  for (size_t k = 0; k < m.tbasis.size(); ++k) {
    m.p.add_term(main_blk, m.t_vars[k], m.tbasis[k]);
    c(m.t_vars[k]) = phi.dot(m.tbasis[k] * phi).real();
  }
  m.p.set_objective(Sense::Maximize, c, 1.0);
  return m;
}

// min lambda over lambda I - Tr_A Y >= 0, Y - Phi >= 0, Y in the real span of `ybasis`.
struct MinForm {
  ConicProgram p;
  int lambda = 0;
  std::vector<int> y_vars;
  std::vector<CMatrix> ybasis;
  int d = 0;
};

MinForm min_form(int d, std::vector<CMatrix> ybasis) {
  MinForm m;
  m.d = d;
  m.ybasis = std::move(ybasis);
  const BipartiteShape sh{d, d};
  m.lambda = m.p.add_variable("lambda");
  for (size_t k = 0; k < m.ybasis.size(); ++k) m.y_vars.push_back(m.p.add_variable("y" + std::to_string(k)));
  int norm_blk = m.p.add_block(BlockKind::Hermitian, d, "lambda*I-Tr_A(Y)");
  int main_blk = m.p.add_block(BlockKind::Hermitian, d * d, "Y-Phi");
  m.p.add_term(norm_blk, m.lambda, CMatrix::Identity(d, d));
  m.p.add_term(main_blk, -1, -max_entangled_projector(d));
  for (size_t k = 0; k < m.ybasis.size(); ++k) {
    m.p.add_term(norm_blk, m.y_vars[k], -partial_trace(m.ybasis[k], sh, Factor::A));
    m.p.add_term(main_blk, m.y_vars[k], m.ybasis[k]);
  }
  RVector c = RVector::Zero(m.p.num_variables());
  c(m.lambda) = 1.0;
  m.p.set_objective(Sense::Minimize, c);
  return m;
}

std::vector<CMatrix> times_full(const OperatorSubspace& s) {
  const int d = s.ambient_dim();
  auto h = standard_hermitian_basis(d);
  std::vector<CMatrix> out;
  for (const auto& a : s.basis())
    for (const auto& b : h) out.push_back(kron(a.matrix(), b.matrix()));
  return out;
}

MaxForm perp_max(const OperatorSubspace& s) { return max_form(s.ambient_dim(), times_full(s)); }
MinForm perp_min(const OperatorSubspace& s) { return min_form(s.ambient_dim(), times_full(perp(s))); }

MaxForm minus_form(const OperatorSubspace& s, ConeId cone, SymBasis& sb) {
  sb = sym_basis(s);
  MaxForm m = max_form(s.ambient_dim(), sb.v);
  add_cone_blocks(m.p, sb, m.t_vars, s.dim(), s.ambient_dim(), cone);
  return m;
}

MinForm plus_form(const OperatorSubspace& s, ConeId cone) {
  OperatorSubspace sp = perp(s);
  SymBasis sb = sym_basis(sp);
  MinForm m = min_form(s.ambient_dim(), sb.v);
  add_cone_blocks(m.p, sb, m.y_vars, sp.dim(), s.ambient_dim(), cone);
  return m;
}

void fill_max_witness(const MaxForm& m, const RVector& y, ThetaWitness& w) {
  w.rho = CMatrix::Identity(m.d, m.d) / m.d;
  for (size_t k = 0; k < m.g.size(); ++k) w.rho += y(m.rho_vars[k]) * m.g[k];
  w.t = CMatrix::Zero(m.d * m.d, m.d * m.d);
  for (size_t k = 0; k < m.tbasis.size(); ++k) w.t += y(m.t_vars[k]) * m.tbasis[k];
}

void fill_min_witness(const MinForm& m, const RVector& y, ThetaWitness& w) {
  w.lambda = y(m.lambda);
  w.y = CMatrix::Zero(m.d * m.d, m.d * m.d);
  for (size_t k = 0; k < m.ybasis.size(); ++k) w.y += y(m.y_vars[k]) * m.ybasis[k];
}

void check_gap(ThetaResult& r) {
  if (r.status != SolveStatus::Optimal) return;
  r.gap = std::abs(r.primal_value - r.dual_value);
  if (!(r.gap < 1e-5 * std::max(1.0, std::abs(r.value)))) {
    r.status = SolveStatus::Unknown;
    r.message += "; primal and dual values disagree";
  }
}

}  // namespace

ConicProgram theta_perp_max_program(const OperatorSubspace& s) { return perp_max(s).p; }
ConicProgram theta_perp_min_program(const OperatorSubspace& s) { return perp_min(s).p; }
ConicProgram theta_minus_program(const OperatorSubspace& s, ConeId cone) {
  SymBasis sb;
  return minus_form(s, cone, sb).p;
}
ConicProgram theta_plus_program(const OperatorSubspace& s, ConeId cone) { return plus_form(s, cone).p; }

ThetaResult theta_perp(const OperatorSubspace& s, const SolverOptions& opt) {
  require_trace_free(s, "theta_perp");
  ThetaResult r;
  MaxForm mx = perp_max(s);
  MinForm mn = perp_min(s);
  Solution a = solve(mx.p, opt);
  Solution b = solve(mn.p, opt);
  r.iterations = a.iterations + b.iterations;
  r.facial_reduction_steps = a.facial_reduction_steps + b.facial_reduction_steps;
  r.message = std::string("max form: ") + to_string(a.status) + ", " + a.message + "; min form: " + to_string(b.status) +
              ", " + b.message;
  r.primal_value = a.primal_value;
  r.dual_value = b.primal_value;
  if (a.status == SolveStatus::Optimal) fill_max_witness(mx, a.y, r.witness);
  if (b.status == SolveStatus::Optimal) fill_min_witness(mn, b.y, r.witness);
  if (a.status == SolveStatus::Optimal && b.status == SolveStatus::Optimal) {
    r.status = SolveStatus::Optimal;
    r.value = b.primal_value;
  } else if (b.status == SolveStatus::Optimal) {
    r.value = b.primal_value;
  } else if (a.status == SolveStatus::Optimal) {
    r.value = a.primal_value;
  }
  check_gap(r);
  return r;
}

ThetaResult theta_minus(const OperatorSubspace& s, ConeId cone, const SolverOptions& opt) {
  require_trace_free(s, "theta_minus");
  SymBasis sb;
  MaxForm mx = minus_form(s, cone, sb);
  SolverOptions o = opt;
  o.phase_one_first = true;
  Solution a = solve(mx.p, o);
  ThetaResult r;
  r.iterations = a.iterations;
  r.facial_reduction_steps = a.facial_reduction_steps;
  r.message = a.message;
  if (a.status != SolveStatus::Optimal) {
    // The max form always has the feasible point rho = I/d, T = 0.
    r.status = SolveStatus::Unknown;
    r.message = std::string(to_string(a.status)) + ": " + a.message;
    return r;
  }
  r.status = SolveStatus::Optimal;
  r.value = r.primal_value = a.primal_value;
  r.dual_value = a.dual_value;
  fill_max_witness(mx, a.y, r.witness);
  check_gap(r);
  return r;
}

ThetaResult theta_plus(const OperatorSubspace& s, ConeId cone, const SolverOptions& opt) {
  require_trace_free(s, "theta_plus");
  MinForm mn = plus_form(s, cone);
  SolverOptions o = opt;
  o.phase_one_first = true;
  Solution b = solve(mn.p, o);
  ThetaResult r;
  r.iterations = b.iterations;
  r.facial_reduction_steps = b.facial_reduction_steps;
  r.message = b.message;
  r.certificate_verified = b.certificate_verified;
  if (b.status == SolveStatus::Infeasible) {
    if (!b.certificate_verified) {
      // Infinity is only reported with a checked Farkas certificate.
      r.status = SolveStatus::Unknown;
      r.message = "infeasibility not certified: " + b.message;
      return r;
    }
    r.status = SolveStatus::Infeasible;
    r.value = r.dual_value = kInf;
    return r;
  }
  if (b.status != SolveStatus::Optimal) {
    r.status = SolveStatus::Unknown;
    r.message = std::string(to_string(b.status)) + ": " + b.message;
    return r;
  }
  r.value = r.dual_value = b.primal_value;
  r.primal_value = b.dual_value;
  r.status = SolveStatus::Optimal;
  fill_min_witness(mn, b.y, r.witness);
  if (r.value > 1e6) {
    r.status = SolveStatus::Unknown;
    r.message += "; value above 1e6, possibly infeasible";
    return r;
  }
  check_gap(r);
  return r;
}

double cost_rate_bound(const LoopedGraph& s, const OperatorSubspace& t, const SolverOptions& opt) {
  const int d = s.s0.ambient_dim();
  if (!contains(s.s0, CMatrix::Identity(d, d))) throw std::invalid_argument("cost_rate_bound: I is not in S0");
  ThetaResult ts = theta_perp(s.s, opt);
  ThetaResult tt = theta_perp(t, opt);
  if (ts.status != SolveStatus::Optimal || tt.status != SolveStatus::Optimal) {
    throw std::runtime_error("cost_rate_bound: solver did not converge");
  }
  if (t.is_zero() || tt.value <= 1.0 + 1e-6) throw std::invalid_argument("cost_rate_bound: theta_perp(T) = 1");
  return std::log2(ts.value) / std::log2(tt.value);
}

}  // namespace ncg
