// ncg: command-line front end. Results go to stdout as JSON, logs to stderr.

#include "ncg/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>

using namespace ncg;

namespace {

constexpr int kExitUnknown = 2;
constexpr int kExitFailedChecks = 3;

void log(const std::string& s) { std::fprintf(stderr, "[ncg] %s\n", s.c_str()); }

Json value_json(double v) {
  if (std::isinf(v)) return "inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

ThetaResult compute(const OperatorSubspace& s, const std::string& quantity, ConeId cone, const SolverOptions& opt) {
  if (quantity == "theta") return theta_perp(s, opt);
  if (quantity == "theta-minus") return theta_minus(s, cone, opt);
  return theta_plus(s, cone, opt);
}

ConicProgram program_for(const OperatorSubspace& s, const std::string& quantity, ConeId cone, bool min_form) {
  if (quantity == "theta") return min_form ? theta_perp_min_program(s) : theta_perp_max_program(s);
  if (quantity == "theta-minus") return theta_minus_program(s, cone);
  return theta_plus_program(s, cone);
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, std::string> out;
  for (const auto& kv : raw) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "expected k=v, got " + kv);
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

struct Params {
  std::map<std::string, std::string> kv;
  std::map<std::string, bool> used;
  long long get(const std::string& k, long long def) {
    auto it = kv.find(k);
    if (it == kv.end()) return def;
    used[k] = true;
    try {
      size_t pos = 0;
      long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(k);
      return v;
    } catch (const std::exception&) {
      throw CLI::ValidationError("--param", k + " expects an integer, got " + it->second);
    }
  }
  std::string get_str(const std::string& k, const std::string& def) {
    auto it = kv.find(k);
    if (it == kv.end()) return def;
    used[k] = true;
    return it->second;
  }
  void reject_unused() const {
    for (const auto& [k, v] : kv)
      if (!used.count(k)) throw CLI::ValidationError("--param", "unknown parameter " + k);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lovasz-type numbers of non-commutative graphs"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Solver progress on stderr");

  const std::map<std::string, ConeId> cones{
      {"psd", ConeId::PSD}, {"ppt", ConeId::PPT}, {"psd-ppt", ConeId::PSD_AND_PPT}};
  const std::vector<std::string> quantities{"theta", "theta-minus", "theta-plus"};

  // compute
  auto* comp = app.add_subcommand("compute", "Evaluate one quantity for a graph file");
  std::string graph_file, quantity;
  ConeId cone = ConeId::PSD;
  bool with_witness = false;
  comp->add_option("--graph", graph_file, "graph6, adjacency, subspace, channel or source file")->required();
  comp->add_option("--quantity", quantity)->required()->check(CLI::IsMember(quantities));
  auto* cone_opt = comp->add_option("--cone", cone, "psd, ppt or psd-ppt")->transform(CLI::CheckedTransformer(cones));
  comp->add_flag("--witness", with_witness, "Include the optimal matrices");

  // program
  auto* prog = app.add_subcommand("program", "Print the conic program as JSON");
  bool min_form = false;
  prog->add_option("--graph", graph_file)->required();
  prog->add_option("--quantity", quantity)->required()->check(CLI::IsMember(quantities));
  auto* prog_cone = prog->add_option("--cone", cone)->transform(CLI::CheckedTransformer(cones));
  prog->add_flag("--min-form", min_form, "For theta: the minimisation form");

  // paper
  auto* paper = app.add_subcommand("paper", "Run a canned experiment");
  std::string experiment;
  std::vector<std::string> raw_params;
  int jobs = 1;
  paper->add_option("--experiment", experiment)
      ->required()
      ->check(CLI::IsMember({"complete-table", "delta", "nonmax-channel", "survey", "locc1"}));
  paper->add_option("--param", raw_params, "k=v, repeatable");
  paper->add_option("--jobs", jobs, "Parallel solves for the survey (0: all cores)");

  // random
  auto* rnd = app.add_subcommand("random", "Survey of random trace-free subspaces");
  int dim = 3, subspace_dim = 4, count = 100;
  std::uint64_t seed = 1;
  rnd->add_option("--dim", dim)->required();
  rnd->add_option("--subspace-dim", subspace_dim)->required();
  rnd->add_option("--count", count)->required();
  rnd->add_option("--seed", seed)->required();
  rnd->add_option("--jobs", jobs, "Parallel solves (0: all cores)");

  CLI11_PARSE(app, argc, argv);

  SolverOptions opt = SolverOptions::from_env();
  if (verbose) opt.verbosity = std::max(opt.verbosity, 1);

  try {
    if (comp->parsed() || prog->parsed()) {
      if (quantity != "theta" && !(comp->parsed() ? cone_opt->count() : prog_cone->count())) {
        log("--cone is required for " + quantity);
        return 1;
      }
      LoadedGraph g = load_graph_file(graph_file);
      log(std::string("read ") + to_string(g.kind) + " input, ambient dimension " + std::to_string(g.s.ambient_dim()) +
          ", subspace dimension " + std::to_string(g.s.dim()));
      if (prog->parsed()) {
        std::cout << program_for(g.s, quantity, cone, min_form).to_json() << "\n";
        return 0;
      }
      auto t0 = std::chrono::steady_clock::now();
      ThetaResult r = compute(g.s, quantity, cone, opt);
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      Json out{{"value", value_json(r.value)},
               {"status", to_string(r.status)},
               {"gap", value_json(r.gap)},
               {"runtime_ms", ms}};
      if (r.status == SolveStatus::Infeasible) out["certificate_verified"] = r.certificate_verified;
      if (!r.message.empty()) log(r.message);
      if (with_witness) {
        Json w = Json::object();
        if (r.witness.rho.size()) w["rho"] = matrix_to_json(r.witness.rho);
        if (r.witness.t.size()) w["t"] = matrix_to_json(r.witness.t);
        if (r.witness.y.size()) w["y"] = matrix_to_json(r.witness.y);
        if (!std::isnan(r.witness.lambda)) w["lambda"] = r.witness.lambda;
        out["witness"] = std::move(w);
      }
      std::cout << out.dump(2) << "\n";
      return r.status == SolveStatus::Unknown ? kExitUnknown : 0;
    }

    ExperimentReport rep;
    if (paper->parsed()) {
      Params p{parse_params(raw_params), {}};
      if (experiment == "complete-table") {
        int n_max = static_cast<int>(p.get("n_max", 3));
        p.reject_unused();
        rep = run_complete_graph_table(n_max, opt);
      } else if (experiment == "delta") {
        int d = static_cast<int>(p.get("d", 3));
        p.reject_unused();
        rep = run_delta_example(d, opt);
      } else if (experiment == "nonmax-channel") {
        int n = static_cast<int>(p.get("n", 2));
        int m = static_cast<int>(p.get("m", 3));
        std::string mode = p.get_str("mode", m <= 4 ? "direct" : "analytic");
        p.reject_unused();
        if (mode != "direct" && mode != "analytic") throw CLI::ValidationError("--param", "mode is direct or analytic");
        rep = run_nonmaximal_channel(n, m, mode == "direct", opt);
      } else if (experiment == "survey") {
        bool full = p.get("full", 0) != 0;
        int d = static_cast<int>(p.get("dim", 3));
        int k = static_cast<int>(p.get("subspace_dim", 4));
        int c = static_cast<int>(p.get("count", full ? 10000 : 100));
        auto s = static_cast<std::uint64_t>(p.get("seed", 1));
        p.reject_unused();
        rep = run_random_survey(d, k, c, s, jobs, opt);
      } else {
        p.reject_unused();
        rep = run_locc1_example(opt);
      }
    } else {
      rep = run_random_survey(dim, subspace_dim, count, seed, jobs, opt);
    }
    std::cout << rep.to_json().dump(2) << "\n";
    for (const auto& n : rep.notes) log(n);
    log(rep.name + (rep.passed() ? ": all checks passed" : ": some checks failed"));
    return rep.passed() ? 0 : kExitFailedChecks;
  } catch (const CLI::ValidationError& e) {
    log(e.what());
    return 1;
  } catch (const InputError& e) {
    log(e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    log(e.what());
    return 1;
  }
}
