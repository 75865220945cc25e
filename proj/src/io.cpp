#include "ncg/io.hpp"

#include <fstream>
#include <sstream>

namespace ncg {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw InputError(where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing key \"") + key + "\"");
  return *it;
}

int as_int(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

int positive(const Json& j, const std::string& where) {
  int v = as_int(j, where);
  if (v <= 0) bad(where, "expected a positive integer");
  return v;
}

Complex complex_at(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    bad(where, "expected [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

CMatrix matrix_at(const Json& j, const std::string& where) {
  const Json& rows = field(j, "entries", where);
  if (!rows.is_array()) bad(where + ".entries", "expected an array of rows");
  int r = static_cast<int>(rows.size()), c = r ? static_cast<int>(rows[0].size()) : 0;
  if (j.contains("dim")) {
    r = c = positive(j["dim"], where + ".dim");
  } else if (j.contains("rows") || j.contains("cols")) {
    r = positive(field(j, "rows", where), where + ".rows");
    c = positive(field(j, "cols", where), where + ".cols");
  }
  if (static_cast<int>(rows.size()) != r) bad(where + ".entries", "expected " + std::to_string(r) + " rows");
  CMatrix m(r, c);
  for (int a = 0; a < r; ++a) {
    const std::string rw = where + ".entries[" + std::to_string(a) + "]";
    if (!rows[a].is_array() || static_cast<int>(rows[a].size()) != c) {
      bad(rw, "expected " + std::to_string(c) + " entries");
    }
    for (int b = 0; b < c; ++b) m(a, b) = complex_at(rows[a][b], rw + "[" + std::to_string(b) + "]");
  }
  return m;
}

CVector vector_at(const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of [re, im]");
  CVector v(j.size());
  for (size_t k = 0; k < j.size(); ++k) v(k) = complex_at(j[k], where + "[" + std::to_string(k) + "]");
  return v;
}

// Wraps library validation errors so that every failure carries its origin.
template <class F>
auto with_origin(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    bad(where, e.what());
  }
}

OperatorSubspace subspace_at(const Json& j, const std::string& where) {
  const int n = positive(field(j, "ambient_dim", where), where + ".ambient_dim");
  const Json& basis = field(j, "basis", where);
  if (!basis.is_array()) bad(where + ".basis", "expected an array of matrices");
  std::vector<CMatrix> span;
  for (size_t k = 0; k < basis.size(); ++k) {
    const std::string bw = where + ".basis[" + std::to_string(k) + "]";
    CMatrix m = matrix_at(basis[k], bw);
    if (m.rows() != n || m.cols() != n) bad(bw, "dimension differs from ambient_dim");
    span.push_back(std::move(m));
  }
  return with_origin(where, [&] { return orthonormalize(n, span); });
}

QuantumChannel channel_at(const Json& j, const std::string& where) {
  const Json& kraus = field(j, "kraus", where);
  if (!kraus.is_array() || kraus.empty()) bad(where + ".kraus", "expected a non-empty array of matrices");
  std::vector<CMatrix> ops;
  for (size_t k = 0; k < kraus.size(); ++k) ops.push_back(matrix_at(kraus[k], where + ".kraus[" + std::to_string(k) + "]"));
  return with_origin(where, [&] { return QuantumChannel(ops); });
}

DiscreteSource source_at(const Json& j, const std::string& where) {
  const int a = positive(field(j, "dim_a", where), where + ".dim_a");
  const int b = positive(field(j, "dim_b", where), where + ".dim_b");
  const int c = j.contains("dim_c") ? positive(j["dim_c"], where + ".dim_c") : 1;
  const Json& st = field(j, "states", where);
  if (!st.is_array()) bad(where + ".states", "expected an array of state vectors");
  std::vector<CVector> states;
  for (size_t k = 0; k < st.size(); ++k) states.push_back(vector_at(st[k], where + ".states[" + std::to_string(k) + "]"));
  return with_origin(where, [&] { return DiscreteSource(a, b, c, states); });
}

ClassicalGraph graph_at(const Json& j, const std::string& where) {
  const int n = as_int(field(j, "n", where), where + ".n");
  if (n < 0) bad(where + ".n", "expected a non-negative integer");
  const Json& edges = field(j, "edges", where);
  if (!edges.is_array()) bad(where + ".edges", "expected an array of [i, j]");
  ClassicalGraph g(n);
  for (size_t k = 0; k < edges.size(); ++k) {
    const std::string ew = where + ".edges[" + std::to_string(k) + "]";
    const Json& e = edges[k];
    if (!e.is_array() || e.size() != 2) bad(ew, "expected [i, j]");
    int x = as_int(e[0], ew), y = as_int(e[1], ew);
    with_origin(ew, [&] {
      g.add_edge(x, y);
      return 0;
    });
  }
  return g;
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into a line and column.
    size_t line = 1, col = 1;
    for (size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    auto pos = msg.find("syntax error");
    throw InputError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " +
                     (pos == std::string::npos ? msg : msg.substr(pos)));
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CMatrix matrix_from_json(const Json& j) { return matrix_at(j, "matrix"); }

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (int a = 0; a < m.rows(); ++a) {
    Json row = Json::array();
    for (int b = 0; b < m.cols(); ++b) row.push_back(complex_json(m(a, b)));
    rows.push_back(std::move(row));
  }
  Json j;
  if (m.rows() == m.cols()) {
    j["dim"] = m.rows();
  } else {
    j["rows"] = m.rows();
    j["cols"] = m.cols();
  }
  j["entries"] = std::move(rows);
  return j;
}

CVector vector_from_json(const Json& j) { return vector_at(j, "vector"); }

Json vector_to_json(const CVector& v) {
  Json out = Json::array();
  for (int k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

OperatorSubspace subspace_from_json(const Json& j) { return subspace_at(j, "subspace"); }

Json subspace_to_json(const OperatorSubspace& s) {
  Json basis = Json::array();
  for (const auto& h : s.basis()) basis.push_back(matrix_to_json(h.matrix()));
  return Json{{"ambient_dim", s.ambient_dim()}, {"basis", std::move(basis)}};
}

QuantumChannel channel_from_json(const Json& j) { return channel_at(j, "channel"); }

Json channel_to_json(const QuantumChannel& c) {
  Json kraus = Json::array();
  for (const auto& k : c.kraus()) kraus.push_back(matrix_to_json(k));
  return Json{{"kraus", std::move(kraus)}};
}

DiscreteSource source_from_json(const Json& j) { return source_at(j, "source"); }

Json source_to_json(const DiscreteSource& s) {
  Json states = Json::array();
  for (const auto& psi : s.states) states.push_back(vector_to_json(psi));
  return Json{{"dim_a", s.dim_a}, {"dim_b", s.dim_b}, {"dim_c", s.dim_c}, {"states", std::move(states)}};
}

ClassicalGraph graph_from_json(const Json& j) { return graph_at(j, "graph"); }

Json graph_to_json(const ClassicalGraph& g) {
  Json edges = Json::array();
  for (auto [x, y] : g.edges()) edges.push_back(Json::array({x, y}));
  return Json{{"n", g.n()}, {"edges", std::move(edges)}};
}

const char* to_string(GraphFileKind k) {
  switch (k) {
    case GraphFileKind::Graph6: return "graph6";
    case GraphFileKind::Adjacency: return "adjacency";
    case GraphFileKind::Subspace: return "subspace";
    case GraphFileKind::Channel: return "channel";
    case GraphFileKind::Source: return "source";
  }
  return "?";
}

LoadedGraph load_graph_text(const std::string& text, const std::string& origin) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw InputError(origin + ": empty input");
  if (text[first] == '{') {
    Json j = parse_json_text(text, origin);
    if (j.contains("edges")) {
      return {GraphFileKind::Adjacency, from_classical(graph_at(j, origin))};
    }
    if (j.contains("basis")) return {GraphFileKind::Subspace, subspace_at(j, origin)};
    if (j.contains("kraus")) {
      QuantumChannel ch = channel_at(j, origin);
      return {GraphFileKind::Channel, channel_graphs(ch).distinguishability};
    }
    if (j.contains("states")) {
      DiscreteSource src = source_at(j, origin);
      return {GraphFileKind::Source, with_origin(origin, [&] { return discrete_source_graph(src).s; })};
    }
    throw InputError(origin + ": object has none of the keys edges, basis, kraus, states");
  }
  // graph6: one graph on the first non-empty line, optional >>graph6<< header.
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const std::string header = ">>graph6<<";
    if (line.rfind(header, 0) == 0) line = line.substr(header.size());
    if (line.empty()) continue;
    try {
      return {GraphFileKind::Graph6, from_classical(parse_graph6(line))};
    } catch (const std::invalid_argument& e) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  throw InputError(origin + ": empty input");
}

LoadedGraph load_graph_file(const std::string& path) { return load_graph_text(read_text_file(path), path); }

}  // namespace ncg
