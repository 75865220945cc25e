#pragma once

// JSON readers and writers for matrices, subspaces, channels, sources and
// classical graphs. Complex numbers are [re, im] pairs.
//
//   matrix    {"dim": n, "entries": [[[re,im], ...], ...]}   row-major
//             {"rows": r, "cols": c, "entries": ...}        for non-square Kraus operators
//   subspace  {"ambient_dim": n, "basis": [matrix, ...]}
//   channel   {"kraus": [matrix, ...]}
//   source    {"dim_a": a, "dim_b": b, "dim_c": c, "states": [[[re,im], ...], ...]}
//   graph     {"n": k, "edges": [[i, j], ...]}  or a graph6 string

#include "ncg/classical.hpp"
#include "ncg/ncgraph.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace ncg {

using Json = nlohmann::json;

/// Malformed input; the message names the origin and, for syntax errors, line and column.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json parse_json_text(const std::string& text, const std::string& origin = "input");
std::string read_text_file(const std::string& path);

CMatrix matrix_from_json(const Json& j);
Json matrix_to_json(const CMatrix& m);
CVector vector_from_json(const Json& j);
Json vector_to_json(const CVector& v);

/// The basis need not be orthonormal; it is closed under adjoint and orthonormalized.
OperatorSubspace subspace_from_json(const Json& j);
Json subspace_to_json(const OperatorSubspace& s);

QuantumChannel channel_from_json(const Json& j);
Json channel_to_json(const QuantumChannel& c);

DiscreteSource source_from_json(const Json& j);
Json source_to_json(const DiscreteSource& s);

ClassicalGraph graph_from_json(const Json& j);
Json graph_to_json(const ClassicalGraph& g);

/// What a graph file turned out to contain.
enum class GraphFileKind { Graph6, Adjacency, Subspace, Channel, Source };
const char* to_string(GraphFileKind k);

struct LoadedGraph {
  GraphFileKind kind;
  /// The non-commutative graph: from_classical for classical graphs, the
  /// distinguishability graph of a channel, the characteristic graph s of a source.
  OperatorSubspace s;
};

/// Detects the format from the contents: JSON objects by their keys, anything
/// else is read as graph6.
LoadedGraph load_graph_text(const std::string& text, const std::string& origin = "input");
LoadedGraph load_graph_file(const std::string& path);

}  // namespace ncg
