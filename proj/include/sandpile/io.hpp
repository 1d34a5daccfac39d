#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "sandpile/graph.hpp"

namespace sandpile {

using Json = nlohmann::json;

// Graph files:
//   {"vertices": n, "sink": s, "edges": [[u, v, multiplicity], ...],
//    "conductances": [[u, v, value], ...],       optional
//    "embedding": [[edge ids around vertex], ...], optional
//    "outer_face": f}                              optional
// The k-th conductance entry for a vertex pair applies to the k-th edge
// record joining that pair.

inline Json graph_to_json(const SandpileGraph& g) {
  Json out;
  out["vertices"] = g.vertex_count();
  out["sink"] = g.sink();
  Json edges = Json::array(), conductances = Json::array();
  bool integral = true;
  for (const auto& rec : g.edges()) {
    edges.push_back({rec.u, rec.v, rec.multiplicity});
    conductances.push_back({rec.u, rec.v, rec.conductance});
    if (rec.conductance != static_cast<double>(rec.multiplicity)) integral = false;
  }
  out["edges"] = std::move(edges);
  if (!integral) out["conductances"] = std::move(conductances);
  if (const auto& emb = g.embedding()) {
    out["embedding"] = emb->rotation;
    if (emb->outer_face) out["outer_face"] = *emb->outer_face;
  }
  return out;
}

namespace detail {

inline std::size_t json_index(const Json& value, const std::string& field) {
  if (!value.is_number_integer() || value.get<long long>() < 0)
    fail(ErrorCode::SchemaError, "field '" + field + "' must be a non-negative integer");
  return value.get<std::size_t>();
}

inline const Json& json_field(const Json& doc, const std::string& field) {
  if (!doc.contains(field)) fail(ErrorCode::SchemaError, "missing field '" + field + "'");
  return doc.at(field);
}

}  // namespace detail

inline SandpileGraph graph_from_json(const Json& doc) {
  if (!doc.is_object()) fail(ErrorCode::SchemaError, "graph document must be an object");
  const auto n = detail::json_index(detail::json_field(doc, "vertices"), "vertices");
  const auto sink = detail::json_index(detail::json_field(doc, "sink"), "sink");
  const auto& edges = detail::json_field(doc, "edges");
  if (!edges.is_array()) fail(ErrorCode::SchemaError, "field 'edges' must be an array");
  std::vector<EdgeRecord> records;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    const std::string where = "edges[" + std::to_string(k) + "]";
    if (!e.is_array() || e.size() != 3) fail(ErrorCode::SchemaError, where + " must be [u, v, multiplicity]");
    const auto u = detail::json_index(e[0], where + "[0]");
    const auto v = detail::json_index(e[1], where + "[1]");
    const auto m = detail::json_index(e[2], where + "[2]");
    if (m == 0) fail(ErrorCode::SchemaError, where + " has zero multiplicity");
    records.push_back({u, v, static_cast<std::int64_t>(m), static_cast<double>(m)});
  }
  if (doc.contains("conductances")) {
    const auto& cs = doc.at("conductances");
    if (!cs.is_array()) fail(ErrorCode::SchemaError, "field 'conductances' must be an array");
    std::map<std::pair<VertexId, VertexId>, std::size_t> seen;
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const auto& c = cs[k];
      const std::string where = "conductances[" + std::to_string(k) + "]";
      if (!c.is_array() || c.size() != 3 || !c[2].is_number())
        fail(ErrorCode::SchemaError, where + " must be [u, v, value]");
      const auto u = detail::json_index(c[0], where + "[0]");
      const auto v = detail::json_index(c[1], where + "[1]");
      const auto pair = std::make_pair(std::min(u, v), std::max(u, v));
      std::size_t skip = seen[pair]++;
      bool matched = false;
      for (auto& rec : records) {
        if (std::make_pair(std::min(rec.u, rec.v), std::max(rec.u, rec.v)) != pair) continue;
        if (skip-- == 0) {
          rec.conductance = c[2].get<double>();
          matched = true;
          break;
        }
      }
      if (!matched) fail(ErrorCode::SchemaError, where + " does not match an edge");
    }
  }
  auto g = SandpileGraph::from_records(n, std::move(records), sink);
  if (doc.contains("embedding")) {
    PlanarEmbedding emb;
    try {
      emb.rotation = doc.at("embedding").get<std::vector<std::vector<EdgeId>>>();
    } catch (const Json::exception&) {
      fail(ErrorCode::SchemaError, "field 'embedding' must be a list of edge-id lists");
    }
    if (doc.contains("outer_face")) emb.outer_face = detail::json_index(doc.at("outer_face"), "outer_face");
    g.set_embedding(std::move(emb));
  }
  return g;
}

inline SandpileGraph parse_graph(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what());
  }
  return graph_from_json(doc);
}

inline SandpileGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::InvalidArgument, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_graph(buffer.str());
}

inline void save_graph(const SandpileGraph& g, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::InvalidArgument, "cannot write " + path);
  out << graph_to_json(g).dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// CSV

/// 17 significant digits, enough to read back the same double.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", x);
  return buffer;
}

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    write(header);
  }

  class Row {
   public:
    explicit Row(CsvWriter& w) : w_(w) {}
    Row& operator<<(const std::string& s) { cells_.push_back(s); return *this; }
    Row& operator<<(const char* s) { cells_.emplace_back(s); return *this; }
    Row& operator<<(double x) { cells_.push_back(format_real(x)); return *this; }
    template <class Int, std::enable_if_t<std::is_integral_v<Int>, int> = 0>
    Row& operator<<(Int x) { cells_.push_back(std::to_string(x)); return *this; }
    ~Row() noexcept(false) { w_.write(cells_); }

   private:
    CsvWriter& w_;
    std::vector<std::string> cells_;
  };

  Row row() { return Row(*this); }

 private:
  void write(const std::vector<std::string>& cells) {
    require(cells.size() == columns_, ErrorCode::InvalidArgument, "CSV row has the wrong number of cells");
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
  }

  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace sandpile
