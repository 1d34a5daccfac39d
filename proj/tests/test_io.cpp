#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <sstream>

#include "sandpile/sandpile.hpp"

using namespace sandpile;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::AssertionFailure;
}

void expect_same_graph(const SandpileGraph& a, const SandpileGraph& b) {
  ASSERT_EQ(a.vertex_count(), b.vertex_count());
  EXPECT_EQ(a.sink(), b.sink());
  ASSERT_EQ(a.edge_count(), b.edge_count());
  for (EdgeId e = 0; e < a.edge_count(); ++e) {
    const auto &x = a.edges()[e], &y = b.edges()[e];
    EXPECT_EQ(x.u, y.u);
    EXPECT_EQ(x.v, y.v);
    EXPECT_EQ(x.multiplicity, y.multiplicity);
    EXPECT_EQ(x.conductance, y.conductance);
  }
  for (VertexId v = 0; v < a.vertex_count(); ++v) EXPECT_EQ(a.degree(v), b.degree(v));
}

}  // namespace

TEST(GraphJson, GridRoundTripKeepsTheEmbedding) {
  const auto g = grid(5);
  const auto back = parse_graph(graph_to_json(g).dump());
  expect_same_graph(g, back);
  ASSERT_TRUE(back.embedding().has_value());
  EXPECT_EQ(back.embedding()->rotation, g.embedding()->rotation);
  EXPECT_EQ(back.embedding()->outer_face, g.embedding()->outer_face);
}

TEST(GraphJson, MultiplicitiesAndConductancesSurvive) {
  const auto g = SandpileGraph::build(3, {{0, 1, 4}, {1, 2, 2}, {0, 2, 1}}, 2);
  const auto plain = parse_graph(graph_to_json(g).dump());
  expect_same_graph(g, plain);
  EXPECT_FALSE(graph_to_json(g).contains("conductances"));

  const auto weighted = g.with_conductances({0.1, 1.0 / 3.0, 2.75});
  const auto doc = graph_to_json(weighted);
  EXPECT_TRUE(doc.contains("conductances"));
  expect_same_graph(weighted, parse_graph(doc.dump()));
}

TEST(GraphJson, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "sandpile_io_roundtrip.json";
  const auto g = honeycomb(2);
  save_graph(g, path.string());
  expect_same_graph(g, load_graph(path.string()));
  std::filesystem::remove(path);
  EXPECT_EQ(code_of([&] { load_graph(path.string()); }), ErrorCode::InvalidArgument);
}

TEST(GraphJson, SchemaErrors) {
  EXPECT_EQ(code_of([] { parse_graph(R"({"vertices": 2, "edges": [[0, 1, 1]]})"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_graph(R"({"vertices": 2, "sink": 1, "edges": [[0, 1]]})"); }),
            ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_graph(R"({"vertices": 2, "sink": 1, "edges": [[0, 1, 0]]})"); }),
            ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_graph(R"({"vertices": -2, "sink": 1, "edges": []})"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_graph("{not json"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] { parse_graph("[1, 2]"); }), ErrorCode::SchemaError);
  EXPECT_EQ(code_of([] {
              parse_graph(R"({"vertices": 2, "sink": 1, "edges": [[0, 1, 1]], "conductances": [[0, 2, 1.5]]})");
            }),
            ErrorCode::SchemaError);
  // Well-formed documents still go through graph validation.
  EXPECT_EQ(code_of([] { parse_graph(R"({"vertices": 2, "sink": 1, "edges": [[1, 1, 1]]})"); }),
            ErrorCode::SelfLoop);
}

TEST(Csv, RealsReadBackExactly) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) EXPECT_EQ(std::stod(format_real(x)), x);
  EXPECT_EQ(format_real(3.0), "3");
  EXPECT_EQ(format_real(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Csv, RowsMatchTheHeader) {
  std::ostringstream out;
  {
    CsvWriter csv(out, {"name", "count", "value"});
    csv.row() << "a" << 2 << 0.5;
  }
  EXPECT_EQ(out.str(), "name,count,value\na,2,0.5\n");
  CsvWriter csv(out, {"one", "two"});
  EXPECT_THROW(csv.row() << "only", Error);
}
