#include <gtest/gtest.h>

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

bool euler_ok(const SandpileGraph& g) {
  const auto rs = to_rotation_system(g.edge_ends(), *g.embedding());
  return satisfies_euler(rs, trace_faces(rs));
}

}  // namespace

TEST(Graph, DegreesAndIndexing) {
  // 0 - 1 - 2, double edge 2-3, sink 3 also tied to 0.
  const auto g = SandpileGraph::build(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 2}, {0, 3, 1}}, 3);
  EXPECT_EQ(g.vertex_count(), 4u);
  EXPECT_EQ(g.ordinary_count(), 3u);
  EXPECT_EQ(g.degree(0), 2);
  EXPECT_EQ(g.degree(2), 3);
  EXPECT_EQ(g.degree(3), 3);
  EXPECT_EQ(g.sink_multiplicity(2), 2);
  EXPECT_TRUE(g.sink_adjacent(0));
  EXPECT_FALSE(g.sink_adjacent(1));
  EXPECT_EQ(g.boundary_vertices(), (std::vector<VertexId>{0, 2}));
  EXPECT_EQ(g.total_multiplicity(), 5);
  EXPECT_EQ(g.max_degree(), 3);
  EXPECT_TRUE(g.integral());
}

TEST(Graph, OrdinaryIndexSkipsSink) {
  const auto g = SandpileGraph::build(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}}, 1);
  EXPECT_EQ(g.ordinary_vertices(), (std::vector<VertexId>{0, 2, 3}));
  for (std::size_t i = 0; i < g.ordinary_count(); ++i) EXPECT_EQ(g.ordinary_index(g.ordinary_vertex(i)), i);
  EXPECT_EQ(code_of([&] { (void)g.ordinary_index(1); }), ErrorCode::InvalidArgument);
}

TEST(Graph, RejectsMalformedInput) {
  EXPECT_EQ(code_of([] { SandpileGraph::build(3, {{0, 0, 1}, {1, 2, 1}}, 2); }), ErrorCode::SelfLoop);
  EXPECT_EQ(code_of([] { SandpileGraph::build(4, {{0, 1, 1}, {2, 3, 1}}, 3); }), ErrorCode::DisconnectedGraph);
  EXPECT_EQ(code_of([] { SandpileGraph::build(2, {{0, 1, 1}}, 5); }), ErrorCode::BadSink);
  EXPECT_EQ(code_of([] { SandpileGraph::from_records(2, {{0, 1, 1, -1.0}}, 1); }), ErrorCode::InvalidArgument);
}

TEST(Graph, ParallelRecordsMergeIntoNeighbors) {
  const auto g = SandpileGraph::from_records(3, {{0, 1, 1, 1.0}, {0, 1, 2, 0.5}, {1, 2, 1, 1.0}}, 2);
  EXPECT_EQ(g.multiplicity(0, 1), 3);
  EXPECT_EQ(g.neighbors(0).size(), 1u);
  EXPECT_DOUBLE_EQ(g.weighted_degree(0), 1.5);
  EXPECT_FALSE(g.integral());
}

TEST(Graph, LaplacianRowsSumToZero) {
  const auto g = grid(4);
  const auto lap = laplacian(g);
  for (Eigen::Index r = 0; r < lap.rows(); ++r) EXPECT_NEAR(lap.row(r).sum(), 0.0, 1e-12);
  EXPECT_TRUE(lap.isApprox(lap.transpose()));
  const Eigen::MatrixXd grounded(grounded_laplacian(g));
  EXPECT_EQ(grounded.rows(), 16);
  EXPECT_TRUE(grounded.isApprox(grounded.transpose()));
}

TEST(Graph, OrdinaryComponentsSplitAtTheSink) {
  // Two paths hanging off the sink.
  const auto g = SandpileGraph::build(5, {{0, 1, 1}, {1, 4, 1}, {2, 3, 1}, {3, 4, 1}}, 4);
  const auto label = ordinary_components(g);
  EXPECT_EQ(label[0], label[1]);
  EXPECT_EQ(label[2], label[3]);
  EXPECT_NE(label[0], label[2]);
  EXPECT_FALSE(ordinary_connected(g));
  EXPECT_TRUE(ordinary_connected(grid(3)));
}

class GridSizes : public ::testing::TestWithParam<std::size_t> {};

TEST_P(GridSizes, LatticeDegreesAndEmbedding) {
  const std::size_t n = GetParam();
  const auto g = grid(n);
  EXPECT_EQ(g.vertex_count(), n * n + 1);
  for (VertexId v : g.ordinary_vertices()) EXPECT_EQ(g.degree(v), 4);
  EXPECT_EQ(g.degree(g.sink()), static_cast<std::int64_t>(4 * n));
  EXPECT_EQ(g.sink_multiplicity(grid_id(n, 1, 1)), 2);
  ASSERT_TRUE(g.embedding().has_value());
  EXPECT_TRUE(euler_ok(g));
  // (n-1)^2 plaquettes plus one face between each pair of consecutive sink edges.
  const auto rs = to_rotation_system(g.edge_ends(), *g.embedding());
  EXPECT_EQ(trace_faces(rs).face_count(), (n - 1) * (n - 1) + 4 * n);
}

INSTANTIATE_TEST_SUITE_P(Small, GridSizes, ::testing::Values(2, 3, 4, 7));

TEST(Graph, TriangularAndHoneycombDegrees) {
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto t = triangular(n);
    for (VertexId v : t.ordinary_vertices()) EXPECT_EQ(t.degree(v), 6);
    EXPECT_TRUE(euler_ok(t));
    const auto h = honeycomb(n);
    for (VertexId v : h.ordinary_vertices()) EXPECT_EQ(h.degree(v), 3);
    EXPECT_TRUE(euler_ok(h));
  }
  EXPECT_EQ(triangular(1).ordinary_count(), 7u);
}

TEST(Graph, LineSandpile) {
  const auto g = line_sandpile(5);
  EXPECT_EQ(g.sink(), 5u);
  EXPECT_EQ(g.degree(0), 2);
  EXPECT_EQ(g.degree(2), 3);
  for (VertexId v = 0; v < 5; ++v) EXPECT_TRUE(g.sink_adjacent(v));
  EXPECT_TRUE(euler_ok(g));
}

TEST(Embedding, RejectsBadRotations) {
  auto g = SandpileGraph::build(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}, 2);
  PlanarEmbedding emb;
  emb.rotation = {{0, 2}, {0, 1}};
  EXPECT_EQ(code_of([&] { g.set_embedding(emb); }), ErrorCode::NonPlanarEmbedding);
  emb.rotation = {{0, 2}, {0, 1}, {1}};
  EXPECT_EQ(code_of([&] { g.set_embedding(emb); }), ErrorCode::NonPlanarEmbedding);
  emb.rotation = {{0, 2}, {1, 0}, {2, 1}};
  EXPECT_NO_THROW(g.set_embedding(emb));
}

TEST(Embedding, FaceWalksCoverEveryDartOnce) {
  const auto g = triangular(2);
  const auto rs = to_rotation_system(g.edge_ends(), *g.embedding());
  const auto fs = trace_faces(rs);
  std::vector<int> hits(2 * g.edge_count(), 0);
  for (std::size_t f = 0; f < fs.face_count(); ++f)
    for (Dart d : fs.faces[f]) {
      ++hits[d];
      EXPECT_EQ(fs.face_of[d], f);
    }
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Embedding, FiniteLayoutPicksTheOuterFace) {
  // Unit square with a diagonal, all vertices drawn, sink at a corner.
  const auto g = SandpileGraph::build(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}, {0, 2, 1}}, 3);
  Layout layout;
  layout.position = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  layout.direction.assign(g.edge_count(), std::nullopt);
  layout.sink_at_infinity = false;
  const auto emb = embed_from_layout(g, layout);
  ASSERT_TRUE(emb.outer_face.has_value());
  const auto rs = to_rotation_system(g.edge_ends(), emb);
  EXPECT_EQ(trace_faces(rs).faces[*emb.outer_face].size(), 4u);
}
