#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "sandpile/embedding.hpp"
#include "sandpile/error.hpp"

namespace sandpile {

struct EdgeSpec {
  VertexId u = 0;
  VertexId v = 0;
  std::int64_t multiplicity = 1;
};

struct EdgeRecord {
  VertexId u = 0;
  VertexId v = 0;
  std::int64_t multiplicity = 1;
  double conductance = 1.0;

  VertexId other(VertexId x) const { return x == u ? v : u; }
  bool operator==(const EdgeRecord&) const = default;
};

/// Neighbor entry with parallel edge records merged.
struct Neighbor {
  VertexId vertex = 0;
  std::int64_t multiplicity = 0;
  double conductance = 0.0;
};

/// Multigraph with a designated sink. Edge records keep their identity (two
/// records between the same pair are distinct slots for an embedding) while
/// neighbors() merges them. Conductances default to the multiplicity; a graph
/// whose conductances differ from its multiplicities is a network only and is
/// rejected by the sandpile dynamics.
class SandpileGraph {
 public:
  SandpileGraph() = default;

  static SandpileGraph build(std::size_t vertex_count, const std::vector<EdgeSpec>& edges, VertexId sink) {
    std::vector<EdgeRecord> records;
    records.reserve(edges.size());
    for (const auto& e : edges) {
      require(e.multiplicity >= 1, ErrorCode::InvalidArgument, "edge multiplicity must be at least 1");
      records.push_back({e.u, e.v, e.multiplicity, static_cast<double>(e.multiplicity)});
    }
    return from_records(vertex_count, std::move(records), sink);
  }

  /// Vertex count inferred as one past the largest id mentioned.
  static SandpileGraph build(const std::vector<EdgeSpec>& edges, VertexId sink) {
    std::size_t n = sink + 1;
    for (const auto& e : edges) n = std::max({n, e.u + 1, e.v + 1});
    return build(n, edges, sink);
  }

  /// General records; conductances must be positive and finite.
  static SandpileGraph from_records(std::size_t vertex_count, std::vector<EdgeRecord> records, VertexId sink) {
    require(vertex_count >= 2, ErrorCode::InvalidArgument, "a sandpile needs the sink and at least one ordinary vertex");
    require(sink < vertex_count, ErrorCode::BadSink, "sink id out of range");
    SandpileGraph g;
    g.n_ = vertex_count;
    g.sink_ = sink;
    for (const auto& r : records) {
      require(r.u < vertex_count && r.v < vertex_count, ErrorCode::InvalidArgument, "edge endpoint out of range");
      require(r.u != r.v, ErrorCode::SelfLoop, "self-loop at vertex " + std::to_string(r.u));
      require(r.multiplicity >= 1, ErrorCode::InvalidArgument, "edge multiplicity must be at least 1");
      require(std::isfinite(r.conductance) && r.conductance > 0.0, ErrorCode::InvalidArgument,
              "edge conductance must be positive");
    }
    g.edges_ = std::move(records);
    g.index();
    require(g.connected(), ErrorCode::DisconnectedGraph, "graph is not connected");
    return g;
  }

  std::size_t vertex_count() const { return n_; }
  std::size_t ordinary_count() const { return n_ - 1; }
  VertexId sink() const { return sink_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  bool is_sink(VertexId v) const { return v == sink_; }
  std::int64_t degree(VertexId v) const { return degree_.at(v); }
  double weighted_degree(VertexId v) const { return weighted_degree_.at(v); }
  const std::vector<Neighbor>& neighbors(VertexId v) const { return neighbors_.at(v); }
  const std::vector<EdgeId>& incident_edges(VertexId v) const { return incident_.at(v); }

  std::int64_t sink_multiplicity(VertexId v) const {
    for (const auto& nb : neighbors_.at(v))
      if (nb.vertex == sink_) return nb.multiplicity;
    return 0;
  }
  double sink_conductance(VertexId v) const {
    for (const auto& nb : neighbors_.at(v))
      if (nb.vertex == sink_) return nb.conductance;
    return 0.0;
  }
  bool sink_adjacent(VertexId v) const { return !is_sink(v) && sink_multiplicity(v) > 0; }

  std::int64_t multiplicity(VertexId a, VertexId b) const {
    for (const auto& nb : neighbors_.at(a))
      if (nb.vertex == b) return nb.multiplicity;
    return 0;
  }

  /// Ordinary vertices are indexed 0..ordinary_count()-1 skipping the sink.
  std::size_t ordinary_index(VertexId v) const {
    require(v < n_ && v != sink_, ErrorCode::InvalidArgument, "not an ordinary vertex: " + std::to_string(v));
    return v < sink_ ? v : v - 1;
  }
  VertexId ordinary_vertex(std::size_t i) const { return i < sink_ ? i : i + 1; }
  std::vector<VertexId> ordinary_vertices() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < n_; ++v)
      if (v != sink_) out.push_back(v);
    return out;
  }
  std::vector<VertexId> boundary_vertices() const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < n_; ++v)
      if (sink_adjacent(v)) out.push_back(v);
    return out;
  }

  /// True when every conductance equals its multiplicity.
  bool integral() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [](const EdgeRecord& e) { return e.conductance == static_cast<double>(e.multiplicity); });
  }
  std::int64_t total_multiplicity() const {
    std::int64_t total = 0;
    for (const auto& e : edges_) total += e.multiplicity;
    return total;
  }
  std::int64_t max_degree() const {
    std::int64_t best = 0;
    for (VertexId v = 0; v < n_; ++v)
      if (v != sink_) best = std::max(best, degree_[v]);
    return best;
  }

  const std::optional<PlanarEmbedding>& embedding() const { return embedding_; }
  void set_embedding(PlanarEmbedding emb) {
    require(emb.rotation.size() == n_, ErrorCode::NonPlanarEmbedding, "embedding has wrong vertex count");
    const auto rs = to_rotation_system(edge_ends(), emb);
    for (VertexId v = 0; v < n_; ++v)
      require(emb.rotation[v].size() == incident_[v].size(), ErrorCode::NonPlanarEmbedding,
              "rotation at vertex " + std::to_string(v) + " does not list every incident edge");
    const auto faces = trace_faces(rs);
    require(satisfies_euler(rs, faces), ErrorCode::NonPlanarEmbedding, "rotation system violates Euler's formula");
    if (emb.outer_face)
      require(*emb.outer_face < faces.face_count(), ErrorCode::NonPlanarEmbedding, "outer face out of range");
    embedding_ = std::move(emb);
  }

  std::vector<std::pair<VertexId, VertexId>> edge_ends() const {
    std::vector<std::pair<VertexId, VertexId>> ends;
    ends.reserve(edges_.size());
    for (const auto& e : edges_) ends.emplace_back(e.u, e.v);
    return ends;
  }

  /// Same topology with new per-record conductances.
  SandpileGraph with_conductances(const std::vector<double>& conductance) const {
    require(conductance.size() == edges_.size(), ErrorCode::InvalidArgument, "one conductance per edge record");
    auto records = edges_;
    for (std::size_t i = 0; i < records.size(); ++i) records[i].conductance = conductance[i];
    auto g = from_records(n_, std::move(records), sink_);
    g.embedding_ = embedding_;
    return g;
  }

  bool operator==(const SandpileGraph& o) const {
    return n_ == o.n_ && sink_ == o.sink_ && edges_ == o.edges_ && embedding_ == o.embedding_;
  }

 private:
  void index() {
    degree_.assign(n_, 0);
    weighted_degree_.assign(n_, 0.0);
    incident_.assign(n_, {});
    std::vector<std::map<VertexId, Neighbor>> merged(n_);
    for (EdgeId id = 0; id < edges_.size(); ++id) {
      const auto& e = edges_[id];
      for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
        degree_[a] += e.multiplicity;
        weighted_degree_[a] += e.conductance;
        incident_[a].push_back(id);
        auto& nb = merged[a][b];
        nb.vertex = b;
        nb.multiplicity += e.multiplicity;
        nb.conductance += e.conductance;
      }
    }
    neighbors_.assign(n_, {});
    for (VertexId v = 0; v < n_; ++v)
      for (const auto& [_, nb] : merged[v]) neighbors_[v].push_back(nb);
  }

  bool connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<VertexId> stack{sink_};
    seen[sink_] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const VertexId x = stack.back();
      stack.pop_back();
      for (const auto& nb : neighbors_[x])
        if (!seen[nb.vertex]) {
          seen[nb.vertex] = 1;
          ++count;
          stack.push_back(nb.vertex);
        }
    }
    return count == n_;
  }

  std::size_t n_ = 0;
  VertexId sink_ = 0;
  std::vector<EdgeRecord> edges_;
  std::vector<std::int64_t> degree_;
  std::vector<double> weighted_degree_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::vector<std::vector<EdgeId>> incident_;
  std::optional<PlanarEmbedding> embedding_;
};

/// Component label of every ordinary vertex in the subgraph induced on the
/// ordinary vertices; the sink gets label SIZE_MAX.
inline std::vector<std::size_t> ordinary_components(const SandpileGraph& g) {
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> label(g.vertex_count(), none);
  std::size_t next = 0;
  for (VertexId start = 0; start < g.vertex_count(); ++start) {
    if (g.is_sink(start) || label[start] != none) continue;
    std::vector<VertexId> stack{start};
    label[start] = next;
    while (!stack.empty()) {
      const VertexId x = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(x))
        if (!g.is_sink(nb.vertex) && label[nb.vertex] == none) {
          label[nb.vertex] = next;
          stack.push_back(nb.vertex);
        }
    }
    ++next;
  }
  return label;
}

inline bool ordinary_connected(const SandpileGraph& g) {
  const auto label = ordinary_components(g);
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (!g.is_sink(v) && label[v] != 0) return false;
  return true;
}

/// Full conductance-weighted Laplacian D - A over all vertices.
inline Eigen::MatrixXd laplacian(const SandpileGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    const auto u = static_cast<Eigen::Index>(e.u), v = static_cast<Eigen::Index>(e.v);
    lap(u, u) += e.conductance;
    lap(v, v) += e.conductance;
    lap(u, v) -= e.conductance;
    lap(v, u) -= e.conductance;
  }
  return lap;
}

/// Laplacian with the sink row and column removed, indexed by ordinary index.
inline Eigen::SparseMatrix<double> grounded_laplacian(const SandpileGraph& g) {
  const auto m = static_cast<Eigen::Index>(g.ordinary_count());
  std::vector<Eigen::Triplet<double>> triplets;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (g.is_sink(v)) continue;
    const auto row = static_cast<Eigen::Index>(g.ordinary_index(v));
    triplets.emplace_back(row, row, g.weighted_degree(v));
    for (const auto& nb : g.neighbors(v))
      if (!g.is_sink(nb.vertex))
        triplets.emplace_back(row, static_cast<Eigen::Index>(g.ordinary_index(nb.vertex)), -nb.conductance);
  }
  Eigen::SparseMatrix<double> lap(m, m);
  lap.setFromTriplets(triplets.begin(), triplets.end());
  return lap;
}

// ---------------------------------------------------------------------------
// Layouts and embeddings

using Point = std::array<double, 2>;

/// Straight-line drawing. Ordinary vertices have positions; sink edges leave
/// in the given outward direction and the sink sits at infinity, unless
/// sink_position is set, in which case the sink is drawn like any vertex.
struct Layout {
  std::vector<Point> position;                  // per vertex (sink entry unused at infinity)
  std::vector<std::optional<Point>> direction;  // per edge record, sink edges only
  bool sink_at_infinity = true;
};

namespace detail {

inline double angle_of(const Point& from, const Point& to) { return std::atan2(to[1] - from[1], to[0] - from[0]); }

inline double signed_area(const std::vector<Point>& polygon) {
  double area = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    area += a[0] * b[1] - b[0] * a[1];
  }
  return area / 2.0;
}

}  // namespace detail

/// Counterclockwise rotation system read off a straight-line drawing. With the
/// sink at infinity the cyclic order at the sink is ambiguous in orientation;
/// both are tried and the one satisfying Euler's formula is kept.
inline PlanarEmbedding embed_from_layout(const SandpileGraph& g, const Layout& layout) {
  require(layout.position.size() == g.vertex_count(), ErrorCode::NonPlanarEmbedding, "layout needs a position per vertex");
  const VertexId s = g.sink();
  double extent = 1.0;
  for (VertexId v = 0; v < g.vertex_count(); ++v)
    if (v != s || !layout.sink_at_infinity)
      extent = std::max({extent, std::abs(layout.position[v][0]), std::abs(layout.position[v][1])});

  // Far endpoint used for a sink edge seen from its ordinary end.
  auto far_point = [&](EdgeId id, VertexId from) {
    const auto& dir = layout.direction.at(id);
    require(dir.has_value(), ErrorCode::NonPlanarEmbedding, "sink edge without an outward direction");
    const Point p = layout.position[from];
    return Point{p[0] + (*dir)[0], p[1] + (*dir)[1]};
  };

  PlanarEmbedding emb;
  emb.rotation.resize(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (v == s && layout.sink_at_infinity) continue;
    std::vector<std::pair<double, EdgeId>> keyed;
    for (EdgeId id : g.incident_edges(v)) {
      const VertexId w = g.edges()[id].other(v);
      const Point target = (w == s && layout.sink_at_infinity) ? far_point(id, v) : layout.position[w];
      keyed.emplace_back(detail::angle_of(layout.position[v], target), id);
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& [_, id] : keyed) emb.rotation[v].push_back(id);
  }

  if (layout.sink_at_infinity) {
    Point centre{0.0, 0.0};
    std::size_t count = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (v != s) {
        centre[0] += layout.position[v][0];
        centre[1] += layout.position[v][1];
        ++count;
      }
    centre[0] /= static_cast<double>(count);
    centre[1] /= static_cast<double>(count);
    std::vector<std::pair<double, EdgeId>> keyed;
    for (EdgeId id : g.incident_edges(s)) {
      const VertexId w = g.edges()[id].other(s);
      const auto& dir = *layout.direction.at(id);
      const double scale = 1e6 * extent / std::max(std::hypot(dir[0], dir[1]), 1e-300);
      const Point p = layout.position[w];
      const Point far{p[0] + scale * dir[0], p[1] + scale * dir[1]};
      keyed.emplace_back(detail::angle_of(centre, far), id);
    }
    std::sort(keyed.begin(), keyed.end());
    for (bool reversed : {true, false}) {
      emb.rotation[s].clear();
      for (const auto& [_, id] : keyed) emb.rotation[s].push_back(id);
      if (reversed) std::reverse(emb.rotation[s].begin(), emb.rotation[s].end());
      const auto rs = to_rotation_system(g.edge_ends(), emb);
      if (satisfies_euler(rs, trace_faces(rs))) return emb;
    }
    fail(ErrorCode::NonPlanarEmbedding, "layout does not describe a planar drawing");
  }

  const auto rs = to_rotation_system(g.edge_ends(), emb);
  const auto faces = trace_faces(rs);
  require(satisfies_euler(rs, faces), ErrorCode::NonPlanarEmbedding, "layout does not describe a planar drawing");
  // Bounded faces are traced clockwise; the outer face is the one traced
  // counterclockwise, i.e. with the largest signed area.
  double largest = 0.0;
  for (std::size_t f = 0; f < faces.face_count(); ++f) {
    std::vector<Point> polygon;
    for (Dart d : faces.faces[f]) polygon.push_back(layout.position[rs.tail(d)]);
    const double area = detail::signed_area(polygon);
    if (area > largest) {
      largest = area;
      emb.outer_face = f;
    }
  }
  return emb;
}

// ---------------------------------------------------------------------------
// Builders

struct GridLabel {
  std::size_t i = 1;
  std::size_t j = 1;
};

/// Row-major id of grid label (i,j), 1-based.
constexpr VertexId grid_id(std::size_t n, std::size_t i, std::size_t j) { return (i - 1) * n + (j - 1); }
constexpr GridLabel grid_label(std::size_t n, VertexId v) { return {v / n + 1, v % n + 1}; }

namespace detail {

/// Builds a lattice patch: every lattice direction that leaves the patch
/// becomes one unit sink edge, so boundary vertices keep full lattice degree.
/// Sink edges are drawn radially from the patch centroid (fanned out slightly
/// when a vertex has several), which keeps them crossing-free on convex
/// patches.
inline SandpileGraph lattice_patch(const std::vector<Point>& position,
                                   const std::vector<std::vector<std::optional<VertexId>>>& slot_neighbor,
                                   const std::vector<std::vector<Point>>& slot_direction) {
  const std::size_t count = position.size();
  const VertexId sink = count;
  Point centre{0.0, 0.0};
  for (const auto& p : position) {
    centre[0] += p[0] / static_cast<double>(count);
    centre[1] += p[1] / static_cast<double>(count);
  }
  constexpr double fan = 1e-3;
  std::vector<EdgeRecord> records;
  std::vector<std::optional<Point>> direction;
  for (VertexId v = 0; v < count; ++v) {
    const double radial = angle_of(centre, position[v]);
    std::vector<std::pair<double, std::size_t>> outward;
    for (std::size_t k = 0; k < slot_neighbor[v].size(); ++k) {
      const auto& nb = slot_neighbor[v][k];
      if (nb && *nb > v) {
        records.push_back({v, *nb, 1, 1.0});
        direction.emplace_back();
      } else if (!nb) {
        double offset = std::atan2(slot_direction[v][k][1], slot_direction[v][k][0]) - radial;
        offset = std::remainder(offset, 2.0 * std::acos(-1.0));
        outward.emplace_back(offset, k);
      }
    }
    std::sort(outward.begin(), outward.end());
    for (std::size_t m = 0; m < outward.size(); ++m) {
      const double a = radial + fan * (static_cast<double>(m) - static_cast<double>(outward.size() - 1) / 2.0);
      records.push_back({v, sink, 1, 1.0});
      direction.emplace_back(Point{std::cos(a), std::sin(a)});
    }
  }
  auto g = SandpileGraph::from_records(count + 1, std::move(records), sink);
  Layout layout;
  layout.position = position;
  layout.position.push_back(centre);
  layout.direction = std::move(direction);
  g.set_embedding(embed_from_layout(g, layout));
  return g;
}

}  // namespace detail

/// GRID_n: n x n grid, label (i,j) has id (i-1)n+(j-1), sink id n^2. Edge
/// vertices get one sink edge and corners two, so every degree is 4.
inline SandpileGraph grid(std::size_t n) {
  require(n >= 2, ErrorCode::InvalidArgument, "grid needs n >= 2");
  std::vector<Point> position(n * n);
  std::vector<std::vector<std::optional<VertexId>>> slots(n * n, std::vector<std::optional<VertexId>>(4));
  // Drawn with i growing downwards and j to the right.
  const std::vector<Point> dirs{{0.0, 1.0}, {0.0, -1.0}, {-1.0, 0.0}, {1.0, 0.0}};
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      const VertexId v = grid_id(n, i, j);
      position[v] = {static_cast<double>(j), -static_cast<double>(i)};
      if (i > 1) slots[v][0] = grid_id(n, i - 1, j);
      if (i < n) slots[v][1] = grid_id(n, i + 1, j);
      if (j > 1) slots[v][2] = grid_id(n, i, j - 1);
      if (j < n) slots[v][3] = grid_id(n, i, j + 1);
    }
  return detail::lattice_patch(position, slots, std::vector<std::vector<Point>>(n * n, dirs));
}

namespace detail {

// Axial hex coordinates.
inline int hex_distance(int q, int r) { return (std::abs(q) + std::abs(r) + std::abs(q + r)) / 2; }

}  // namespace detail

/// Triangular lattice patch: all lattice points within hex distance n of a
/// centre. triangular(1) is a centre with its six neighbours (a triangle fan).
inline SandpileGraph triangular(std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "triangular needs n >= 1");
  const int radius = static_cast<int>(n);
  std::map<std::pair<int, int>, VertexId> id;
  std::vector<std::pair<int, int>> coord;
  for (int q = -radius; q <= radius; ++q)
    for (int r = -radius; r <= radius; ++r)
      if (detail::hex_distance(q, r) <= radius) {
        id[{q, r}] = coord.size();
        coord.emplace_back(q, r);
      }
  const std::vector<std::pair<int, int>> steps{{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  auto to_point = [](int q, int r) { return Point{q + 0.5 * r, r * std::sqrt(3.0) / 2.0}; };
  std::vector<Point> dirs;
  for (auto [dq, dr] : steps) dirs.push_back(to_point(dq, dr));
  std::vector<Point> position;
  std::vector<std::vector<std::optional<VertexId>>> slots;
  for (auto [q, r] : coord) {
    position.push_back(to_point(q, r));
    slots.emplace_back();
    for (auto [dq, dr] : steps) {
      auto it = id.find({q + dq, r + dr});
      slots.back().push_back(it == id.end() ? std::nullopt : std::optional<VertexId>(it->second));
    }
  }
  return detail::lattice_patch(position, slots, std::vector<std::vector<Point>>(coord.size(), dirs));
}

/// Honeycomb patch: the hexagonal cells within hex distance n-1 of a centre
/// cell; honeycomb(1) is a single hexagon. Vertices are the cell corners and
/// every missing lattice edge goes to the sink.
inline SandpileGraph honeycomb(std::size_t n) {
  require(n >= 1, ErrorCode::InvalidArgument, "honeycomb needs n >= 1");
  const int radius = static_cast<int>(n) - 1;
  // Cell centres form a triangular lattice with spacing sqrt(3); corners sit
  // at unit distance. Corners are keyed by rounded doubled coordinates.
  const double root3 = std::sqrt(3.0);
  auto cell_centre = [&](int q, int r) { return Point{root3 * (q + 0.5 * r), 1.5 * r}; };
  auto key = [](const Point& p) {
    return std::pair<long long, long long>{std::llround(p[0] * 1000.0), std::llround(p[1] * 1000.0)};
  };
  std::map<std::pair<long long, long long>, VertexId> id;
  std::vector<Point> position;
  for (int q = -radius; q <= radius; ++q)
    for (int r = -radius; r <= radius; ++r) {
      if (detail::hex_distance(q, r) > radius) continue;
      const Point c = cell_centre(q, r);
      for (int k = 0; k < 6; ++k) {
        const double a = (60.0 * k + 30.0) * std::acos(-1.0) / 180.0;
        const Point p{c[0] + std::cos(a), c[1] + std::sin(a)};
        if (id.emplace(key(p), position.size()).second) position.push_back(p);
      }
    }
  // Each corner has three lattice directions; which three depends on its
  // sublattice. Corners pointing up have 2y = 2 (mod 3).
  const std::vector<Point> up{{0.0, 1.0}, {root3 / 2.0, -0.5}, {-root3 / 2.0, -0.5}};
  const std::vector<Point> down{{0.0, -1.0}, {root3 / 2.0, 0.5}, {-root3 / 2.0, 0.5}};
  std::vector<std::vector<std::optional<VertexId>>> slots(position.size());
  std::vector<std::vector<Point>> dirs(position.size());
  for (VertexId v = 0; v < position.size(); ++v) {
    const long long twice_y = std::llround(position[v][1] * 2.0);
    dirs[v] = ((twice_y % 3) + 3) % 3 == 2 ? up : down;
    for (const auto& d : dirs[v]) {
      auto it = id.find(key(Point{position[v][0] + d[0], position[v][1] + d[1]}));
      slots[v].push_back(it == id.end() ? std::nullopt : std::optional<VertexId>(it->second));
    }
  }
  return detail::lattice_patch(position, slots, dirs);
}

/// Path of k ordinary vertices, each with one unit sink edge. Vertex i has
/// id i, the sink is k.
inline SandpileGraph line_sandpile(std::size_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "line sandpile needs k >= 1");
  std::vector<EdgeRecord> records;
  std::vector<std::optional<Point>> direction;
  for (VertexId i = 0; i + 1 < k; ++i) {
    records.push_back({i, i + 1, 1, 1.0});
    direction.emplace_back();
  }
  for (VertexId i = 0; i < k; ++i) {
    records.push_back({i, k, 1, 1.0});
    direction.emplace_back(Point{0.0, -1.0});
  }
  auto g = SandpileGraph::from_records(k + 1, std::move(records), k);
  Layout layout;
  for (VertexId i = 0; i < k; ++i) layout.position.push_back({static_cast<double>(i), 0.0});
  layout.position.push_back({0.0, 0.0});
  layout.direction = std::move(direction);
  g.set_embedding(embed_from_layout(g, layout));
  return g;
}

}  // namespace sandpile
