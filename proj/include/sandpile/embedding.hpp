#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sandpile/error.hpp"

namespace sandpile {

using VertexId = std::size_t;
using EdgeId = std::size_t;

/// A dart is one direction of an edge: dart 2e runs from the edge's first
/// endpoint to its second, dart 2e+1 runs back.
using Dart = std::size_t;

constexpr EdgeId dart_edge(Dart d) { return d / 2; }
constexpr Dart dart_reverse(Dart d) { return d ^ 1U; }
constexpr Dart dart_of(EdgeId e, bool reversed) { return 2 * e + (reversed ? 1 : 0); }

/// Combinatorial map over an arbitrary multigraph (loops allowed).
/// rotation[v] lists the darts leaving v in counterclockwise order.
struct RotationSystem {
  std::vector<std::pair<VertexId, VertexId>> ends;  // per edge
  std::vector<std::vector<Dart>> rotation;           // per vertex

  std::size_t vertex_count() const { return rotation.size(); }
  std::size_t edge_count() const { return ends.size(); }
  VertexId tail(Dart d) const { return d % 2 == 0 ? ends[d / 2].first : ends[d / 2].second; }
  VertexId head(Dart d) const { return tail(dart_reverse(d)); }
};

struct FaceStructure {
  std::vector<std::vector<Dart>> faces;  // boundary walk of each face
  std::vector<std::size_t> face_of;      // per dart

  std::size_t face_count() const { return faces.size(); }
};

/// Traces the faces of a rotation system. The successor of dart d in its
/// face is the dart following reverse(d) in the rotation at head(d).
inline FaceStructure trace_faces(const RotationSystem& rs) {
  const std::size_t darts = 2 * rs.edge_count();
  std::vector<std::size_t> position(darts, static_cast<std::size_t>(-1));
  for (VertexId v = 0; v < rs.vertex_count(); ++v) {
    const auto& rot = rs.rotation[v];
    for (std::size_t i = 0; i < rot.size(); ++i) {
      require(rot[i] < darts && rs.tail(rot[i]) == v, ErrorCode::NonPlanarEmbedding,
              "rotation lists a dart that does not leave its vertex");
      require(position[rot[i]] == static_cast<std::size_t>(-1), ErrorCode::NonPlanarEmbedding,
              "dart listed twice in rotation system");
      position[rot[i]] = i;
    }
  }
  for (Dart d = 0; d < darts; ++d)
    require(position[d] != static_cast<std::size_t>(-1), ErrorCode::NonPlanarEmbedding,
            "dart missing from rotation system");

  FaceStructure fs;
  fs.face_of.assign(darts, static_cast<std::size_t>(-1));
  for (Dart start = 0; start < darts; ++start) {
    if (fs.face_of[start] != static_cast<std::size_t>(-1)) continue;
    const std::size_t face = fs.faces.size();
    fs.faces.emplace_back();
    Dart d = start;
    do {
      fs.face_of[d] = face;
      fs.faces[face].push_back(d);
      const Dart back = dart_reverse(d);
      const auto& rot = rs.rotation[rs.tail(back)];
      d = rot[(position[back] + 1) % rot.size()];
    } while (d != start);
  }
  return fs;
}

/// Euler characteristic check for a connected map: V - E + F == 2.
inline bool satisfies_euler(const RotationSystem& rs, const FaceStructure& fs) {
  const auto v = static_cast<long long>(rs.vertex_count());
  const auto e = static_cast<long long>(rs.edge_count());
  const auto f = static_cast<long long>(fs.face_count());
  return v - e + f == 2;
}

/// Rotation system of a loopless graph, given per-vertex cyclic lists of
/// incident edge ids (counterclockwise). This is the form stored with a
/// SandpileGraph and written to JSON.
struct PlanarEmbedding {
  std::vector<std::vector<EdgeId>> rotation;
  std::optional<std::size_t> outer_face;

  bool operator==(const PlanarEmbedding&) const = default;
};

inline RotationSystem to_rotation_system(const std::vector<std::pair<VertexId, VertexId>>& ends,
                                         const PlanarEmbedding& emb) {
  RotationSystem rs;
  rs.ends = ends;
  rs.rotation.resize(emb.rotation.size());
  for (VertexId v = 0; v < emb.rotation.size(); ++v) {
    for (EdgeId e : emb.rotation[v]) {
      require(e < ends.size(), ErrorCode::NonPlanarEmbedding, "rotation references unknown edge");
      const auto [a, b] = ends[e];
      require(a != b, ErrorCode::NonPlanarEmbedding, "edge-id rotations cannot express loops");
      require(a == v || b == v, ErrorCode::NonPlanarEmbedding, "rotation lists a non-incident edge");
      rs.rotation[v].push_back(dart_of(e, a != v));
    }
  }
  return rs;
}

}  // namespace sandpile
