#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/harmonic.hpp"

namespace sandpile {

/// One dual edge per primal edge record, with the same id. A dual edge joins
/// the faces on the two sides of its primal edge; its conductance is the
/// primal resistance. Primal bridges become loops.
struct DualGraph {
  RotationSystem map;  // vertices = primal faces, rotation = face walks
  std::vector<double> conductance;
  FaceStructure primal_faces;
  std::size_t vertex_count() const { return map.vertex_count(); }
  std::size_t edge_count() const { return map.edge_count(); }
  bool is_loop(EdgeId e) const { return map.ends[e].first == map.ends[e].second; }
};

inline DualGraph dualize(const SandpileGraph& g, const PlanarEmbedding& emb) {
  const auto rs = to_rotation_system(g.edge_ends(), emb);
  DualGraph dual;
  dual.primal_faces = trace_faces(rs);
  require(satisfies_euler(rs, dual.primal_faces), ErrorCode::NonPlanarEmbedding, "rotation system violates Euler's formula");
  const auto& faces = dual.primal_faces;
  for (EdgeId e = 0; e < rs.edge_count(); ++e) {
    dual.map.ends.emplace_back(faces.face_of[2 * e], faces.face_of[2 * e + 1]);
    dual.conductance.push_back(1.0 / g.edges()[e].conductance);
  }
  // Dual dart d leaves the face containing primal dart d.
  dual.map.rotation = faces.faces;
  return dual;
}

inline DualGraph dualize(const SandpileGraph& g) {
  require(g.embedding().has_value(), ErrorCode::NonPlanarEmbedding, "graph has no embedding");
  return dualize(g, *g.embedding());
}

/// Faces of the dual map; for a connected plane map these correspond to the
/// primal vertices.
inline FaceStructure dual_faces(const DualGraph& dual) { return trace_faces(dual.map); }

/// Dual of the dual map, as a rotation system: its vertices are the faces of
/// the dual, and edge ids are kept throughout.
inline RotationSystem dual_of_dual(const DualGraph& dual) {
  const auto faces = dual_faces(dual);
  RotationSystem out;
  for (EdgeId e = 0; e < dual.edge_count(); ++e) out.ends.emplace_back(faces.face_of[2 * e], faces.face_of[2 * e + 1]);
  out.rotation = faces.faces;
  return out;
}

/// Dual with the dual of the power edge removed. A unit current enters at
/// `source` and leaves at `sink`, the endpoints of the removed edge.
struct RestrictedDual {
  std::size_t vertex_count = 0;
  std::vector<std::pair<VertexId, VertexId>> ends;  // by dual edge id; loops kept but inert
  std::vector<double> conductance;
  std::vector<char> present;  // false for the removed edge
  EdgeId removed = 0;
  VertexId source = 0;
  VertexId sink = 0;
  RotationSystem map;  // rotation without the removed edge

  bool usable(EdgeId e) const { return present[e] && ends[e].first != ends[e].second; }
};

/// Removes dual edge `power` from an arbitrary dual graph.
inline RestrictedDual restrict_network(const DualGraph& dual, EdgeId power) {
  require(power < dual.edge_count(), ErrorCode::InvalidArgument, "edge id out of range");
  RestrictedDual rd;
  rd.vertex_count = dual.vertex_count();
  rd.ends = dual.map.ends;
  rd.conductance = dual.conductance;
  rd.present.assign(dual.edge_count(), 1);
  rd.present[power] = 0;
  rd.removed = power;
  rd.source = dual.map.ends[power].first;
  rd.sink = dual.map.ends[power].second;
  require(rd.source != rd.sink, ErrorCode::Disconnecting, "power edge dualizes to a loop");
  rd.map = dual.map;
  for (auto& rot : rd.map.rotation)
    rot.erase(std::remove_if(rot.begin(), rot.end(), [power](Dart d) { return dart_edge(d) == power; }), rot.end());
  // Connectivity of what remains.
  std::vector<std::vector<VertexId>> adj(rd.vertex_count);
  for (EdgeId e = 0; e < rd.ends.size(); ++e)
    if (rd.usable(e)) {
      adj[rd.ends[e].first].push_back(rd.ends[e].second);
      adj[rd.ends[e].second].push_back(rd.ends[e].first);
    }
  std::vector<char> seen(rd.vertex_count, 0);
  std::vector<VertexId> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto x = stack.back();
    stack.pop_back();
    for (auto y : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
  }
  require(count == rd.vertex_count, ErrorCode::Disconnecting, "removing the power edge disconnects the dual");
  return rd;
}

/// Restricted dual for a primal boundary (sink-incident) edge.
inline RestrictedDual restricted_dual(const SandpileGraph& g, const PlanarEmbedding& emb, EdgeId e) {
  require(e < g.edge_count(), ErrorCode::InvalidArgument, "edge id out of range");
  const auto& rec = g.edges()[e];
  require(g.is_sink(rec.u) || g.is_sink(rec.v), ErrorCode::NotBoundaryEdge, "power edge must be incident to the sink");
  return restrict_network(dualize(g, emb), e);
}

inline RestrictedDual restricted_dual(const SandpileGraph& g, EdgeId e) {
  require(g.embedding().has_value(), ErrorCode::NonPlanarEmbedding, "graph has no embedding");
  return restricted_dual(g, *g.embedding(), e);
}

inline Eigen::MatrixXd laplacian(const RestrictedDual& rd) {
  const auto n = static_cast<Eigen::Index>(rd.vertex_count);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (EdgeId e = 0; e < rd.ends.size(); ++e) {
    if (!rd.usable(e)) continue;
    const auto a = static_cast<Eigen::Index>(rd.ends[e].first), b = static_cast<Eigen::Index>(rd.ends[e].second);
    lap(a, a) += rd.conductance[e];
    lap(b, b) += rd.conductance[e];
    lap(a, b) -= rd.conductance[e];
    lap(b, a) -= rd.conductance[e];
  }
  return lap;
}

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending, eigenvalues(0) ~ 0
  Eigen::MatrixXd eigenvectors;  // orthonormal columns
};

inline SpectralDecomposition spectral_decomposition(const RestrictedDual& rd) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(rd));
  require(solver.info() == Eigen::Success, ErrorCode::SingularSystem, "eigendecomposition failed");
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  if (out.eigenvalues.size() > 1)
    require(out.eigenvalues(1) > 1e-12 * std::max(1.0, out.eigenvalues.maxCoeff()), ErrorCode::SingularSystem,
            "restricted dual is disconnected");
  return out;
}

/// Z(p) - Z(q) for a unit current from source to sink, from the spectral sum
/// over the nonzero modes: sum_{k>0} (psi_k(p)-psi_k(q))(psi_k(u)-psi_k(v))/lambda_k.
/// Dropping the constant mode is the limit of the L + eps I regularization.
inline double spectral_potential_difference(const RestrictedDual& rd, const SpectralDecomposition& spec, VertexId p,
                                            VertexId q) {
  const auto& psi = spec.eigenvectors;
  const auto u = static_cast<Eigen::Index>(rd.source), v = static_cast<Eigen::Index>(rd.sink);
  const auto pi = static_cast<Eigen::Index>(p), qi = static_cast<Eigen::Index>(q);
  double total = 0.0;
  for (Eigen::Index k = 1; k < spec.eigenvalues.size(); ++k)
    total += (psi(pi, k) - psi(qi, k)) * (psi(u, k) - psi(v, k)) / spec.eigenvalues(k);
  return total;
}

/// Magnitude of the current in dual edge e (0 for loops and the removed edge).
inline double eigen_current(const RestrictedDual& rd, const SpectralDecomposition& spec, EdgeId e) {
  if (!rd.usable(e)) return 0.0;
  const auto [p, q] = rd.ends[e];
  return rd.conductance[e] * std::abs(spectral_potential_difference(rd, spec, p, q));
}

inline double eigen_current(const RestrictedDual& rd, EdgeId e) { return eigen_current(rd, spectral_decomposition(rd), e); }

/// Total current between dual vertices p and q over all their parallel edges.
inline double eigen_current(const RestrictedDual& rd, const SpectralDecomposition& spec, VertexId p, VertexId q) {
  if (p == q) return 0.0;
  double conductance = 0.0;
  for (EdgeId e = 0; e < rd.ends.size(); ++e)
    if (rd.usable(e) && ((rd.ends[e].first == p && rd.ends[e].second == q) ||
                         (rd.ends[e].first == q && rd.ends[e].second == p)))
      conductance += rd.conductance[e];
  return conductance * std::abs(spectral_potential_difference(rd, spec, p, q));
}

/// Potentials for a unit current from source to sink with the sink grounded,
/// by a sparse grounded solve.
inline std::vector<double> direct_potentials(const RestrictedDual& rd) {
  const std::size_t n = rd.vertex_count;
  auto index = [&](VertexId x) { return static_cast<Eigen::Index>(x < rd.sink ? x : x - 1); };
  std::vector<Eigen::Triplet<double>> triplets;
  for (EdgeId e = 0; e < rd.ends.size(); ++e) {
    if (!rd.usable(e)) continue;
    const auto [a, b] = rd.ends[e];
    const double c = rd.conductance[e];
    if (a != rd.sink) triplets.emplace_back(index(a), index(a), c);
    if (b != rd.sink) triplets.emplace_back(index(b), index(b), c);
    if (a != rd.sink && b != rd.sink) {
      triplets.emplace_back(index(a), index(b), -c);
      triplets.emplace_back(index(b), index(a), -c);
    }
  }
  Eigen::SparseMatrix<double> lap(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n - 1));
  lap.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(lap);
  require(ldlt.info() == Eigen::Success, ErrorCode::SingularSystem, "restricted dual factorization failed");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n - 1));
  rhs(index(rd.source)) = 1.0;
  const Eigen::VectorXd z = ldlt.solve(rhs);
  std::vector<double> out(n, 0.0);
  for (VertexId x = 0; x < n; ++x)
    if (x != rd.sink) out[x] = z(index(x));
  return out;
}

inline double direct_current(const RestrictedDual& rd, const std::vector<double>& potentials, EdgeId e) {
  if (!rd.usable(e)) return 0.0;
  const auto [p, q] = rd.ends[e];
  return rd.conductance[e] * std::abs(potentials[p] - potentials[q]);
}

inline double direct_current(const RestrictedDual& rd, EdgeId e) { return direct_current(rd, direct_potentials(rd), e); }

// ---------------------------------------------------------------------------
// Planar tcl bound

struct PlanarTclBound {
  double bound = 0.0;                 // |E| * max over (power edge, target edge) of 1/potential
  double max_inverse_potential = 0.0;
  EdgeId power_edge = 0;
  EdgeId target_edge = 0;
  bool used_primal_fallback = false;  // single face or a power edge that dualizes to a loop
};

/// For every sink edge e_k as power edge and every other sink edge pq as
/// target, the current in the dual of pq divided by its conductance is the
/// potential of pq's ordinary end with unit potential across e_k. The bound
/// is |E| times the largest reciprocal of these potentials.
inline PlanarTclBound planar_tcl_bound(const SandpileGraph& g, const PlanarEmbedding& emb) {
  PlanarTclBound out;
  const auto dual = dualize(g, emb);
  std::vector<EdgeId> boundary;
  for (EdgeId e = 0; e < g.edge_count(); ++e)
    if (g.is_sink(g.edges()[e].u) || g.is_sink(g.edges()[e].v)) boundary.push_back(e);
  const double edges = static_cast<double>(g.total_multiplicity());
  auto primal_value = [&]() {
    const auto est = tcl_upper_estimate(g);
    out.used_primal_fallback = true;
    out.max_inverse_potential = est.max_inverse_potential;
    out.bound = est.relaxed;
    return out;
  };
  if (dual.vertex_count() == 1) return primal_value();
  for (EdgeId power : boundary) {
    if (dual.is_loop(power)) return primal_value();
    const auto rd = restrict_network(dual, power);
    const auto z = direct_potentials(rd);
    for (EdgeId target : boundary) {
      if (target == power) continue;
      // Dual conductance is the primal resistance, so the primal edge current
      // equals the dual potential difference; dividing by the primal
      // conductance gives the potential of the ordinary endpoint.
      const auto [p, q] = rd.ends[target];
      const double potential = std::abs(z[p] - z[q]) / g.edges()[target].conductance;
      const double inverse = 1.0 / potential;
      if (inverse > out.max_inverse_potential) {
        out.max_inverse_potential = inverse;
        out.power_edge = power;
        out.target_edge = target;
      }
    }
  }
  out.bound = edges * out.max_inverse_potential;
  return out;
}

inline PlanarTclBound planar_tcl_bound(const SandpileGraph& g) {
  require(g.embedding().has_value(), ErrorCode::NonPlanarEmbedding, "graph has no embedding");
  return planar_tcl_bound(g, *g.embedding());
}

// ---------------------------------------------------------------------------
// Boundary lemmas on networks drawn with a finite outer face

/// Network drawn with straight lines at the given positions, including the
/// grounded vertex; the embedding records the outer face of the drawing.
inline SandpileGraph plane_network(const std::vector<Point>& position, std::vector<EdgeRecord> records,
                                   VertexId ground) {
  auto g = SandpileGraph::from_records(position.size(), std::move(records), ground);
  Layout layout;
  layout.position = position;
  layout.direction.assign(g.edge_count(), std::nullopt);
  layout.sink_at_infinity = false;
  g.set_embedding(embed_from_layout(g, layout));
  return g;
}

/// n x n grid of unit resistors with no sink edges, grounded at `ground`
/// (default: the last vertex). Ids follow grid_id.
inline SandpileGraph open_grid(std::size_t n, std::optional<VertexId> ground = std::nullopt) {
  require(n >= 2, ErrorCode::InvalidArgument, "grid needs n >= 2");
  std::vector<Point> position(n * n);
  std::vector<EdgeRecord> records;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      const VertexId v = grid_id(n, i, j);
      position[v] = {static_cast<double>(j), -static_cast<double>(i)};
      if (j < n) records.push_back({v, grid_id(n, i, j + 1), 1, 1.0});
      if (i < n) records.push_back({v, grid_id(n, i + 1, j), 1, 1.0});
    }
  return plane_network(position, std::move(records), ground.value_or(n * n - 1));
}

/// Cycle of k unit resistors drawn as a regular polygon, grounded at vertex 0.
inline SandpileGraph cycle_network(std::size_t k) {
  require(k >= 3, ErrorCode::InvalidArgument, "cycle needs k >= 3");
  std::vector<Point> position;
  std::vector<EdgeRecord> records;
  const double step = 2.0 * std::acos(-1.0) / static_cast<double>(k);
  for (std::size_t v = 0; v < k; ++v) {
    position.push_back({std::cos(step * static_cast<double>(v)), std::sin(step * static_cast<double>(v))});
    records.push_back({v, (v + 1) % k, 1, 1.0});
  }
  return plane_network(position, std::move(records), 0);
}

namespace detail {

/// The outer face walk as a list of darts.
inline std::vector<Dart> outer_walk(const SandpileGraph& g, const PlanarEmbedding& emb) {
  require(emb.outer_face.has_value(), ErrorCode::NonPlanarEmbedding, "embedding has no outer face");
  const auto rs = to_rotation_system(g.edge_ends(), emb);
  return trace_faces(rs).faces.at(*emb.outer_face);
}

/// Same network grounded at `ground` instead of the original sink.
inline SandpileGraph regrounded(const SandpileGraph& g, VertexId ground) {
  if (ground == g.sink()) return g;
  auto out = SandpileGraph::from_records(g.vertex_count(), g.edges(), ground);
  if (g.embedding()) out.set_embedding(*g.embedding());
  return out;
}

/// Potentials with `source` held at 1 and `ground` at 0.
inline std::vector<double> clamped_potentials(const SandpileGraph& g, VertexId source, VertexId ground) {
  const auto net = regrounded(g, ground);
  return solve_potential(GroundedSolver(net), source).values;
}

/// Splits the outer walk at the first visits of a and b: returns the two
/// vertex sequences from a to b (one following the walk, one against it),
/// together with the dart sequences oriented from a to b.
struct BoundaryArcs {
  std::vector<std::vector<Dart>> arcs;  // each oriented from a to b
};

inline BoundaryArcs boundary_arcs(const RotationSystem& rs, const std::vector<Dart>& walk, VertexId a, VertexId b) {
  std::optional<std::size_t> ia, ib;
  for (std::size_t k = 0; k < walk.size(); ++k) {
    if (!ia && rs.tail(walk[k]) == a) ia = k;
    if (!ib && rs.tail(walk[k]) == b) ib = k;
  }
  require(ia && ib, ErrorCode::InvalidArgument, "source and sink must lie on the outer face");
  BoundaryArcs out;
  std::vector<Dart> forward, backward;
  for (std::size_t k = *ia; k != *ib; k = (k + 1) % walk.size()) forward.push_back(walk[k]);
  for (std::size_t k = *ib; k != *ia; k = (k + 1) % walk.size()) backward.push_back(dart_reverse(walk[k]));
  std::reverse(backward.begin(), backward.end());
  out.arcs = {forward, backward};
  return out;
}

}  // namespace detail

/// With unit potential at t and s grounded, every outer-face edge carries its
/// current from t towards s along the boundary path it lies on.
inline bool boundary_current_direction_check(const SandpileGraph& g, const PlanarEmbedding& emb, VertexId t,
                                             VertexId s, double slack = kInequalitySlack) {
  const auto rs = to_rotation_system(g.edge_ends(), emb);
  const auto walk = detail::outer_walk(g, emb);
  const auto potential = detail::clamped_potentials(g, t, s);
  for (const auto& arc : detail::boundary_arcs(rs, walk, t, s).arcs)
    for (Dart d : arc)
      if (potential[rs.tail(d)] < potential[rs.head(d)] - slack) return false;
  return true;
}

struct ResistanceVariationReport {
  bool monotone = false;            // signed changes hold on both segments
  double compensation_error = 0.0;  // |perturbed - first-order prediction|, max over vertices
  double max_change = 0.0;
};

/// Raises the resistance of outer edge e by delta (unit potential at t, s
/// grounded). On the boundary arc through e, potentials between e and s must
/// not rise and potentials between t and e must not fall. Also compares the
/// perturbed solution with the compensation-source prediction
/// V + g_e * I_e * delta * Z_e, where Z_e is the response to a unit current
/// pair across e with both t and s grounded.
inline ResistanceVariationReport boundary_resistance_variation_check(const SandpileGraph& g, const PlanarEmbedding& emb,
                                                                     EdgeId e, double delta, VertexId t, VertexId s,
                                                                     double slack = kInequalitySlack) {
  require(delta >= 0.0, ErrorCode::InvalidArgument, "delta must be non-negative");
  require(t != s, ErrorCode::InvalidArgument, "source and sink must differ");
  const auto rs = to_rotation_system(g.edge_ends(), emb);
  const auto walk = detail::outer_walk(g, emb);
  const auto before = detail::clamped_potentials(g, t, s);
  std::vector<double> conductance;
  for (const auto& rec : g.edges()) conductance.push_back(rec.conductance);
  conductance[e] = 1.0 / (1.0 / conductance[e] + delta);
  const auto perturbed = g.with_conductances(conductance);
  const auto after = detail::clamped_potentials(perturbed, t, s);

  ResistanceVariationReport report;
  report.monotone = true;
  bool found = false;
  for (const auto& arc : detail::boundary_arcs(rs, walk, t, s).arcs) {
    auto it = std::find_if(arc.begin(), arc.end(), [e](Dart d) { return dart_edge(d) == e; });
    if (it == arc.end()) continue;
    found = true;
    const auto pos = static_cast<std::size_t>(it - arc.begin());
    for (std::size_t k = 1; k < arc.size(); ++k) {
      const VertexId x = rs.tail(arc[k]);
      if (x == t || x == s) continue;
      if (k <= pos && after[x] < before[x] - slack) report.monotone = false;
      if (k > pos && after[x] > before[x] + slack) report.monotone = false;
    }
    if (pos + 1 < arc.size()) {
      const VertexId x = rs.head(arc[pos]);
      if (x != t && x != s && after[x] > before[x] + slack) report.monotone = false;
    }
  }
  require(found, ErrorCode::NotBoundaryEdge, "edge is not on the outer face");

  // Compensation: a series source in e is a current pair at its ends. With
  // t and s both held, t is folded into s (t keeps a dummy edge so the vertex
  // stays in the network; it carries no current).
  const auto& rec = g.edges()[e];
  const double current_e = rec.conductance * (before[rec.u] - before[rec.v]);
  std::vector<EdgeRecord> folded;
  auto fold = [&](VertexId x) { return x == t ? s : x; };
  for (const auto& r : g.edges())
    if (fold(r.u) != fold(r.v)) folded.push_back({fold(r.u), fold(r.v), r.multiplicity, r.conductance});
  folded.push_back({t, s, 1, 1.0});
  const auto net = SandpileGraph::from_records(g.vertex_count(), folded, s);
  std::vector<double> inject(g.vertex_count(), 0.0);
  if (fold(rec.u) != s) inject[rec.u] += 1.0;
  if (fold(rec.v) != s) inject[rec.v] -= 1.0;
  auto response = GroundedSolver(net).solve(inject);
  response[t] = 0.0;
  for (VertexId x = 0; x < g.vertex_count(); ++x) {
    const double predicted = before[x] + rec.conductance * current_e * delta * response[x];
    report.compensation_error = std::max(report.compensation_error, std::abs(after[x] - predicted));
    report.max_change = std::max(report.max_change, std::abs(after[x] - before[x]));
  }
  return report;
}

}  // namespace sandpile
