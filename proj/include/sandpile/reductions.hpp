#pragma once

#include <Eigen/SparseCholesky>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "sandpile/engine.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/harmonic.hpp"

namespace sandpile {

/// Resistor network with at most one (merged) resistor per vertex pair.
/// Vertex ids are stable; removed vertices stay as dead ids.
class ResistiveNetwork {
 public:
  using Key = std::pair<VertexId, VertexId>;

  ResistiveNetwork() = default;
  ResistiveNetwork(std::size_t vertex_count, VertexId sink) : alive_(vertex_count, 1), sink_(sink) {
    require(sink < vertex_count, ErrorCode::BadSink, "sink out of range");
  }

  /// Parallel records are merged; resistance = 1 / conductance.
  static ResistiveNetwork from_graph(const SandpileGraph& g) {
    ResistiveNetwork net(g.vertex_count(), g.sink());
    for (const auto& rec : g.edges()) net.add_resistor(rec.u, rec.v, 1.0 / rec.conductance);
    return net;
  }

  std::size_t vertex_count() const { return alive_.size(); }
  VertexId sink() const { return sink_; }
  bool alive(VertexId v) const { return alive_.at(v) != 0; }
  const std::map<Key, double>& resistors() const { return resistors_; }

  static Key key(VertexId a, VertexId b) { return {std::min(a, b), std::max(a, b)}; }

  std::optional<double> resistance(VertexId a, VertexId b) const {
    auto it = resistors_.find(key(a, b));
    if (it == resistors_.end()) return std::nullopt;
    return it->second;
  }

  /// Adds a resistor, combining with an existing one by the parallel law.
  void add_resistor(VertexId a, VertexId b, double r) {
    require(a != b, ErrorCode::SelfLoop, "resistor endpoints must differ");
    require(alive(a) && alive(b), ErrorCode::InvalidArgument, "resistor touches a removed vertex");
    require(r > 0.0 && std::isfinite(r), ErrorCode::InvalidArgument, "resistance must be positive and finite");
    auto [it, inserted] = resistors_.emplace(key(a, b), r);
    if (!inserted) it->second = 1.0 / (1.0 / it->second + 1.0 / r);
  }

  void set_resistance(VertexId a, VertexId b, double r) {
    require(resistors_.count(key(a, b)) == 1, ErrorCode::InvalidArgument, "no resistor between these vertices");
    require(r > 0.0 && std::isfinite(r), ErrorCode::InvalidArgument, "resistance must be positive and finite");
    resistors_[key(a, b)] = r;
  }

  void remove_resistor(VertexId a, VertexId b) { resistors_.erase(key(a, b)); }

  /// Drops v and its resistors.
  void remove_vertex(VertexId v) {
    require(v != sink_, ErrorCode::BadSink, "cannot remove the sink");
    for (auto it = resistors_.begin(); it != resistors_.end();)
      it = (it->first.first == v || it->first.second == v) ? resistors_.erase(it) : std::next(it);
    alive_[v] = 0;
  }

  std::vector<std::pair<VertexId, double>> neighbors(VertexId v) const {
    std::vector<std::pair<VertexId, double>> out;
    for (const auto& [k, r] : resistors_) {
      if (k.first == v) out.emplace_back(k.second, r);
      if (k.second == v) out.emplace_back(k.first, r);
    }
    return out;
  }

  /// Alive vertices sharing a resistor with the sink.
  std::set<VertexId> boundary() const {
    std::set<VertexId> out;
    for (const auto& [k, r] : resistors_) {
      if (k.first == sink_) out.insert(k.second);
      if (k.second == sink_) out.insert(k.first);
    }
    return out;
  }

  /// Alive vertices reachable from `from` without passing through any vertex
  /// in `blocked`.
  std::vector<char> reachable(VertexId from, const std::set<VertexId>& blocked = {},
                              std::optional<Key> without = std::nullopt) const {
    std::vector<std::vector<VertexId>> adj(vertex_count());
    for (const auto& [k, r] : resistors_) {
      if (without && k == *without) continue;
      adj[k.first].push_back(k.second);
      adj[k.second].push_back(k.first);
    }
    std::vector<char> seen(vertex_count(), 0);
    std::vector<VertexId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (auto y : adj[x])
        if (!seen[y] && !blocked.count(y)) {
          seen[y] = 1;
          stack.push_back(y);
        }
    }
    return seen;
  }

  /// Potentials with every vertex in `held` fixed to its value and the sink
  /// at 0. Vertices cut off from every fixed vertex get 0.
  std::vector<double> potentials(const std::map<VertexId, double>& held) const {
    std::vector<long long> index(vertex_count(), -1);
    Eigen::Index m = 0;
    std::vector<char> reach(vertex_count(), 0);
    std::set<VertexId> fixed_set;
    for (const auto& [v, _] : held) fixed_set.insert(v);
    fixed_set.insert(sink_);
    for (VertexId f : fixed_set) {
      const auto r = reachable(f);
      for (VertexId x = 0; x < vertex_count(); ++x) reach[x] |= r[x];
    }
    for (VertexId x = 0; x < vertex_count(); ++x)
      if (alive(x) && reach[x] && !fixed_set.count(x)) index[x] = m++;
    std::vector<double> value(vertex_count(), 0.0);
    for (const auto& [v, p] : held) value[v] = p;
    if (m == 0) return value;
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (const auto& [k, r] : resistors_) {
      const double c = 1.0 / r;
      const auto [a, b] = k;
      if (index[a] >= 0) triplets.emplace_back(index[a], index[a], c);
      if (index[b] >= 0) triplets.emplace_back(index[b], index[b], c);
      if (index[a] >= 0 && index[b] >= 0) {
        triplets.emplace_back(index[a], index[b], -c);
        triplets.emplace_back(index[b], index[a], -c);
      } else if (index[a] >= 0) {
        rhs(index[a]) += c * value[b];
      } else if (index[b] >= 0) {
        rhs(index[b]) += c * value[a];
      }
    }
    Eigen::SparseMatrix<double> lap(m, m);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(lap);
    require(ldlt.info() == Eigen::Success, ErrorCode::SingularSystem, "network factorization failed");
    const Eigen::VectorXd x = ldlt.solve(rhs);
    for (VertexId v = 0; v < vertex_count(); ++v)
      if (index[v] >= 0) value[v] = x(index[v]);
    return value;
  }

  /// pi_source(target): potential at target with source at 1, sink at 0.
  double potential(VertexId source, VertexId target) const { return potentials({{source, 1.0}})[target]; }

  /// Integral networks become sandpile graphs (resistance 1/m for m unit
  /// edges); anything else gets multiplicity 1 and conductance 1/r.
  SandpileGraph to_graph() const {
    std::vector<EdgeRecord> records;
    for (const auto& [k, r] : resistors_) {
      const double c = 1.0 / r;
      const auto m = std::llround(c);
      if (m >= 1 && std::abs(c - static_cast<double>(m)) < 1e-12)
        records.push_back({k.first, k.second, m, static_cast<double>(m)});
      else
        records.push_back({k.first, k.second, 1, c});
    }
    return SandpileGraph::from_records(vertex_count(), std::move(records), sink_);
  }

 private:
  std::vector<char> alive_;
  VertexId sink_ = 0;
  std::map<Key, double> resistors_;
};

// ---------------------------------------------------------------------------
// Star-delta

struct StarDeltaResult {
  ResistiveNetwork network;
  std::array<VertexId, 3> ends{};
  std::array<double, 3> delta{};  // delta[k] joins the two ends other than ends[k]
};

/// Replaces the star at `center` (exactly three neighbours) by a triangle:
/// the resistor opposite end a is (ab + bc + ca) / a. `critical` lists
/// vertices that must not be eliminated; the sink never can.
inline StarDeltaResult star_delta(const ResistiveNetwork& net, VertexId center,
                                  const std::set<VertexId>& critical = {}) {
  require(net.alive(center), ErrorCode::InvalidArgument, "center is not in the network");
  require(center != net.sink() && !critical.count(center), ErrorCode::CenterIsCritical,
          "center is the sink or a protected boundary vertex");
  const auto nbs = net.neighbors(center);
  require(nbs.size() == 3, ErrorCode::NotDegreeThree, "star center must have exactly three neighbours");
  StarDeltaResult out;
  out.network = net;
  out.network.remove_vertex(center);
  const double a = nbs[0].second, b = nbs[1].second, c = nbs[2].second;
  const double numerator = a * b + b * c + c * a;
  for (std::size_t k = 0; k < 3; ++k) {
    out.ends[k] = nbs[k].first;
    out.delta[k] = numerator / nbs[k].second;
  }
  out.network.add_resistor(out.ends[1], out.ends[2], out.delta[0]);
  out.network.add_resistor(out.ends[0], out.ends[2], out.delta[1]);
  out.network.add_resistor(out.ends[0], out.ends[1], out.delta[2]);
  return out;
}

// ---------------------------------------------------------------------------
// Equivalence

/// Largest boundary potential difference over every unit source in B.
inline double equivalence_deviation(const ResistiveNetwork& first, const ResistiveNetwork& second,
                                    const std::set<VertexId>& boundary) {
  require(first.sink() == second.sink(), ErrorCode::BoundaryMismatch, "networks have different sinks");
  require(first.boundary() == boundary && second.boundary() == boundary, ErrorCode::BoundaryMismatch,
          "boundary sets differ from the one given");
  double worst = 0.0;
  for (VertexId source : boundary) {
    const auto p = first.potentials({{source, 1.0}});
    const auto q = second.potentials({{source, 1.0}});
    for (VertexId x : boundary) worst = std::max(worst, std::abs(p[x] - q[x]));
  }
  return worst;
}

inline bool check_equivalence(const ResistiveNetwork& first, const ResistiveNetwork& second,
                              const std::set<VertexId>& boundary, double tolerance = 1e-9) {
  return equivalence_deviation(first, second, boundary) <= tolerance;
}

// ---------------------------------------------------------------------------
// Honeycomb to triangular

struct LatticeReduction {
  ResistiveNetwork original;
  ResistiveNetwork reduced;
  std::vector<VertexId> eliminated;
  std::vector<double> produced;  // resistances created between surviving pairs, one per eliminated edge
  double deviation = 0.0;        // equivalence_deviation(original, reduced)
};

/// Eliminates, by star-delta, every interior (not sink-adjacent) vertex of
/// one colour class of a bipartite lattice; the class with more interior
/// vertices is chosen (ties: the class of the lowest id).
inline LatticeReduction honeycomb_to_triangular(const SandpileGraph& honeycomb_graph) {
  LatticeReduction out;
  out.original = ResistiveNetwork::from_graph(honeycomb_graph);
  const auto boundary = out.original.boundary();
  const VertexId s = honeycomb_graph.sink();
  std::vector<int> colour(honeycomb_graph.vertex_count(), -1);
  for (VertexId start = 0; start < colour.size(); ++start) {
    if (start == s || colour[start] >= 0) continue;
    colour[start] = 0;
    std::vector<VertexId> stack{start};
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (const auto& nb : honeycomb_graph.neighbors(x)) {
        if (nb.vertex == s) continue;
        if (colour[nb.vertex] < 0) {
          colour[nb.vertex] = 1 - colour[x];
          stack.push_back(nb.vertex);
        } else {
          require(colour[nb.vertex] != colour[x], ErrorCode::InvalidArgument, "lattice is not bipartite");
        }
      }
    }
  }
  std::array<std::vector<VertexId>, 2> interior;
  for (VertexId v = 0; v < colour.size(); ++v)
    if (v != s && !boundary.count(v)) interior[colour[v]].push_back(v);
  const int pick = interior[1].size() > interior[0].size() ? 1 : 0;
  out.reduced = out.original;
  for (VertexId center : interior[pick]) {
    auto step = star_delta(out.reduced, center, boundary);
    out.reduced = std::move(step.network);
    out.eliminated.push_back(center);
    out.produced.insert(out.produced.end(), step.delta.begin(), step.delta.end());
  }
  out.deviation = equivalence_deviation(out.original, out.reduced, boundary);
  return out;
}

// ---------------------------------------------------------------------------
// Contract / delete

/// Merges the endpoints of the resistor (a, b); the surviving label is a
/// pole if either endpoint is one, otherwise the smaller id.
inline ResistiveNetwork contract_edge(const ResistiveNetwork& net, VertexId a, VertexId b,
                                      const std::set<VertexId>& poles = {}) {
  require(net.resistance(a, b).has_value(), ErrorCode::InvalidArgument, "no resistor to contract");
  require(!(poles.count(a) && poles.count(b)), ErrorCode::WouldMergePoles, "contraction would merge the poles");
  require(a != net.sink() && b != net.sink(), ErrorCode::InvalidArgument, "sink edges are never contracted");
  VertexId keep = std::min(a, b), drop = std::max(a, b);
  if (poles.count(drop)) std::swap(keep, drop);
  ResistiveNetwork out = net;
  const auto moved = net.neighbors(drop);
  out.remove_vertex(drop);
  for (const auto& [x, r] : moved)
    if (x != keep) out.add_resistor(keep, x, r);
  return out;
}

struct ContractDeleteStep {
  ResistiveNetwork network;
  bool deleted = false;  // false: contracted
  double before = 0.0;   // pi_vi(vj)
  double after = 0.0;
};

/// Deletes or contracts the resistor (a, b), whichever gives the smaller
/// pi_vi(vj); ties within 1e-12 go to deletion. Contraction is skipped when
/// it would merge vi with vj.
inline ContractDeleteStep contract_delete_step(const ResistiveNetwork& net, VertexId vi, VertexId vj, VertexId a,
                                               VertexId b, double tolerance = 1e-12) {
  require(net.resistance(a, b).has_value(), ErrorCode::InvalidArgument, "no resistor between these vertices");
  require(a != net.sink() && b != net.sink(), ErrorCode::InvalidArgument, "edge must avoid the sink");
  const std::set<VertexId> no_sink{net.sink()};
  require(net.reachable(vi, no_sink, ResistiveNetwork::key(a, b))[vj] != 0, ErrorCode::WouldDisconnect,
          "deleting the edge disconnects the poles away from the sink");
  ContractDeleteStep out;
  out.before = net.potential(vi, vj);
  ResistiveNetwork deleted = net;
  deleted.remove_resistor(a, b);
  const double after_delete = deleted.potential(vi, vj);
  const bool merges = (a == vi && b == vj) || (a == vj && b == vi);
  std::optional<double> after_contract;
  ResistiveNetwork contracted;
  if (!merges) {
    contracted = contract_edge(net, a, b, {vi, vj});
    after_contract = contracted.potential(vi, vj);
  }
  if (after_contract && *after_contract < after_delete - tolerance) {
    out.network = std::move(contracted);
    out.after = *after_contract;
  } else {
    out.network = std::move(deleted);
    out.deleted = true;
    out.after = after_delete;
  }
  require(out.after <= out.before + 1e-9, ErrorCode::AssertionFailure, "contract/delete increased the potential");
  return out;
}

struct PathReduction {
  ResistiveNetwork network;
  std::vector<double> history;  // pi_vi(vj) after each step, starting with the input
  std::size_t steps = 0;
};

/// Applies contract/delete steps, always to the lexicographically first
/// resistor away from the sink whose deletion keeps vi and vj connected,
/// until no such resistor is left: the sink-free part is then a vi-vj path.
inline PathReduction reduce_to_path(const ResistiveNetwork& net, VertexId vi, VertexId vj) {
  PathReduction out;
  out.network = net;
  out.history.push_back(net.potential(vi, vj));
  const std::set<VertexId> no_sink{net.sink()};
  require(net.reachable(vi, no_sink)[vj] != 0, ErrorCode::WouldDisconnect, "poles are not connected away from the sink");
  for (;;) {
    std::optional<ResistiveNetwork::Key> chosen;
    for (const auto& [k, r] : out.network.resistors()) {
      if (k.first == net.sink() || k.second == net.sink()) continue;
      if (out.network.reachable(vi, no_sink, k)[vj]) {
        chosen = k;
        break;
      }
    }
    if (!chosen) break;
    auto step = contract_delete_step(out.network, vi, vj, chosen->first, chosen->second);
    out.network = std::move(step.network);
    out.history.push_back(step.after);
    ++out.steps;
  }
  return out;
}

/// True when the resistors away from the sink form a single path from vi to
/// vj.
inline bool is_pole_path(const ResistiveNetwork& net, VertexId vi, VertexId vj) {
  std::map<VertexId, int> degree;
  std::size_t edges = 0;
  for (const auto& [k, r] : net.resistors()) {
    if (k.first == net.sink() || k.second == net.sink()) continue;
    ++degree[k.first];
    ++degree[k.second];
    ++edges;
  }
  if (edges == 0) return false;
  for (const auto& [v, d] : degree) {
    const int expected = (v == vi || v == vj) ? 1 : 2;
    if (d != expected) return false;
  }
  return edges + 1 == degree.size() && net.reachable(vi, {net.sink()})[vj];
}

// ---------------------------------------------------------------------------
// Line circuit

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// V_1 .. V_k (index 0 holds V_1) of the line circuit: V_k = 1,
/// V_{k-1} = x + 1, V_i = (x + 2) V_{i+1} - V_{i+2}.
inline std::vector<Rational> line_circuit_potentials(std::size_t k, const Rational& x) {
  require(k >= 2, ErrorCode::InvalidArgument, "line circuit needs k >= 2");
  require(x >= 1, ErrorCode::InvalidArgument, "line circuit needs x >= 1");
  std::vector<Rational> v(k);
  v[k - 1] = 1;
  v[k - 2] = x + 1;
  for (std::size_t i = k - 2; i-- > 0;) v[i] = (x + 2) * v[i + 1] - v[i + 2];
  return v;
}

/// V_1 from [[x+2, -1], [1, 0]]^(k-2) (x+1, 1), by repeated squaring.
inline Rational line_circuit_matrix_power(std::size_t k, const Rational& x) {
  require(k >= 2, ErrorCode::InvalidArgument, "line circuit needs k >= 2");
  using Mat = std::array<Rational, 4>;
  auto mul = [](const Mat& a, const Mat& b) {
    return Mat{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
               a[2] * b[1] + a[3] * b[3]};
  };
  Mat result{1, 0, 0, 1}, base{x + 2, -1, 1, 0};
  for (std::size_t e = k - 2; e > 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
  }
  return result[0] * (x + 1) + result[1];
}

/// (x + 2)^(k-2) (x + 1).
inline Rational line_circuit_envelope(std::size_t k, const Rational& x) {
  Rational out = x + 1;
  for (std::size_t i = 2; i < k; ++i) out *= x + 2;
  return out;
}

/// The line circuit as a network: nodes 0..k-1 in a row joined by
/// resistance x, each with a resistor `sink_resistance` to the sink k.
inline ResistiveNetwork line_circuit_network(std::size_t k, double x, double sink_resistance = 1.0) {
  ResistiveNetwork net(k + 1, k);
  for (VertexId i = 0; i + 1 < k; ++i) net.add_resistor(i, i + 1, x);
  for (VertexId i = 0; i < k; ++i) net.add_resistor(i, k, sink_resistance);
  return net;
}

struct KSinkBound {
  Rational x;
  Rational exact;     // V_1
  Rational envelope;  // (x+2)^(k-2)(x+1)
  Rational tcl_bound; // edge_count * envelope
};

inline KSinkBound ksink_bound(std::size_t edge_count, std::size_t k) {
  require(k >= 2 && edge_count >= k, ErrorCode::InvalidArgument, "need k >= 2 and at least k edges");
  KSinkBound out;
  out.x = Rational(edge_count - k);
  require(out.x >= 1, ErrorCode::InvalidArgument, "line circuit needs x >= 1");
  out.exact = line_circuit_potentials(k, out.x).front();
  out.envelope = line_circuit_envelope(k, out.x);
  out.tcl_bound = Rational(edge_count) * out.envelope;
  require(out.exact <= out.envelope, ErrorCode::AssertionFailure, "V_1 exceeds its envelope");
  return out;
}

struct LineSandpileCheck {
  std::size_t k = 0;
  std::int64_t exact = 0;   // R_s(first, last) on the line sandpile, by simulation
  Rational analytic;        // V_1 of the line circuit with x = 2
  Rational envelope;        // 4^(k-2) * 3
};

inline LineSandpileCheck line_sandpile_check(std::size_t k) {
  require(k >= 2 && k <= 14, ErrorCode::InvalidArgument, "line sandpile check supports 2 <= k <= 14");
  LineSandpileCheck out;
  out.k = k;
  const auto g = line_sandpile(k);
  out.exact = sandpile_impedance_exact(g, 0, k - 1).value;
  out.analytic = line_circuit_potentials(k, Rational(2)).front();
  out.envelope = line_circuit_envelope(k, Rational(2));
  return out;
}

}  // namespace sandpile
