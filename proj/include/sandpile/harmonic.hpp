#pragma once

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "sandpile/graph.hpp"
#include "sandpile/parallel.hpp"

namespace sandpile {

/// Relative tolerance for equalities and absolute slack for inequalities.
inline constexpr double kEqualityTolerance = 1e-8;
inline constexpr double kInequalitySlack = 1e-9;

/// One sparse LDL^T factorization of the grounded Laplacian, reused for every
/// right-hand side. Vectors at this interface are indexed by VertexId with the
/// sink entry fixed at 0.
class GroundedSolver {
 public:
  explicit GroundedSolver(SandpileGraph g) : graph_(std::move(g)), components_(ordinary_components(graph_)) {
    factor_ = std::make_shared<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    factor_->compute(grounded_laplacian(graph_));
    require(factor_->info() == Eigen::Success, ErrorCode::SingularSystem, "grounded Laplacian factorization failed");
  }

  const SandpileGraph& graph() const { return graph_; }

  /// Potentials for the given net currents injected at ordinary vertices.
  std::vector<double> solve(const std::vector<double>& current) const {
    require(current.size() == graph_.vertex_count(), ErrorCode::InvalidArgument, "current vector has wrong size");
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(graph_.ordinary_count()));
    for (std::size_t i = 0; i < graph_.ordinary_count(); ++i)
      rhs(static_cast<Eigen::Index>(i)) = current[graph_.ordinary_vertex(i)];
    const Eigen::VectorXd x = factor_->solve(rhs);
    require(factor_->info() == Eigen::Success && x.allFinite(), ErrorCode::SingularSystem, "grounded solve failed");
    std::vector<double> out(graph_.vertex_count(), 0.0);
    for (std::size_t i = 0; i < graph_.ordinary_count(); ++i) out[graph_.ordinary_vertex(i)] = x(static_cast<Eigen::Index>(i));
    return out;
  }

  /// Potentials for a unit current injected at w (a column of the inverse).
  std::vector<double> green(VertexId w) const {
    require(!graph_.is_sink(w) && w < graph_.vertex_count(), ErrorCode::InvalidArgument, "source must be ordinary");
    std::vector<double> current(graph_.vertex_count(), 0.0);
    current[w] = 1.0;
    return solve(current);
  }

  bool same_component(VertexId a, VertexId b) const { return components_.at(a) == components_.at(b); }

 private:
  SandpileGraph graph_;
  std::vector<std::size_t> components_;
  std::shared_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> factor_;
};

/// Net current leaving each ordinary vertex under the given potentials:
/// (L x)(u) with the sink grounded.
inline double net_current(const SandpileGraph& g, const std::vector<double>& x, VertexId u) {
  double out = g.weighted_degree(u) * x[u];
  for (const auto& nb : g.neighbors(u)) out -= nb.conductance * x[nb.vertex];
  return out;
}

/// pi_w: sink at 0, w at exactly 1, harmonic elsewhere.
struct PotentialVector {
  VertexId source = 0;
  std::vector<double> values;  // by VertexId, sink entry 0
  double injected_current = 0.0;

  double operator[](VertexId v) const { return values[v]; }
};

/// Unit potential at w. Computed by scaling the response to a unit current
/// at w (one shared factorization serves every source); w is then set to 1
/// exactly and the injected current is read off as the residual at w.
inline PotentialVector solve_potential(const GroundedSolver& solver, VertexId w) {
  const auto& g = solver.graph();
  auto x = solver.green(w);
  const double at_source = x[w];
  require(at_source > 0.0, ErrorCode::SingularSystem, "non-positive diagonal of the inverse");
  PotentialVector pot;
  pot.source = w;
  pot.values.resize(g.vertex_count());
  for (VertexId u = 0; u < g.vertex_count(); ++u) pot.values[u] = solver.same_component(u, w) ? x[u] / at_source : 0.0;
  pot.values[g.sink()] = 0.0;
  pot.values[w] = 1.0;
  pot.injected_current = net_current(g, pot.values, w);
  return pot;
}

inline PotentialVector solve_potential(const SandpileGraph& g, VertexId w) {
  return solve_potential(GroundedSolver(g), w);
}

/// Potential difference under a unit current from u to v (either may be the
/// sink).
inline double effective_resistance(const GroundedSolver& solver, VertexId u, VertexId v) {
  const auto& g = solver.graph();
  require(u != v, ErrorCode::InvalidArgument, "effective resistance needs distinct vertices");
  require(u < g.vertex_count() && v < g.vertex_count(), ErrorCode::InvalidArgument, "vertex out of range");
  if (g.is_sink(u)) std::swap(u, v);
  const auto gu = solver.green(u);
  if (g.is_sink(v)) return gu[u];
  if (!solver.same_component(u, v)) return gu[u] + solver.green(v)[v];
  const auto gv = solver.green(v);
  return gu[u] + gv[v] - 2.0 * gu[v];
}

inline double effective_resistance(const SandpileGraph& g, VertexId u, VertexId v) {
  return effective_resistance(GroundedSolver(g), u, v);
}

struct ProfileReport {
  double gamma = 0.0;
  std::vector<double> per_vertex;  // (d(u)-1) pi_w(u), sink entry 0
};

inline ProfileReport potential_profile(const SandpileGraph& g, const PotentialVector& pot) {
  ProfileReport report;
  report.per_vertex.assign(g.vertex_count(), 0.0);
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    if (g.is_sink(u)) continue;
    report.per_vertex[u] = static_cast<double>(g.degree(u) - 1) * pot[u];
    report.gamma += report.per_vertex[u];
  }
  return report;
}

// ---------------------------------------------------------------------------
// LP-dual certificates and the bounds they certify

enum class BoundDirection { Upper, Lower };

struct DualCertificate {
  VertexId v = 0;
  VertexId w = 0;
  BoundDirection direction = BoundDirection::Upper;
  std::vector<double> Y;  // by VertexId, sink entry 0
  double Yprime = 0.0;
  double objective = 0.0;            // value of the stated dual objective at (Y, Y')
  double certified_objective = 0.0;  // lower direction: Y', the objective of the exact dual
  double max_violation = 0.0;
};

namespace detail {

inline void require_finite_pair(const SandpileGraph& g, const PotentialVector& pot, VertexId v) {
  require(!g.is_sink(v) && v < g.vertex_count(), ErrorCode::InvalidArgument, "v must be ordinary");
  require(pot[v] > 0.0, ErrorCode::InfiniteBound,
          "pi_w(v) = 0: v is cut off from w by the sink, the bound is infinite");
}

/// Y(u) = pi_w(u) / pi_w(v). Y(v) is 1 exactly.
inline std::vector<double> scaled_potential(const SandpileGraph& g, const PotentialVector& pot, VertexId v) {
  require_finite_pair(g, pot, v);
  std::vector<double> y(pot.values.size());
  for (std::size_t u = 0; u < y.size(); ++u) y[u] = pot.values[u] / pot[v];
  y[v] = 1.0;
  return y;
}

/// sum_u (d(u)-1) Y(u), in vertex order. Shared by the bound and the
/// certificate so both produce the same double.
inline double upper_objective(const SandpileGraph& g, const std::vector<double>& y) {
  double total = 0.0;
  for (VertexId u = 0; u < g.vertex_count(); ++u)
    if (!g.is_sink(u)) total += static_cast<double>(g.degree(u) - 1) * y[u];
  return total;
}

}  // namespace detail

/// Gamma_S(w) / pi_w(v): an upper bound on R_s(v,w).
inline double impedance_upper_bound(const SandpileGraph& g, const PotentialVector& pot, VertexId v) {
  return detail::upper_objective(g, detail::scaled_potential(g, pot, v));
}

/// Value of the lower dual objective Y(w) = 1/pi_w(v).
inline double impedance_lower_objective(const SandpileGraph& g, const PotentialVector& pot, VertexId v) {
  return detail::scaled_potential(g, pot, v)[pot.source];
}

/// 1/pi_w(v) - 1: a lower bound on R_s(v,w).
inline double impedance_lower_bound(const SandpileGraph& g, const PotentialVector& pot, VertexId v) {
  return impedance_lower_objective(g, pot, v) - 1.0;
}

/// Builds (Y, Y') for the pair and checks every dual constraint:
///   upper:  sum_{u'~u} Y(u') - d(u) Y(u) + [u = w] Y' >= 0,  Y(v) >= 1
///   lower:  the same expressions <= 0,                      Y(v) <= 1
/// with Y, Y' >= 0. Neighbor sums are over ordinary vertices (the sink is 0).
inline DualCertificate dual_certificate(const SandpileGraph& g, const PotentialVector& pot, VertexId v,
                                        BoundDirection direction, double tolerance = kInequalitySlack) {
  DualCertificate cert;
  cert.v = v;
  cert.w = pot.source;
  cert.direction = direction;
  cert.Y = detail::scaled_potential(g, pot, v);
  cert.Yprime = pot.injected_current / pot[v];
  double scale = 1.0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) scale = std::max(scale, std::abs(cert.Y[u]) * g.weighted_degree(u));
  const double sign = direction == BoundDirection::Upper ? 1.0 : -1.0;
  double worst = 0.0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    if (g.is_sink(u)) continue;
    double slack = -net_current(g, cert.Y, u) + (u == cert.w ? cert.Yprime : 0.0);
    worst = std::max(worst, -sign * slack / scale);
    worst = std::max(worst, -cert.Y[u]);
  }
  worst = std::max(worst, -cert.Yprime);
  worst = std::max(worst, sign * (1.0 - cert.Y[v]));
  cert.max_violation = worst;
  require(worst <= tolerance, ErrorCode::InfeasibleCertificate, "dual certificate violates a constraint");
  if (direction == BoundDirection::Upper) {
    cert.objective = detail::upper_objective(g, cert.Y);
    cert.certified_objective = cert.objective;
  } else {
    cert.objective = cert.Y[cert.w];
    cert.certified_objective = cert.Yprime;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Degree-bounded estimator and the height-weighted lower bound

struct DegreeBoundedEstimate {
  double estimate = 0.0;  // (1/pi_w(v)) sum_u pi_w(u)
  double lower = 0.0;     // estimate / (max_degree + 1)
  double upper = 0.0;     // estimate * (max_degree - 1)
  std::int64_t max_degree = 0;
};

inline DegreeBoundedEstimate degree_bounded_estimate(const SandpileGraph& g, const PotentialVector& pot, VertexId v) {
  const auto y = detail::scaled_potential(g, pot, v);
  DegreeBoundedEstimate est;
  for (VertexId u = 0; u < g.vertex_count(); ++u)
    if (!g.is_sink(u)) est.estimate += y[u];
  est.max_degree = g.max_degree();
  est.lower = est.estimate / static_cast<double>(est.max_degree + 1);
  est.upper = est.estimate * static_cast<double>(est.max_degree - 1);
  return est;
}

/// (1/pi_w(v)) sum_u h(u) pi_w(u) for heights h over ordinary indices.
inline double height_weighted_lower_bound(const SandpileGraph& g, const PotentialVector& pot, VertexId v,
                                          const std::vector<std::int64_t>& heights) {
  require(heights.size() == g.ordinary_count(), ErrorCode::InvalidArgument, "heights have wrong size");
  const auto y = detail::scaled_potential(g, pot, v);
  double total = 0.0;
  for (std::size_t i = 0; i < heights.size(); ++i) total += static_cast<double>(heights[i]) * y[g.ordinary_vertex(i)];
  return total;
}

/// Same sum with every positive height replaced by 1.
inline double indicator_lower_bound(const SandpileGraph& g, const PotentialVector& pot, VertexId v,
                                    const std::vector<std::int64_t>& heights) {
  std::vector<std::int64_t> indicator(heights.size());
  for (std::size_t i = 0; i < heights.size(); ++i) indicator[i] = heights[i] >= 1 ? 1 : 0;
  return height_weighted_lower_bound(g, pot, v, indicator);
}

// ---------------------------------------------------------------------------
// Transience-class estimate over vertex pairs

struct TclEstimate {
  double estimate = 0.0;  // max Gamma(w) / pi_w(v)
  VertexId argmax_v = 0;
  VertexId argmax_w = 0;
  double gamma = 0.0;      // Gamma(w) at the argmax
  double potential = 0.0;  // pi_w(v) at the argmax
  double relaxed = 0.0;    // |E| * max 1/pi_w(v) over the same pairs
  double max_inverse_potential = 0.0;
};

/// Potentials from every source in `sources`, solved in parallel.
inline std::vector<PotentialVector> solve_potentials(const GroundedSolver& solver, const std::vector<VertexId>& sources) {
  std::vector<PotentialVector> out(sources.size());
  parallel_for(sources.size(), [&](std::size_t i) { out[i] = solve_potential(solver, sources[i]); });
  return out;
}

/// Maximum of Gamma(w)/pi_w(v) over ordered pairs of sink-adjacent vertices
/// (all ordinary pairs when all_pairs is set), plus the |E| relaxation.
inline TclEstimate tcl_upper_estimate(const GroundedSolver& solver, bool all_pairs = false) {
  const auto& g = solver.graph();
  require(ordinary_connected(g), ErrorCode::InfiniteBound, "ordinary vertices are disconnected, tcl is infinite");
  const auto pool = all_pairs ? g.ordinary_vertices() : g.boundary_vertices();
  const auto pots = solve_potentials(solver, pool);
  TclEstimate best;
  best.estimate = -1.0;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const double gamma = potential_profile(g, pots[j]).gamma;
    for (VertexId v : pool) {
      const double pi = pots[j][v];
      require(pi > 0.0, ErrorCode::InfiniteBound, "zero potential on an ordinary-connected graph");
      const double value = gamma / pi;
      if (value > best.estimate) {
        best.estimate = value;
        best.argmax_v = v;
        best.argmax_w = pool[j];
        best.gamma = gamma;
        best.potential = pi;
      }
      best.max_inverse_potential = std::max(best.max_inverse_potential, 1.0 / pi);
    }
  }
  best.relaxed = static_cast<double>(g.total_multiplicity()) * best.max_inverse_potential;
  return best;
}

inline TclEstimate tcl_upper_estimate(const SandpileGraph& g, bool all_pairs = false) {
  return tcl_upper_estimate(GroundedSolver(g), all_pairs);
}

// ---------------------------------------------------------------------------
// Potential-theory identities

/// pi_i(j) * pi_j(k) <= pi_i(k) + slack.
inline bool check_triangle_inequality(const GroundedSolver& solver, VertexId i, VertexId j, VertexId k,
                                      double slack = kInequalitySlack) {
  const auto pi_i = solve_potential(solver, i);
  const auto pi_j = solve_potential(solver, j);
  return pi_i[j] * pi_j[k] <= pi_i[k] + slack;
}

/// R_eff(s,t) pi_t(v) == R_eff(s,v) pi_v(t) to relative tolerance.
inline bool check_reciprocity(const GroundedSolver& solver, VertexId t, VertexId v,
                              double tolerance = kEqualityTolerance) {
  const auto s = solver.graph().sink();
  const double lhs = effective_resistance(solver, s, t) * solve_potential(solver, t)[v];
  const double rhs = effective_resistance(solver, s, v) * solve_potential(solver, v)[t];
  return std::abs(lhs - rhs) <= tolerance * std::max({std::abs(lhs), std::abs(rhs), 1e-300});
}

/// 2|E| R_eff(v,s)/R_eff(w,s) * p, where p = R_s(v,w): particles at w that
/// force a toppling at v.
inline double sandpile_reciprocity_bound(const GroundedSolver& solver, VertexId v, VertexId w, double p) {
  const auto& g = solver.graph();
  const double ratio = effective_resistance(solver, v, g.sink()) / effective_resistance(solver, w, g.sink());
  return 2.0 * static_cast<double>(g.total_multiplicity()) * ratio * p;
}

/// Every vertex outside `poles` lies within the range of its neighbors'
/// values (sink counted as 0).
inline bool satisfies_max_principle(const SandpileGraph& g, const std::vector<double>& values,
                                    const std::vector<VertexId>& poles, double slack = kInequalitySlack) {
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    if (g.is_sink(u) || std::find(poles.begin(), poles.end(), u) != poles.end()) continue;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& nb : g.neighbors(u)) {
      lo = std::min(lo, values[nb.vertex]);
      hi = std::max(hi, values[nb.vertex]);
    }
    if (values[u] < lo - slack || values[u] > hi + slack) return false;
  }
  return true;
}

/// Largest |(L x)(u)| / (weighted degree) over ordinary vertices not in poles.
inline double harmonic_residual(const SandpileGraph& g, const std::vector<double>& values,
                                const std::vector<VertexId>& poles) {
  double worst = 0.0;
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    if (g.is_sink(u) || std::find(poles.begin(), poles.end(), u) != poles.end()) continue;
    worst = std::max(worst, std::abs(net_current(g, values, u)) / g.weighted_degree(u));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Jacobi iteration

template <class T>
struct JacobiResult {
  std::vector<T> values;  // by VertexId
  std::size_t iterations = 0;
  bool converged = false;
};

/// Averaging iteration c_{t+1}(v) = sum_{v'~v} m(v,v') c_t(v') / d(v) on the
/// vertices without a fixed value. Fixed values (the sink defaults to 0) hold
/// from the start; free vertices start at 0. observer(t, c_t) sees every
/// iterate including c_0; returning false stops the run early. Stops when the
/// largest change drops below tolerance; throws MaxIterations otherwise
/// (unless stopped by the observer). Weights are multiplicities.
template <class T, class Observer>
JacobiResult<T> jacobi_solve(const SandpileGraph& g, const std::map<VertexId, T>& fixed, const T& tolerance,
                             std::size_t max_iterations, Observer&& observer) {
  require(!fixed.empty(), ErrorCode::InvalidArgument, "Jacobi iteration needs at least one fixed vertex");
  const std::size_t n = g.vertex_count();
  std::vector<char> is_fixed(n, 0);
  std::vector<T> current(n, T(0));
  is_fixed[g.sink()] = 1;
  for (const auto& [v, value] : fixed) {
    require(v < n, ErrorCode::InvalidArgument, "fixed vertex out of range");
    is_fixed[v] = 1;
    current[v] = value;
  }
  JacobiResult<T> result;
  if (!observer(std::size_t{0}, static_cast<const std::vector<T>&>(current))) {
    result.values = current;
    return result;
  }
  std::vector<T> next = current;
  for (std::size_t t = 1; t <= max_iterations; ++t) {
    T change(0);
    for (VertexId v = 0; v < n; ++v) {
      if (is_fixed[v]) continue;
      T total(0);
      for (const auto& nb : g.neighbors(v)) total += T(nb.multiplicity) * current[nb.vertex];
      next[v] = total / T(g.degree(v));
      const T diff = next[v] > current[v] ? T(next[v] - current[v]) : T(current[v] - next[v]);
      if (diff > change) change = diff;
    }
    std::swap(current, next);
    result.iterations = t;
    const bool keep_going = observer(t, static_cast<const std::vector<T>&>(current));
    if (change < tolerance) {
      result.converged = true;
      break;
    }
    if (!keep_going) break;
    if (t == max_iterations) fail(ErrorCode::MaxIterations, "Jacobi iteration did not converge");
  }
  result.values = std::move(current);
  return result;
}

template <class T>
JacobiResult<T> jacobi_solve(const SandpileGraph& g, const std::map<VertexId, T>& fixed, const T& tolerance,
                             std::size_t max_iterations = 1000000) {
  return jacobi_solve(g, fixed, tolerance, max_iterations, [](std::size_t, const std::vector<T>&) { return true; });
}

}  // namespace sandpile
