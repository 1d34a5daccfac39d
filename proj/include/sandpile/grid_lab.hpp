#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <vector>

#include "sandpile/engine.hpp"
#include "sandpile/graph.hpp"
#include "sandpile/harmonic.hpp"
#include "sandpile/parallel.hpp"
#include "sandpile/planar.hpp"

namespace sandpile {

using Rational = boost::multiprecision::cpp_rational;

/// Values on the n x n grid, 1-based (i, j), stored row-major like grid_id.
template <class T>
struct GridField {
  std::size_t n = 0;
  std::vector<T> values;

  GridField() = default;
  explicit GridField(std::size_t side, const T& fill = T(0)) : n(side), values(side * side, fill) {}

  /// Ordinary part of a per-vertex vector on GRID_n.
  static GridField from_vertices(std::size_t side, const std::vector<T>& by_vertex) {
    GridField f(side);
    for (std::size_t k = 0; k < side * side; ++k) f.values[k] = by_vertex.at(k);
    return f;
  }

  T& at(std::size_t i, std::size_t j) { return values[grid_id(n, i, j)]; }
  const T& at(std::size_t i, std::size_t j) const { return values[grid_id(n, i, j)]; }
};

enum class Corner { TopLeft, TopRight, BottomLeft, BottomRight };

inline GridLabel corner_label(std::size_t n, Corner c) {
  switch (c) {
    case Corner::TopLeft: return {1, 1};
    case Corner::TopRight: return {1, n};
    case Corner::BottomLeft: return {n, 1};
    case Corner::BottomRight: return {n, n};
  }
  return {1, 1};
}

namespace detail {

/// Maps corner-relative coordinates (a, b), with the corner at (1, 1), back to
/// grid labels.
inline GridLabel from_corner_frame(std::size_t n, Corner c, std::size_t a, std::size_t b) {
  const bool flip_i = c == Corner::BottomLeft || c == Corner::BottomRight;
  const bool flip_j = c == Corner::TopRight || c == Corner::BottomRight;
  return {flip_i ? n + 1 - a : a, flip_j ? n + 1 - b : b};
}

inline long long distance(long long x) { return x < 0 ? -x : x; }

/// Checks f(p) <= f(q) + slack for every pair inside each group with q
/// strictly closer (smaller key) than p.
template <class T>
bool ordered_groups(const GridField<T>& f, const std::vector<std::vector<std::pair<long long, GridLabel>>>& groups,
                    const T& slack) {
  for (const auto& group : groups)
    for (const auto& [kp, p] : group)
      for (const auto& [kq, q] : group)
        if (kq < kp && f.at(p.i, p.j) > f.at(q.i, q.j) + slack) return false;
  return true;
}

}  // namespace detail

/// Corner monotone: along every anti-diagonal line (perpendicular to the
/// corner's diagonal) values do not decrease towards the diagonal, and along
/// the two grid edges through the corner they do not decrease towards the
/// corner.
template <class T>
bool is_corner_monotone(const GridField<T>& f, Corner corner, const T& slack = T(0)) {
  const std::size_t n = f.n;
  std::vector<std::vector<std::pair<long long, GridLabel>>> groups;
  for (std::size_t sum = 2; sum <= 2 * n; ++sum) {
    groups.emplace_back();
    for (std::size_t a = 1; a <= n; ++a) {
      if (sum <= a || sum - a > n) continue;
      const std::size_t b = sum - a;
      const auto key = detail::distance(static_cast<long long>(a) - static_cast<long long>(b));
      groups.back().emplace_back(key, detail::from_corner_frame(n, corner, a, b));
    }
  }
  for (int along_rows = 0; along_rows < 2; ++along_rows) {
    groups.emplace_back();
    for (std::size_t k = 1; k <= n; ++k)
      groups.back().emplace_back(static_cast<long long>(k), along_rows ? detail::from_corner_frame(n, corner, 1, k)
                                                                       : detail::from_corner_frame(n, corner, k, 1));
  }
  return detail::ordered_groups(f, groups, slack);
}

/// Center monotone: for each of the four symmetry axes, values do not
/// decrease towards the axis along every line perpendicular to it.
template <class T>
bool is_center_monotone(const GridField<T>& f, const T& slack = T(0)) {
  const auto n = static_cast<long long>(f.n);
  std::vector<std::vector<std::pair<long long, GridLabel>>> groups;
  auto label = [](long long i, long long j) { return GridLabel{static_cast<std::size_t>(i), static_cast<std::size_t>(j)}; };
  // Rows (vertical axis) and columns (horizontal axis); doubled distances.
  for (long long line = 1; line <= n; ++line) {
    groups.emplace_back();
    for (long long k = 1; k <= n; ++k) groups.back().emplace_back(detail::distance(2 * k - (n + 1)), label(line, k));
    groups.emplace_back();
    for (long long k = 1; k <= n; ++k) groups.back().emplace_back(detail::distance(2 * k - (n + 1)), label(k, line));
  }
  // Main diagonal i = j: lines i + j = const, distance |i - j|.
  for (long long sum = 2; sum <= 2 * n; ++sum) {
    groups.emplace_back();
    for (long long i = 1; i <= n; ++i)
      if (sum - i >= 1 && sum - i <= n) groups.back().emplace_back(detail::distance(2 * i - sum), label(i, sum - i));
  }
  // Anti-diagonal i + j = n + 1: lines i - j = const, distance |i + j - n - 1|.
  for (long long diff = -(n - 1); diff <= n - 1; ++diff) {
    groups.emplace_back();
    for (long long i = 1; i <= n; ++i)
      if (i - diff >= 1 && i - diff <= n) groups.back().emplace_back(detail::distance(2 * i - diff - n - 1), label(i, i - diff));
  }
  return detail::ordered_groups(f, groups, slack);
}

/// Center vertex for odd n; for even n the top-left vertex of the central
/// plaquette.
inline VertexId grid_center(std::size_t n) { return grid_id(n, (n + 1) / 2, (n + 1) / 2); }

/// The single center vertex (odd n) or the four central vertices (even n).
inline std::vector<VertexId> grid_central_vertices(std::size_t n) {
  if (n % 2 == 1) return {grid_center(n)};
  const std::size_t h = n / 2;
  return {grid_id(n, h, h), grid_id(n, h, h + 1), grid_id(n, h + 1, h), grid_id(n, h + 1, h + 1)};
}

/// Vertices of the four grid edges, each once, in row-major order.
inline std::vector<VertexId> grid_boundary(std::size_t n) {
  std::vector<VertexId> out;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      if (i == 1 || j == 1 || i == n || j == n) out.push_back(grid_id(n, i, j));
  return out;
}

// ---------------------------------------------------------------------------
// Jacobi monotonicity

struct JacobiMonotoneReport {
  std::size_t iterates_checked = 0;  // including c_0
  bool all_monotone = true;
  std::size_t first_failure = 0;     // iterate index, meaningful when !all_monotone
  bool converged = false;
};

/// Runs the averaging iteration on GRID_n from unit potential held at the
/// corner and checks corner monotonicity of every iterate. Stops after
/// max_iterations iterates or at convergence (change below tolerance).
template <class T>
JacobiMonotoneReport jacobi_corner_monotone(std::size_t n, Corner corner, std::size_t max_iterations,
                                            const T& tolerance, const T& slack) {
  const auto g = grid(n);
  const auto c = corner_label(n, corner);
  JacobiMonotoneReport report;
  auto observe = [&](std::size_t t, const std::vector<T>& values) {
    ++report.iterates_checked;
    if (!is_corner_monotone(GridField<T>::from_vertices(n, values), corner, slack)) {
      report.all_monotone = false;
      report.first_failure = t;
      return false;
    }
    return t < max_iterations;
  };
  const auto result = jacobi_solve<T>(g, {{grid_id(n, c.i, c.j), T(1)}}, tolerance, max_iterations + 1, observe);
  report.converged = result.converged;
  return report;
}

inline JacobiMonotoneReport jacobi_corner_monotone_exact(std::size_t n, Corner corner, std::size_t iterations) {
  return jacobi_corner_monotone<Rational>(n, corner, iterations, Rational(0), Rational(0));
}

inline JacobiMonotoneReport jacobi_corner_monotone_float(std::size_t n, Corner corner, double slack = 1e-12,
                                                         double tolerance = 1e-14) {
  return jacobi_corner_monotone<double>(n, corner, 10000000, tolerance, slack);
}

struct CenterFieldReport {
  GridField<double> field;
  bool center_monotone = false;
  bool corner_minimum = false;  // the ordinary minimum is attained at a corner
  double minimum = 0.0;
};

/// Converged field with unit potential held at the center (the central
/// plaquette for even n).
inline CenterFieldReport center_source_field(std::size_t n, double slack = 1e-12) {
  const auto g = grid(n);
  // Holding several vertices at 1 is a potential problem, solved directly:
  // fold the held set into a clamped source through the grounded solver.
  const auto held = grid_central_vertices(n);
  std::vector<char> is_held(g.vertex_count(), 0);
  for (auto v : held) is_held[v] = 1;
  std::vector<EdgeRecord> records;
  const VertexId pole = held.front();
  auto fold = [&](VertexId x) { return is_held[x] ? pole : x; };
  for (const auto& r : g.edges())
    if (fold(r.u) != fold(r.v)) records.push_back({fold(r.u), fold(r.v), r.multiplicity, r.conductance});
  for (std::size_t k = 1; k < held.size(); ++k) records.push_back({held[k], pole, 1, 1.0});
  const auto folded = SandpileGraph::from_records(g.vertex_count(), records, g.sink());
  auto pot = solve_potential(folded, pole).values;
  for (auto v : held) pot[v] = 1.0;
  CenterFieldReport report;
  report.field = GridField<double>::from_vertices(n, pot);
  report.center_monotone = is_center_monotone(report.field, slack);
  report.minimum = *std::min_element(report.field.values.begin(), report.field.values.end());
  report.corner_minimum = false;
  for (auto c : {Corner::TopLeft, Corner::TopRight, Corner::BottomLeft, Corner::BottomRight}) {
    const auto l = corner_label(n, c);
    if (report.field.at(l.i, l.j) <= report.minimum + slack) report.corner_minimum = true;
  }
  return report;
}

/// max |f(i,j) - f(j,i)| for a field on a square grid (reflection across the
/// main diagonal).
inline double diagonal_asymmetry(const GridField<double>& f) {
  double worst = 0.0;
  for (std::size_t i = 1; i <= f.n; ++i)
    for (std::size_t j = 1; j <= f.n; ++j) worst = std::max(worst, std::abs(f.at(i, j) - f.at(j, i)));
  return worst;
}

// ---------------------------------------------------------------------------
// Product distribution and corner responses

struct ProductDistribution {
  GridField<double> field;
  std::vector<double> slot_potential;  // by edge record of GRID_n; 0 for grounded and internal edges
  double total_source = 0.0;           // per driven vertex, the corner (n,n) counted once
  double max_error = 0.0;              // max |V(i,j) - i*j|
};

/// Top row and left column are grounded through their sink edges; the
/// bottom row (i = n) and right column (j = n) are driven through theirs at
/// (n+1)*k, k the coordinate along the edge, and (n,n) at n^2+n on both of its
/// sink edges. The solved field is V(i,j) = i*j.
inline ProductDistribution product_distribution(std::size_t n, double tolerance = 1e-9) {
  require(n >= 2, ErrorCode::InvalidArgument, "product distribution needs n >= 2");
  const auto g = grid(n);
  ProductDistribution out;
  out.slot_potential.assign(g.edge_count(), 0.0);
  std::vector<double> current(g.vertex_count(), 0.0);
  const double side = static_cast<double>(n + 1);
  for (VertexId v = 0; v < n * n; ++v) {
    const auto [i, j] = grid_label(n, v);
    // Sink slots at v are assigned in the order bottom, then right.
    std::vector<double> driven;
    if (i == n) driven.push_back(side * static_cast<double>(j));
    if (j == n) driven.push_back(side * static_cast<double>(i));
    std::size_t next = 0;
    for (EdgeId e : g.incident_edges(v)) {
      const auto& rec = g.edges()[e];
      if (rec.other(v) != g.sink()) continue;
      // Remaining sink slots (top / left) stay grounded.
      if (next < driven.size()) {
        out.slot_potential[e] = driven[next];
        current[v] += rec.conductance * driven[next];
        ++next;
      }
    }
    if (!driven.empty()) out.total_source += driven.front();
  }
  const auto values = GroundedSolver(g).solve(current);
  out.field = GridField<double>::from_vertices(n, values);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j)
      out.max_error = std::max(out.max_error, std::abs(out.field.at(i, j) - static_cast<double>(i * j)));
  require(out.max_error <= tolerance * static_cast<double>(n * n), ErrorCode::AssertionFailure,
          "product distribution does not reproduce V(i,j) = i*j");
  return out;
}

struct EdgeSourceTransfer {
  VertexId site = 0;                 // driven vertex with the largest response at (1,1)
  double response = 0.0;             // potential at (1,1) per unit slot potential at site
  double total_source = 0.0;         // n^3 + n^2
  double induced = 0.0;              // total_source * response, at least 1
  double pinned_ratio = 0.0;         // slot potential needed / potential the site itself reaches
};

/// All driven sources moved onto the single best site: the induced potential
/// at (1,1) is at least one. Driving a site through one of its own sink edges
/// differs from holding the site at a potential by pinned_ratio, measured
/// directly rather than assumed constant.
inline EdgeSourceTransfer edge_source_transfer(std::size_t n) {
  const auto prod = product_distribution(n);
  const auto g = grid(n);
  const GroundedSolver solver(g);
  const VertexId target = grid_id(n, 1, 1);
  EdgeSourceTransfer best;
  best.total_source = prod.total_source;
  for (VertexId v = 0; v < n * n; ++v) {
    const auto [i, j] = grid_label(n, v);
    if (i != n && j != n) continue;
    // Unit potential on one sink slot of v injects unit current at v.
    const auto green = solver.green(v);
    if (green[target] > best.response) {
      best.response = green[target];
      best.site = v;
      best.pinned_ratio = 1.0 / green[v];
    }
  }
  best.induced = best.total_source * best.response;
  return best;
}

struct CornerCenterResponse {
  double response = 0.0;          // 1 / min over central vertices of pi_(1,1)
  double center_potential = 0.0;  // that minimum
  double opposite_edge_max = 0.0; // max pi_(1,1) on row n and column n
};

inline CornerCenterResponse corner_to_center_response(std::size_t n) {
  const auto g = grid(n);
  const auto pot = solve_potential(g, grid_id(n, 1, 1));
  CornerCenterResponse out;
  out.center_potential = 1.0;
  for (auto c : grid_central_vertices(n)) out.center_potential = std::min(out.center_potential, pot[c]);
  out.response = 1.0 / out.center_potential;
  for (std::size_t k = 1; k <= n; ++k)
    out.opposite_edge_max = std::max({out.opposite_edge_max, pot[grid_id(n, n, k)], pot[grid_id(n, k, n)]});
  return out;
}

// ---------------------------------------------------------------------------
// Potential profile on the grid

struct GridGammaReport {
  double gamma = 0.0;
  double injected = 0.0;
  std::vector<double> ring_sums;  // ring k = min(i-1, j-1, n-i, n-j), outermost first
  bool current_bounded = false;   // injected <= 4
  bool gamma_bounded = false;     // gamma <= 2 n injected
  bool rings_monotone = false;    // ring sums non-increasing inwards
  bool boundary_sum_bounded = false;  // outer ring sum <= injected
  bool ok() const { return current_bounded && gamma_bounded && rings_monotone && boundary_sum_bounded; }
};

inline GridGammaReport gamma_grid_check(const SandpileGraph& g, const PotentialVector& pot, std::size_t n,
                                        double slack = kInequalitySlack) {
  GridGammaReport r;
  r.gamma = potential_profile(g, pot).gamma;
  r.injected = pot.injected_current;
  r.ring_sums.assign((n + 1) / 2, 0.0);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) r.ring_sums[std::min({i - 1, j - 1, n - i, n - j})] += pot[grid_id(n, i, j)];
  r.current_bounded = r.injected <= 4.0 + slack;
  r.gamma_bounded = r.gamma <= 2.0 * static_cast<double>(n) * r.injected + slack;
  r.rings_monotone = true;
  for (std::size_t k = 1; k < r.ring_sums.size(); ++k)
    if (r.ring_sums[k] > r.ring_sums[k - 1] + slack) r.rings_monotone = false;
  r.boundary_sum_bounded = r.ring_sums.front() <= r.injected + slack;
  return r;
}

inline GridGammaReport gamma_grid_check(std::size_t n, VertexId v, double slack = kInequalitySlack) {
  const auto g = grid(n);
  require(g.sink_adjacent(v), ErrorCode::InvalidArgument, "source must be a boundary vertex");
  return gamma_grid_check(g, solve_potential(g, v), n, slack);
}

/// Every boundary source of GRID_n; returns the sources whose report fails.
inline std::vector<VertexId> gamma_grid_sweep(std::size_t n, double slack = kInequalitySlack) {
  const auto g = grid(n);
  const GroundedSolver solver(g);
  const auto sources = grid_boundary(n);
  const auto pots = solve_potentials(solver, sources);
  std::vector<VertexId> failures;
  for (std::size_t k = 0; k < sources.size(); ++k)
    if (!gamma_grid_check(g, pots[k], n, slack).ok()) failures.push_back(sources[k]);
  return failures;
}

// ---------------------------------------------------------------------------
// tcl pipeline

struct LowerBoundProbe {
  VertexId v = 0;  // particles added here
  VertexId w = 0;  // site that must topple
  double potential = 0.0;
  double value = 0.0;  // 1 / pi_w(v) - 1
};

/// Worst pair among (corner (1,1), vertex on the opposite edges) in both
/// orders: the smallest pi_w(v), giving R_s(v,w) >= 1/pi_w(v) - 1.
inline LowerBoundProbe lower_bound_probe(const GroundedSolver& solver, std::size_t n) {
  const VertexId corner = grid_id(n, 1, 1);
  std::vector<VertexId> far;
  for (std::size_t k = 1; k <= n; ++k) far.push_back(grid_id(n, n, k));
  for (std::size_t k = 1; k < n; ++k) far.push_back(grid_id(n, k, n));
  const auto from_corner = solve_potential(solver, corner);
  const auto towards = solve_potentials(solver, far);
  LowerBoundProbe best;
  best.potential = 2.0;
  for (std::size_t k = 0; k < far.size(); ++k) {
    if (from_corner[far[k]] < best.potential) best = {far[k], corner, from_corner[far[k]], 0.0};
    if (towards[k][corner] < best.potential) best = {corner, far[k], towards[k][corner], 0.0};
  }
  best.value = 1.0 / best.potential - 1.0;
  return best;
}

inline LowerBoundProbe lower_bound_probe(std::size_t n) { return lower_bound_probe(GroundedSolver(grid(n)), n); }

struct GridTclReport {
  std::size_t n = 0;
  TclEstimate direct;             // max Gamma_w / pi_w(v) over boundary pairs
  double beta = 0.0;              // min over boundary w of R_eff(s,c) / R_eff(s,w)
  double min_center_potential = 0.0;  // min over boundary v of pi_c(v)
  double max_injected = 0.0;      // max over boundary w of the injected current
  double analytic = 0.0;          // 2 n max_injected / (beta * min_center_potential^2)
  LowerBoundProbe probe;
  bool simulated = false;
  std::int64_t simulated_max = 0;        // max R_s over boundary pairs
  std::int64_t simulated_max_all = 0;    // max R_s over boundary v and every w
  VertexId simulated_v = 0;
  VertexId simulated_w = 0;
};

/// Direct-solve estimate, the chained analytic estimate through the center
/// c, the lower probe, and (when simulate is set) exact impedance maxima.
inline GridTclReport grid_tcl_pipeline(std::size_t n, bool simulate) {
  require(n >= 2, ErrorCode::InvalidArgument, "pipeline needs n >= 2");
  const auto g = grid(n);
  const GroundedSolver solver(g);
  GridTclReport r;
  r.n = n;
  r.direct = tcl_upper_estimate(solver);
  const auto boundary = g.boundary_vertices();
  const VertexId c = grid_center(n);
  const double center_resistance = effective_resistance(solver, g.sink(), c);
  const auto from_center = solve_potential(solver, c);
  r.beta = std::numeric_limits<double>::infinity();
  r.min_center_potential = 1.0;
  const auto pots = solve_potentials(solver, boundary);
  for (std::size_t k = 0; k < boundary.size(); ++k) {
    const VertexId w = boundary[k];
    r.beta = std::min(r.beta, center_resistance / effective_resistance(solver, g.sink(), w));
    r.min_center_potential = std::min(r.min_center_potential, from_center[w]);
    r.max_injected = std::max(r.max_injected, pots[k].injected_current);
  }
  r.analytic = 2.0 * static_cast<double>(n) * r.max_injected / (r.beta * r.min_center_potential * r.min_center_potential);
  r.probe = lower_bound_probe(solver, n);
  if (simulate) {
    const Sandpile pile(g);
    std::vector<std::vector<Impedance>> rows(boundary.size());
    parallel_for(boundary.size(), [&](std::size_t k) { rows[k] = sandpile_impedances_from(pile, boundary[k]); });
    r.simulated = true;
    for (std::size_t k = 0; k < boundary.size(); ++k)
      for (VertexId w = 0; w < n * n; ++w) {
        const auto value = rows[k][w].value;
        r.simulated_max_all = std::max(r.simulated_max_all, value);
        if (g.sink_adjacent(w) && value > r.simulated_max) {
          r.simulated_max = value;
          r.simulated_v = boundary[k];
          r.simulated_w = w;
        }
      }
  }
  return r;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument, "need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    require(x[k] > 0.0 && y[k] > 0.0, ErrorCode::InvalidArgument, "log-log fit needs positive data");
    mx += std::log(x[k]);
    my += std::log(y[k]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Corner-to-corner correlation

/// (1/n^2) sum over 0 <= a < b <= n-1 of
///   (-1)^(a+b+1) sin^2((a-b)pi/2n) sin^2((a+b)pi/2n) cos^2(a pi/2n) cos^2(b pi/2n)
///   / (4 - 2cos(a pi/n) - 2cos(b pi/n)),
/// accumulated with Neumaier summation in order of increasing a+b.
inline double spectral_corner_corner(std::size_t n) {
  require(n >= 2, ErrorCode::InvalidArgument, "spectral sum needs n >= 2");
  const double pi = std::numbers::pi;
  const double h = pi / (2.0 * static_cast<double>(n));
  double sum = 0.0, compensation = 0.0;
  auto add = [&](double term) {
    const double t = sum + term;
    compensation += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  };
  for (std::size_t total = 1; total <= 2 * n - 3; ++total)
    for (std::size_t a = 0; a <= total / 2; ++a) {
      const std::size_t b = total - a;
      if (a >= b || b > n - 1) continue;
      const double da = static_cast<double>(a), db = static_cast<double>(b);
      const double sign = (a + b + 1) % 2 == 0 ? 1.0 : -1.0;
      const double s1 = std::sin((da - db) * h), s2 = std::sin((da + db) * h);
      const double c1 = std::cos(da * h), c2 = std::cos(db * h);
      const double numerator = sign * s1 * s1 * s2 * s2 * c1 * c1 * c2 * c2;
      add(numerator / (4.0 - 2.0 * std::cos(2.0 * da * h) - 2.0 * std::cos(2.0 * db * h)));
    }
  return (sum + compensation) / static_cast<double>(n * n);
}

/// pi_(1,1)(n,n) on GRID_n computed in the restricted dual: the power edge
/// is a sink edge at (1,1), the target a sink edge at (n,n).
inline double dual_corner_corner(std::size_t n) {
  const auto g = grid(n);
  const VertexId a = grid_id(n, 1, 1), b = grid_id(n, n, n);
  EdgeId power = 0, target = 0;
  for (EdgeId e : g.incident_edges(a))
    if (g.edges()[e].other(a) == g.sink()) power = e;
  for (EdgeId e : g.incident_edges(b))
    if (g.edges()[e].other(b) == g.sink()) target = e;
  const auto rd = restricted_dual(g, power);
  return direct_current(rd, target) / g.edges()[target].conductance;
}

}  // namespace sandpile
