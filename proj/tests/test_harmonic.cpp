#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "sandpile/sandpile.hpp"

using namespace sandpile;

namespace {

// Dense Dirichlet solve on the full Laplacian: value 1 at w, 0 at the sink.
std::vector<double> dense_potential(const SandpileGraph& g, VertexId w) {
  const auto lap = laplacian(g);
  const auto n = static_cast<Eigen::Index>(g.vertex_count());
  Eigen::MatrixXd a = lap;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (auto fixed : {w, g.sink()}) {
    a.row(static_cast<Eigen::Index>(fixed)).setZero();
    a(static_cast<Eigen::Index>(fixed), static_cast<Eigen::Index>(fixed)) = 1.0;
  }
  b(static_cast<Eigen::Index>(w)) = 1.0;
  const Eigen::VectorXd x = a.fullPivLu().solve(b);
  return {x.data(), x.data() + n};
}

// Effective resistance from the Laplacian pseudoinverse.
double dense_resistance(const SandpileGraph& g, VertexId u, VertexId v) {
  const Eigen::MatrixXd pinv = laplacian(g).completeOrthogonalDecomposition().pseudoInverse();
  const auto i = static_cast<Eigen::Index>(u), j = static_cast<Eigen::Index>(v);
  return pinv(i, i) + pinv(j, j) - 2.0 * pinv(i, j);
}

SandpileGraph weighted_random(Rng& rng) {
  auto g = random_sandpile(rng);
  std::uniform_real_distribution<double> pick(0.3, 3.0);
  std::vector<double> c(g.edge_count());
  for (auto& x : c) x = pick(rng);
  return g.with_conductances(c);
}

}  // namespace

TEST(Potential, MatchesDenseDirichletSolve) {
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const auto g = weighted_random(rng);
    const GroundedSolver solver(g);
    for (VertexId w : g.ordinary_vertices()) {
      const auto pot = solve_potential(solver, w);
      const auto ref = dense_potential(g, w);
      for (VertexId u = 0; u < g.vertex_count(); ++u) EXPECT_NEAR(pot[u], ref[u], 1e-10);
      EXPECT_EQ(pot[w], 1.0);
      EXPECT_EQ(pot[g.sink()], 0.0);
      EXPECT_LT(harmonic_residual(g, pot.values, {w}), 1e-10);
      EXPECT_TRUE(satisfies_max_principle(g, pot.values, {w}));
      EXPECT_NEAR(pot.injected_current, net_current(g, ref, w), 1e-10);
    }
  }
}

TEST(Potential, JacobiConvergesToTheSameField) {
  const auto g = grid(5);
  const auto pot = solve_potential(g, grid_id(5, 2, 3));
  const auto it = jacobi_solve<double>(g, {{grid_id(5, 2, 3), 1.0}}, 1e-14);
  EXPECT_TRUE(it.converged);
  for (VertexId u = 0; u < g.vertex_count(); ++u) EXPECT_NEAR(it.values[u], pot[u], 1e-11);
}

TEST(Potential, JacobiStopsWithMaxIterations) {
  try {
    jacobi_solve<double>(grid(6), {{0, 1.0}}, 1e-15, 3);
    FAIL() << "expected MaxIterations";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxIterations);
  }
}

TEST(Potential, ZeroAcrossOrdinaryComponents) {
  const auto g = SandpileGraph::build(5, {{0, 1, 1}, {1, 4, 1}, {2, 3, 1}, {3, 4, 1}}, 4);
  const auto pot = solve_potential(g, 0);
  EXPECT_EQ(pot[2], 0.0);
  EXPECT_EQ(pot[3], 0.0);
  EXPECT_GT(pot[1], 0.0);
}

TEST(Resistance, SeriesPathAndPseudoinverse) {
  // Path 0 - 1 - 2 - sink with resistances 1, 2, 4.
  const auto g = SandpileGraph::from_records(4, {{0, 1, 1, 1.0}, {1, 2, 1, 0.5}, {2, 3, 1, 0.25}}, 3);
  EXPECT_NEAR(effective_resistance(g, 0, 3), 7.0, 1e-12);
  EXPECT_NEAR(effective_resistance(g, 0, 2), 3.0, 1e-12);
  EXPECT_NEAR(effective_resistance(g, 3, 1), 6.0, 1e-12);
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const auto h = weighted_random(rng);
    const GroundedSolver solver(h);
    const auto vs = h.ordinary_vertices();
    for (VertexId u : vs) {
      EXPECT_NEAR(effective_resistance(solver, u, h.sink()), dense_resistance(h, u, h.sink()), 1e-9);
      for (VertexId v : vs) {
        if (u >= v) continue;
        EXPECT_NEAR(effective_resistance(solver, u, v), dense_resistance(h, u, v), 1e-9);
      }
    }
  }
}

TEST(Resistance, ReciprocityAndTriangleInequality) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto g = weighted_random(rng);
    const GroundedSolver solver(g);
    const auto vs = g.ordinary_vertices();
    for (VertexId a : vs)
      for (VertexId b : vs) {
        if (a == b) continue;
        EXPECT_TRUE(check_reciprocity(solver, a, b));
        for (VertexId c : vs) EXPECT_TRUE(check_triangle_inequality(solver, a, b, c));
      }
  }
}

TEST(Bounds, SandwichOnSmallGraphs) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const auto g = random_sandpile(rng);
    const Sandpile pile(g);
    const GroundedSolver solver(g);
    for (VertexId w : g.boundary_vertices()) {
      const auto pot = solve_potential(solver, w);
      for (VertexId v : g.boundary_vertices()) {
        const double rs = static_cast<double>(sandpile_impedance_exact(pile, v, w).value);
        EXPECT_LE(impedance_lower_bound(g, pot, v), rs + kInequalitySlack);
        EXPECT_LE(rs, impedance_upper_bound(g, pot, v) + kInequalitySlack);
      }
    }
  }
}

TEST(Bounds, ClosedFormsOnTheLine) {
  // Two vertices, each tied to the sink: pi_1(0) = 1/2.
  const auto g = line_sandpile(2);
  const auto pot = solve_potential(g, 1);
  EXPECT_NEAR(pot[0], 0.5, 1e-15);
  EXPECT_NEAR(impedance_lower_bound(g, pot, 0), 1.0, 1e-12);
  // Gamma = (2-1) * 1/2 + (2-1) * 1, divided by 1/2: tight here.
  EXPECT_NEAR(impedance_upper_bound(g, pot, 0), 3.0, 1e-12);
  EXPECT_EQ(sandpile_impedance_exact(g, 0, 1).value, 3);
}

TEST(Bounds, InfiniteWhenPotentialVanishes) {
  const auto g = SandpileGraph::build(5, {{0, 1, 1}, {1, 4, 1}, {2, 3, 1}, {3, 4, 1}}, 4);
  const auto pot = solve_potential(g, 0);
  try {
    impedance_upper_bound(g, pot, 2);
    FAIL() << "expected InfiniteBound";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfiniteBound);
  }
}

TEST(Certificates, FeasibleAndSharingTheBoundArithmetic) {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const auto g = random_sandpile(rng);
    const GroundedSolver solver(g);
    for (VertexId w : g.ordinary_vertices()) {
      const auto pot = solve_potential(solver, w);
      for (VertexId v : g.ordinary_vertices()) {
        const auto up = dual_certificate(g, pot, v, BoundDirection::Upper);
        const auto down = dual_certificate(g, pot, v, BoundDirection::Lower);
        EXPECT_LE(up.max_violation, 1e-9);
        EXPECT_LE(down.max_violation, 1e-9);
        EXPECT_EQ(up.objective, impedance_upper_bound(g, pot, v));
        EXPECT_EQ(down.objective, impedance_lower_objective(g, pot, v));
        EXPECT_NEAR(down.certified_objective, pot.injected_current / pot[v], 1e-12 * down.certified_objective);
        EXPECT_EQ(up.Y[v], 1.0);
      }
    }
  }
}

TEST(Certificates, InfeasiblePointIsRejected) {
  const auto g = grid(3);
  auto pot = solve_potential(g, grid_id(3, 1, 1));
  pot.values[grid_id(3, 2, 2)] *= 3.0;  // no longer harmonic
  EXPECT_THROW(dual_certificate(g, pot, grid_id(3, 3, 3), BoundDirection::Upper), Error);
}

TEST(Estimate, DegreeBoundedSandwich) {
  RandomSandpileOptions opt;
  opt.max_degree = 4;
  for (std::uint64_t seed = 50; seed < 80; ++seed) {
    Rng rng(seed);
    const auto g = random_sandpile(rng, opt);
    const Sandpile pile(g);
    const GroundedSolver solver(g);
    for (VertexId w : g.ordinary_vertices()) {
      const auto pot = solve_potential(solver, w);
      for (VertexId v : g.ordinary_vertices()) {
        const auto est = degree_bounded_estimate(g, pot, v);
        double sum = 0.0;
        for (VertexId u : g.ordinary_vertices()) sum += pot[u];
        EXPECT_NEAR(est.estimate, sum / pot[v], 1e-9 * est.estimate);
        const auto rs = sandpile_impedance_exact(pile, v, w).value;
        EXPECT_GE(static_cast<double>(rs + 1), est.lower - 1e-9);
        EXPECT_LE(static_cast<double>(rs), est.upper + 1e-9);
      }
    }
  }
}

TEST(Estimate, HeightWeightedSumRecoversTheParticleCount) {
  // With w untoppled, sum_u h(u) pi_w(u) is conserved by every toppling, so
  // the single-site stable configuration gives back R_s(v,w) exactly.
  const auto g = grid(4);
  const Sandpile pile(g);
  const GroundedSolver solver(g);
  for (VertexId w : {grid_id(4, 4, 4), grid_id(4, 2, 3)}) {
    const auto pot = solve_potential(solver, w);
    const VertexId v = grid_id(4, 1, 1);
    const auto r = heaviest_transient_topup(pile, v, w);
    EXPECT_NEAR(height_weighted_lower_bound(g, pot, v, r.single_site_stable.heights),
                static_cast<double>(r.particles), 1e-8 * static_cast<double>(r.particles));
    EXPECT_LE(indicator_lower_bound(g, pot, v, r.single_site_stable.heights),
              height_weighted_lower_bound(g, pot, v, r.single_site_stable.heights));
  }
}

TEST(Estimate, TclMatchesBruteForceMaximum) {
  Rng rng(8);
  for (int t = 0; t < 15; ++t) {
    const auto g = random_sandpile(rng);
    const auto est = tcl_upper_estimate(g, true);
    double best = 0.0;
    for (VertexId w : g.ordinary_vertices()) {
      const auto pot = dense_potential(g, w);
      double gamma = 0.0;
      for (VertexId u : g.ordinary_vertices()) gamma += static_cast<double>(g.degree(u) - 1) * pot[u];
      for (VertexId v : g.ordinary_vertices()) best = std::max(best, gamma / pot[v]);
    }
    EXPECT_NEAR(est.estimate, best, 1e-8 * best);
    // Gamma(w) <= sum_u (d(u) - 1) <= 2|E|.
    EXPECT_GE(2.0 * est.relaxed, est.estimate * (1.0 - 1e-12));
  }
}

TEST(Estimate, ReciprocityBoundScalesWithEdges) {
  const auto g = grid(3);
  const GroundedSolver solver(g);
  const VertexId v = grid_id(3, 1, 1), w = grid_id(3, 3, 3);
  const double expected = 2.0 * static_cast<double>(g.total_multiplicity()) *
                          effective_resistance(solver, v, g.sink()) / effective_resistance(solver, w, g.sink()) * 5.0;
  EXPECT_NEAR(sandpile_reciprocity_bound(solver, v, w, 5.0), expected, 1e-12 * expected);
}
