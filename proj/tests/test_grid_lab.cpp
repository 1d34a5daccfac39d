#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sandpile/sandpile.hpp"

using namespace sandpile;

namespace {

GridField<double> field_of(std::size_t n, const std::function<double(double, double)>& f) {
  GridField<double> out(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) out.at(i, j) = f(static_cast<double>(i), static_cast<double>(j));
  return out;
}

constexpr std::array kCorners{Corner::TopLeft, Corner::TopRight, Corner::BottomLeft, Corner::BottomRight};

}  // namespace

TEST(Monotone, ConstantFieldsPassBothChecks) {
  const auto f = field_of(5, [](double, double) { return 2.5; });
  for (auto c : kCorners) EXPECT_TRUE(is_corner_monotone(f, c));
  EXPECT_TRUE(is_center_monotone(f));
}

TEST(Monotone, HandBuiltFields) {
  // Rises away from the corner along the edges through it.
  EXPECT_FALSE(is_corner_monotone(field_of(4, [](double i, double j) { return i + j; }), Corner::TopLeft));
  // Falls away from (1,1) and peaks on the diagonal within each anti-diagonal.
  EXPECT_TRUE(is_corner_monotone(field_of(4, [](double i, double j) { return -(i + j) - std::abs(i - j); }),
                                 Corner::TopLeft));
  EXPECT_FALSE(is_corner_monotone(field_of(4, [](double i, double j) { return -(i + j) - std::abs(i - j); }),
                                  Corner::BottomLeft));
  EXPECT_FALSE(is_center_monotone(field_of(4, [](double i, double) { return i; })));
  // A bump centred on the grid.
  EXPECT_TRUE(is_center_monotone(field_of(5, [](double i, double j) {
    return -std::abs(i - 3.0) - std::abs(j - 3.0) - 0.1 * std::abs(i - j) - 0.1 * std::abs(i + j - 6.0);
  })));
}

TEST(Monotone, SlackAbsorbsRoundoff) {
  auto f = field_of(3, [](double, double) { return 1.0; });
  f.at(1, 3) += 1e-13;  // slightly above the corner value on the top edge
  EXPECT_FALSE(is_corner_monotone(f, Corner::TopLeft));
  EXPECT_TRUE(is_corner_monotone(f, Corner::TopLeft, 1e-12));
}

TEST(Jacobi, ExactIteratesAreCornerMonotone) {
  for (std::size_t n = 2; n <= 5; ++n)
    for (auto c : kCorners) {
      const auto r = jacobi_corner_monotone_exact(n, c, 3 * n * n);
      EXPECT_TRUE(r.all_monotone) << "n = " << n;
      EXPECT_EQ(r.iterates_checked, 3 * n * n + 1);
    }
}

TEST(Jacobi, RationalIteratesMatchFloatingIterates) {
  const std::size_t n = 4;
  const auto g = grid(n);
  std::vector<std::vector<Rational>> exact;
  std::vector<std::vector<double>> approx;
  jacobi_solve<Rational>(g, {{0, Rational(1)}}, Rational(0), 12, [&](std::size_t t, const std::vector<Rational>& v) {
    exact.push_back(v);
    return t < 12;
  });
  jacobi_solve<double>(g, {{0, 1.0}}, 0.0, 12, [&](std::size_t t, const std::vector<double>& v) {
    approx.push_back(v);
    return t < 12;
  });
  ASSERT_EQ(exact.size(), approx.size());
  for (std::size_t t = 0; t < exact.size(); ++t)
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      EXPECT_NEAR(exact[t][v].convert_to<double>(), approx[t][v], 1e-15);
}

TEST(Jacobi, IteratesRiseMonotonicallyInTime) {
  const auto g = grid(5);
  std::vector<double> previous;
  bool rising = true;
  jacobi_solve<double>(g, {{grid_id(5, 1, 1), 1.0}}, 1e-13, 100000, [&](std::size_t, const std::vector<double>& v) {
    if (!previous.empty())
      for (VertexId u = 0; u < v.size(); ++u)
        if (v[u] < previous[u]) rising = false;
    previous = v;
    return true;
  });
  EXPECT_TRUE(rising);
}

TEST(Jacobi, FloatRunsConverge) {
  for (std::size_t n : {2, 7, 10}) {
    const auto r = jacobi_corner_monotone_float(n, Corner::BottomRight);
    EXPECT_TRUE(r.all_monotone);
    EXPECT_TRUE(r.converged);
  }
}

TEST(CenterField, MonotoneWithCornerMinima) {
  for (std::size_t n = 2; n <= 9; ++n) {
    const auto r = center_source_field(n);
    EXPECT_TRUE(r.center_monotone) << "n = " << n;
    EXPECT_TRUE(r.corner_minimum) << "n = " << n;
    EXPECT_LT(diagonal_asymmetry(r.field), 1e-12);
    for (auto c : kCorners) {
      const auto l = corner_label(n, c);
      EXPECT_NEAR(r.field.at(l.i, l.j), r.minimum, 1e-12);
    }
  }
}

TEST(ProductDistribution, ReproducesTheProductField) {
  const auto two = product_distribution(2);
  EXPECT_NEAR(two.field.at(1, 1), 1.0, 1e-12);
  const auto four = product_distribution(4);
  EXPECT_NEAR(four.field.at(2, 3), 6.0, 1e-10);
  EXPECT_LT(four.max_error, 1e-9);
  EXPECT_NEAR(product_distribution(5).total_source, 150.0, 1e-9);
  EXPECT_NEAR(two.total_source, 12.0, 1e-12);
}

TEST(ProductDistribution, EdgeSourceTransferInducesUnitPotential) {
  for (std::size_t n : {3, 5, 8}) {
    const auto t = edge_source_transfer(n);
    EXPECT_GE(t.induced, 1.0);
    EXPECT_GT(t.pinned_ratio, 1.0);
    const auto l = grid_label(n, t.site);
    EXPECT_TRUE(l.i == n || l.j == n);
  }
}

TEST(CornerResponse, CenterBeatsTheOppositeEdges) {
  const auto three = corner_to_center_response(3);
  EXPECT_GE(three.response, 1.0);
  EXPECT_LE(three.response, 27.0 * 10.0);
  for (std::size_t n = 3; n <= 15; n += 2) {
    const auto r = corner_to_center_response(n);
    EXPECT_GE(r.center_potential, r.opposite_edge_max) << "n = " << n;
  }
  std::vector<double> ns, responses;
  for (std::size_t n = 5; n <= 31; n += 2) {
    ns.push_back(static_cast<double>(n));
    responses.push_back(corner_to_center_response(n).response);
  }
  EXPECT_LE(loglog_slope(ns, responses), 3.2);
}

TEST(Gamma, GridInequalities) {
  const auto corner = gamma_grid_check(4, grid_id(4, 1, 1));
  EXPECT_TRUE(corner.ok());
  EXPECT_LE(corner.injected, 4.0);
  for (std::size_t n = 2; n <= 16; ++n) EXPECT_TRUE(gamma_grid_sweep(n).empty()) << "n = " << n;
  EXPECT_THROW(gamma_grid_check(3, grid_id(3, 2, 2)), Error);
}

TEST(Pipeline, LayersAreOrderedOnSmallGrids) {
  const auto r = grid_tcl_pipeline(4, true);
  EXPECT_LE(static_cast<double>(r.simulated_max), r.direct.estimate);
  EXPECT_LE(r.direct.estimate, r.analytic);
  EXPECT_LE(r.probe.value, static_cast<double>(r.simulated_max));
  // The probe pair itself: its lower bound is below the simulated impedance.
  const auto exact = sandpile_impedance_exact(grid(4), r.probe.v, r.probe.w);
  EXPECT_LE(r.probe.value, static_cast<double>(exact.value));
  for (std::size_t n = 4; n <= 32; n *= 2) EXPECT_GE(grid_tcl_pipeline(n, false).beta, 0.25) << "n = " << n;
}

TEST(Pipeline, ProbeExceedsTheAreaBound) {
  for (std::size_t n : {16, 32}) EXPECT_GE(lower_bound_probe(n).value, static_cast<double>(n * n) / 4.0);
}

TEST(Pipeline, LogLogSlopeOfAPowerLaw) {
  const std::vector<double> x{2, 4, 8, 16};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
  EXPECT_NEAR(loglog_slope(x, y), 2.5, 1e-12);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), Error);
}

TEST(Spectral, TwoByTwoIsASingleTerm) {
  // (a,b) = (0,1): sin^2(pi/4) sin^2(pi/4) cos^2(0) cos^2(pi/4) / (4 - 2 - 0) / 4.
  EXPECT_NEAR(spectral_corner_corner(2), 1.0 / 64.0, 1e-15);
}

TEST(Spectral, TracksTheDualCurrentWithinAConstant) {
  double lo = 1e300, hi = 0.0;
  for (std::size_t n = 4; n <= 16; ++n) {
    const double ratio = spectral_corner_corner(n) / dual_corner_corner(n);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi / lo, 4.0);
}

TEST(Spectral, DualCornerCurrentIsThePrimalPotential) {
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto pot = solve_potential(grid(n), grid_id(n, 1, 1));
    EXPECT_NEAR(dual_corner_corner(n), pot[grid_id(n, n, n)], 1e-10);
  }
}
