#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "sandpile/sandpile.hpp"

using namespace sandpile;

namespace {

// Reference toppler over the raw edge list: always fires the unstable
// ordinary vertex with the smallest id.
struct NaiveResult {
  std::vector<std::int64_t> heights;  // by VertexId, sink entry counts absorbed particles
  std::vector<std::int64_t> topples;  // by VertexId
};

NaiveResult naive_stabilize(const SandpileGraph& g, std::vector<std::int64_t> heights) {
  NaiveResult r{std::move(heights), std::vector<std::int64_t>(g.vertex_count(), 0)};
  while (true) {
    VertexId pick = g.vertex_count();
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (!g.is_sink(v) && r.heights[v] >= g.degree(v)) {
        pick = v;
        break;
      }
    if (pick == g.vertex_count()) return r;
    r.heights[pick] -= g.degree(pick);
    ++r.topples[pick];
    for (const auto& rec : g.edges()) {
      if (rec.u == pick) r.heights[rec.v] += rec.multiplicity;
      if (rec.v == pick) r.heights[rec.u] += rec.multiplicity;
    }
  }
}

std::vector<std::int64_t> by_vertex(const SandpileGraph& g, const Configuration& c) {
  std::vector<std::int64_t> out(g.vertex_count(), 0);
  for (std::size_t i = 0; i < c.heights.size(); ++i) out[g.ordinary_vertex(i)] = c.heights[i];
  return out;
}

// Adds particles at v one at a time until w topples, with the reference toppler.
std::int64_t naive_impedance(const SandpileGraph& g, VertexId v, VertexId w) {
  std::vector<std::int64_t> h(g.vertex_count(), 0);
  for (std::int64_t k = 1;; ++k) {
    ++h[v];
    const auto r = naive_stabilize(g, h);
    if (r.topples[w] > 0) return k - 1;
    h = r.heights;
    h[g.sink()] = 0;
  }
}

std::int64_t spanning_tree_count(const SandpileGraph& g) {
  const Eigen::MatrixXd reduced(grounded_laplacian(g));
  return static_cast<std::int64_t>(std::llround(reduced.determinant()));
}

}  // namespace

TEST(Engine, MatchesReferenceToppler) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    const auto g = random_sandpile(rng);
    const Sandpile pile(g);
    const Configuration c{random_heights(rng, g, 4 * g.max_degree())};
    const auto fast = pile.stabilize(c);
    const auto slow = naive_stabilize(g, by_vertex(g, c));
    for (std::size_t i = 0; i < pile.size(); ++i) {
      const VertexId v = g.ordinary_vertex(i);
      EXPECT_EQ(fast.stable.heights[i], slow.heights[v]) << "seed " << seed;
      EXPECT_EQ(fast.score.counts[i], slow.topples[v]) << "seed " << seed;
    }
    EXPECT_EQ(fast.absorbed, slow.heights[g.sink()]);
    EXPECT_EQ(c.weight(), fast.stable.weight() + fast.absorbed);
    EXPECT_TRUE(pile.linear_relation_holds(c, fast));
  }
}

TEST(Engine, OrderPoliciesAgree) {
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    const auto g = random_sandpile(rng);
    const Sandpile pile(g);
    const Configuration c{random_heights(rng, g, 5 * g.max_degree())};
    const auto a = pile.stabilize(c, OrderPolicy::fifo());
    const auto b = pile.stabilize(c, OrderPolicy::random(rng()));
    EXPECT_EQ(a.stable, b.stable);
    EXPECT_EQ(a.score, b.score);
    EXPECT_EQ(a.topple_events, b.topple_events);
  }
}

TEST(Engine, StableInputIsUntouched) {
  const Sandpile pile(grid(3));
  const auto c = pile.max_stable();
  const auto r = pile.stabilize(c);
  EXPECT_EQ(r.stable, c);
  EXPECT_EQ(r.topple_events, 0);
}

TEST(Engine, RejectsBadConfigurations) {
  const Sandpile pile(grid(2));
  EXPECT_THROW(pile.stabilize(Configuration{{1, 2}}), Error);
  EXPECT_THROW(pile.stabilize(Configuration{{1, -1, 0, 0}}), Error);
  auto g = grid(2).with_conductances(std::vector<double>(grid(2).edge_count(), 0.5));
  try {
    Sandpile bad(g);
    FAIL() << "non-integral network accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonIntegerNetwork);
  }
}

TEST(Engine, OverflowIsReported) {
  EXPECT_THROW(detail::checked_add(std::numeric_limits<std::int64_t>::max(), 1), Error);
  EXPECT_THROW(detail::checked_mul(std::int64_t{1} << 40, std::int64_t{1} << 40), Error);
  EXPECT_EQ(detail::checked_mul(-3, 7), -21);
}

TEST(Impedance, MatchesParticleByParticleOracle) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    Rng rng(seed);
    RandomSandpileOptions opt;
    opt.max_ordinary = 7;
    const auto g = random_sandpile(rng, opt);
    const Sandpile pile(g);
    for (VertexId v : g.ordinary_vertices()) {
      const auto row = sandpile_impedances_from(pile, v);
      for (VertexId w : g.ordinary_vertices()) {
        const auto exact = sandpile_impedance_exact(pile, v, w);
        ASSERT_FALSE(exact.infinite);
        if (v == w) {
          EXPECT_EQ(exact.value, g.degree(v) - 1);
          continue;
        }
        EXPECT_EQ(exact.value, naive_impedance(g, v, w)) << "seed " << seed << " pair " << v << "," << w;
        EXPECT_EQ(row[w], exact);
        EXPECT_EQ(minimum_particles_to_topple(pile, v, w).value, exact.value + 1);
      }
    }
  }
}

TEST(Impedance, PathValues) {
  // Path 0 - 1 - 2 with the sink hanging off both ends.
  const auto g = SandpileGraph::build(4, {{0, 1, 1}, {1, 2, 1}, {0, 3, 1}, {2, 3, 1}}, 3);
  EXPECT_EQ(sandpile_impedance_exact(g, 0, 1).value, 3);
  EXPECT_EQ(sandpile_impedance_exact(g, 0, 2).value, naive_impedance(g, 0, 2));
  EXPECT_EQ(sandpile_impedance_exact(g, 1, 1).value, 1);
}

TEST(Impedance, InfiniteAcrossOrdinaryComponents) {
  const auto g = SandpileGraph::build(5, {{0, 1, 1}, {1, 4, 1}, {2, 3, 1}, {3, 4, 1}}, 4);
  EXPECT_TRUE(sandpile_impedance_exact(g, 0, 3).infinite);
  EXPECT_TRUE(minimum_particles_to_topple(Sandpile(g), 0, 3).infinite);
  EXPECT_FALSE(sandpile_impedance_exact(g, 0, 1).infinite);
}

TEST(Impedance, LineSandpileSmallValues) {
  // Values from hand-stabilizing the line with every site tied to the sink.
  EXPECT_EQ(sandpile_impedance_exact(line_sandpile(2), 0, 1).value, 3);
  EXPECT_EQ(sandpile_impedance_exact(line_sandpile(3), 0, 2).value, naive_impedance(line_sandpile(3), 0, 2));
}

TEST(LastToppler, FinalWaveEndsWithTheReportedVertex) {
  const Sandpile pile(grid(4));
  const auto r = last_toppler(pile, grid_id(4, 1, 1));
  ASSERT_FALSE(r.final_wave.empty());
  EXPECT_EQ(r.vertex, r.final_wave.back());
  // Every site has toppled once the run stops: R_s to the last one is particles - 1.
  EXPECT_EQ(sandpile_impedance_exact(pile, grid_id(4, 1, 1), r.vertex).value, r.particles - 1);
}

TEST(Recurrence, ThreeTestsAgreeAndCountSpanningTrees) {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    Rng rng(seed);
    RandomSandpileOptions opt;
    opt.max_ordinary = 5;
    opt.max_degree = 4;
    const auto g = random_sandpile(rng, opt);
    const Sandpile pile(g);
    const auto reachable = recurrent_set(pile);
    std::int64_t burning = 0;
    for_each_stable(pile, [&](const Configuration& c) {
      const bool b = is_recurrent_burning(pile, c);
      EXPECT_EQ(b, is_recurrent_sink_firing(pile, c));
      EXPECT_EQ(b, reachable.count(c) > 0);
      burning += b ? 1 : 0;
    });
    EXPECT_EQ(burning, spanning_tree_count(g)) << "seed " << seed;
  }
}

TEST(Recurrence, GridCountsMatchTreeNumbers) {
  const Sandpile pile(grid(2));
  EXPECT_EQ(static_cast<std::int64_t>(recurrent_set(pile).size()), 192);
  EXPECT_EQ(spanning_tree_count(grid(2)), 192);
}

TEST(Recurrence, TestsNeedStableInput) {
  const Sandpile pile(grid(2));
  const Configuration big{{4, 0, 0, 0}};
  EXPECT_THROW(is_recurrent_burning(pile, big), Error);
  EXPECT_THROW(is_recurrent_sink_firing(pile, big), Error);
  EXPECT_THROW(is_recurrent_reachability(pile, big), Error);
}

TEST(Recurrence, MaximalStableAndEmpty) {
  const Sandpile pile(grid(3));
  EXPECT_TRUE(is_recurrent_burning(pile, pile.max_stable()));
  EXPECT_FALSE(is_recurrent_burning(pile, pile.empty()));
}

TEST(Scaling, StabilizationCommutesWithScaling) {
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const auto g = random_sandpile(rng);
    const Sandpile pile(g);
    const Configuration c{random_heights(rng, g, 2 * g.max_degree())};
    for (std::int64_t k : {1, 2, 3, 7}) {
      // Oracle: the reference toppler on k c and on k sigma(c).
      auto scaled = by_vertex(g, c);
      for (auto& h : scaled) h *= k;
      auto via = by_vertex(g, pile.stabilize(c).stable);
      for (auto& h : via) h *= k;
      auto a = naive_stabilize(g, scaled).heights, b = naive_stabilize(g, via).heights;
      a[g.sink()] = b[g.sink()] = 0;
      EXPECT_EQ(scaling_commutation_check(pile, c, k), a == b);
    }
  }
}

TEST(Topup, StaysStableAndKeepsTheTargetQuiet) {
  const Sandpile pile(grid(3));
  const VertexId v = grid_id(3, 1, 1), w = grid_id(3, 3, 3);
  const auto r = heaviest_transient_topup(pile, v, w);
  EXPECT_EQ(r.particles, sandpile_impedance_exact(pile, v, w).value);
  EXPECT_TRUE(pile.is_stable(r.topped_up));
  EXPECT_GE(r.topped_up.weight(), r.single_site_stable.weight());
  // One more particle at any unfilled site other than w must topple w.
  const auto wi = grid(3).ordinary_index(w);
  for (std::size_t i = 0; i < pile.size(); ++i) {
    if (i == wi || r.topped_up.heights[i] == pile.degree(i) - 1) continue;
    auto trial = r.topped_up;
    ++trial.heights[i];
    EXPECT_GT(pile.stabilize(trial).score.counts[wi], 0);
  }
}
