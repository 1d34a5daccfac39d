#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sandpile/graph.hpp"

namespace sandpile {

/// Heights over the ordinary vertices, indexed by ordinary index.
struct Configuration {
  std::vector<std::int64_t> heights;

  std::int64_t weight() const {
    std::int64_t total = 0;
    for (auto h : heights) total += h;
    return total;
  }
  auto operator<=>(const Configuration&) const = default;
};

/// Toppling counts per ordinary index.
struct ScoreVector {
  std::vector<std::int64_t> counts;

  bool operator==(const ScoreVector&) const = default;
};

struct StabilizeResult {
  Configuration stable;
  ScoreVector score;
  std::int64_t topple_events = 0;
  std::int64_t absorbed = 0;  // particles that fell into the sink
};

struct OrderPolicy {
  enum class Kind { Fifo, Random };
  Kind kind = Kind::Fifo;
  std::uint64_t seed = 0;

  static OrderPolicy fifo() { return {}; }
  static OrderPolicy random(std::uint64_t seed) { return {Kind::Random, seed}; }
};

/// Finite value or the distinguished infinite impedance (v and w are in
/// different components once the sink is removed).
struct Impedance {
  bool infinite = false;
  std::int64_t value = 0;

  static Impedance finite(std::int64_t v) { return {false, v}; }
  static Impedance unbounded() { return {true, 0}; }
  bool operator==(const Impedance&) const = default;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) fail(ErrorCode::Overflow, "64-bit height overflow");
  return out;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) fail(ErrorCode::Overflow, "64-bit height overflow");
  return out;
}

}  // namespace detail

/// Integer toppling dynamics on a sandpile graph. Keeps the ordinary-index
/// adjacency so repeated stabilizations do not touch the graph structure.
class Sandpile {
 public:
  explicit Sandpile(SandpileGraph g) : graph_(std::move(g)) {
    require(graph_.integral(), ErrorCode::NonIntegerNetwork, "sandpile dynamics need conductance == multiplicity");
    const std::size_t m = graph_.ordinary_count();
    degree_.resize(m);
    sink_edges_.resize(m);
    adjacency_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const VertexId v = graph_.ordinary_vertex(i);
      degree_[i] = graph_.degree(v);
      for (const auto& nb : graph_.neighbors(v)) {
        if (graph_.is_sink(nb.vertex))
          sink_edges_[i] = nb.multiplicity;
        else
          adjacency_[i].emplace_back(graph_.ordinary_index(nb.vertex), nb.multiplicity);
      }
    }
    const auto label = ordinary_components(graph_);
    component_.resize(m);
    for (std::size_t i = 0; i < m; ++i) component_[i] = label[graph_.ordinary_vertex(i)];
  }

  const SandpileGraph& graph() const { return graph_; }
  std::size_t size() const { return degree_.size(); }
  std::int64_t degree(std::size_t i) const { return degree_[i]; }
  std::int64_t sink_edges(std::size_t i) const { return sink_edges_[i]; }
  const std::vector<std::pair<std::size_t, std::int64_t>>& adjacency(std::size_t i) const { return adjacency_[i]; }
  bool same_component(std::size_t a, std::size_t b) const { return component_[a] == component_[b]; }

  bool is_stable(const Configuration& c) const {
    check_shape(c);
    for (std::size_t i = 0; i < size(); ++i)
      if (c.heights[i] >= degree_[i]) return false;
    return true;
  }

  Configuration max_stable() const {
    Configuration c;
    c.heights.resize(size());
    for (std::size_t i = 0; i < size(); ++i) c.heights[i] = degree_[i] - 1;
    return c;
  }

  Configuration empty() const { return Configuration{std::vector<std::int64_t>(size(), 0)}; }

  /// Topples until stable. Conservation and sigma = c - L z are verified in
  /// exact integer arithmetic before returning.
  StabilizeResult stabilize(const Configuration& c, OrderPolicy policy = OrderPolicy::fifo()) const {
    check_shape(c);
    for (auto h : c.heights) require(h >= 0, ErrorCode::InvalidArgument, "heights must be non-negative");
    StabilizeResult result;
    result.stable = c;
    result.score.counts.assign(size(), 0);
    if (policy.kind == OrderPolicy::Kind::Fifo)
      run_fifo(result, nullptr);
    else
      run_random(result, policy.seed);
    verify(c, result);
    return result;
  }

  /// Adds one particle at index i to a stable configuration and restabilizes
  /// in place (FIFO). on_first_topple(j) fires the first time j topples
  /// during this call. Returns the number of topple events.
  template <class OnTopple>
  std::int64_t add_particle(StabilizeResult& state, std::size_t i, OnTopple&& on_topple) const {
    state.stable.heights[i] = detail::checked_add(state.stable.heights[i], 1);
    if (state.stable.heights[i] < degree_[i]) return 0;
    const auto before = state.topple_events;
    run_fifo(state, std::forward<OnTopple>(on_topple), i);
    return state.topple_events - before;
  }

  /// Exact check of the linear relation sigma = c - L_g z together with the
  /// particle balance |c| = |sigma| + absorbed.
  bool linear_relation_holds(const Configuration& c, const StabilizeResult& r) const {
    std::int64_t absorbed = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      std::int64_t expected = c.heights[i] - detail::checked_mul(degree_[i], r.score.counts[i]);
      for (const auto& [j, m] : adjacency_[i]) expected += detail::checked_mul(m, r.score.counts[j]);
      if (expected != r.stable.heights[i]) return false;
      absorbed += detail::checked_mul(sink_edges_[i], r.score.counts[i]);
    }
    return absorbed == r.absorbed && c.weight() == r.stable.weight() + r.absorbed;
  }

 private:
  void check_shape(const Configuration& c) const {
    require(c.heights.size() == size(), ErrorCode::InvalidArgument, "configuration has wrong size");
  }

  void verify(const Configuration& c, const StabilizeResult& r) const {
    require(linear_relation_holds(c, r), ErrorCode::AssertionFailure, "stabilization broke sigma = c - L z");
  }

  void topple(StabilizeResult& r, std::size_t i, std::int64_t times) const {
    auto& h = r.stable.heights;
    h[i] -= detail::checked_mul(times, degree_[i]);
    r.score.counts[i] += times;
    r.topple_events += times;
    r.absorbed = detail::checked_add(r.absorbed, detail::checked_mul(times, sink_edges_[i]));
    for (const auto& [j, m] : adjacency_[i]) h[j] = detail::checked_add(h[j], detail::checked_mul(times, m));
  }

  template <class OnTopple>
  void run_fifo(StabilizeResult& r, OnTopple&& on_topple, std::optional<std::size_t> start = std::nullopt) const {
    auto& h = r.stable.heights;
    std::deque<std::size_t> queue;
    std::vector<char> queued(size(), 0);
    std::vector<char> toppled(size(), 0);
    auto push = [&](std::size_t j) {
      if (!queued[j] && h[j] >= degree_[j]) {
        queued[j] = 1;
        queue.push_back(j);
      }
    };
    if (start)
      push(*start);
    else
      for (std::size_t i = 0; i < size(); ++i) push(i);
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      queued[i] = 0;
      const std::int64_t times = h[i] / degree_[i];
      if (times == 0) continue;
      topple(r, i, times);
      if constexpr (!std::is_same_v<std::decay_t<OnTopple>, std::nullptr_t>) {
        if (!toppled[i]) {
          toppled[i] = 1;
          on_topple(i);
        }
      }
      for (const auto& [j, m] : adjacency_[i]) push(j);
    }
  }

  void run_random(StabilizeResult& r, std::uint64_t seed) const {
    auto& h = r.stable.heights;
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> unstable;
    std::vector<std::size_t> slot(size(), std::numeric_limits<std::size_t>::max());
    auto refresh = [&](std::size_t j) {
      const bool is_unstable = h[j] >= degree_[j];
      const bool listed = slot[j] != std::numeric_limits<std::size_t>::max();
      if (is_unstable && !listed) {
        slot[j] = unstable.size();
        unstable.push_back(j);
      } else if (!is_unstable && listed) {
        const std::size_t last = unstable.back();
        unstable[slot[j]] = last;
        slot[last] = slot[j];
        unstable.pop_back();
        slot[j] = std::numeric_limits<std::size_t>::max();
      }
    };
    for (std::size_t i = 0; i < size(); ++i) refresh(i);
    while (!unstable.empty()) {
      const std::size_t i = unstable[std::uniform_int_distribution<std::size_t>(0, unstable.size() - 1)(rng)];
      topple(r, i, 1);
      refresh(i);
      for (const auto& [j, m] : adjacency_[i]) refresh(j);
    }
  }

  SandpileGraph graph_;
  std::vector<std::int64_t> degree_;
  std::vector<std::int64_t> sink_edges_;
  std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> adjacency_;
  std::vector<std::size_t> component_;
};

inline StabilizeResult stabilize(const SandpileGraph& g, const Configuration& c,
                                 OrderPolicy policy = OrderPolicy::fifo()) {
  return Sandpile(g).stabilize(c, policy);
}

inline bool is_stable(const SandpileGraph& g, const Configuration& c) { return Sandpile(g).is_stable(c); }

/// c + k particles at ordinary vertex v.
inline Configuration with_particles(const Sandpile& pile, Configuration c, VertexId v, std::int64_t k) {
  const auto i = pile.graph().ordinary_index(v);
  c.heights[i] = detail::checked_add(c.heights[i], k);
  return c;
}

// ---------------------------------------------------------------------------
// Impedance oracles

/// Particle counts at which each vertex first topples while particles are
/// added one at a time at v, starting from the empty configuration. Entry
/// for w is the number k such that the k-th particle's avalanche is the first
/// to topple w; vertices that never topple (other component) get nullopt.
/// The sink entry is nullopt.
struct FirstToppleRun {
  std::vector<std::optional<std::int64_t>> first;  // by VertexId
  std::vector<std::vector<VertexId>> order;        // first topplings of each avalanche, FIFO order
  std::int64_t particles = 0;
  StabilizeResult state;
};

inline FirstToppleRun first_topple_run(const Sandpile& pile, VertexId v,
                                       std::optional<VertexId> stop_at = std::nullopt) {
  const auto& g = pile.graph();
  const auto vi = g.ordinary_index(v);
  std::size_t remaining = 0;
  for (std::size_t j = 0; j < pile.size(); ++j)
    if (pile.same_component(vi, j)) ++remaining;
  FirstToppleRun run;
  run.first.assign(g.vertex_count(), std::nullopt);
  run.state.stable = pile.empty();
  run.state.score.counts.assign(pile.size(), 0);
  std::vector<char> seen(pile.size(), 0);
  bool stop = false;
  while (remaining > 0 && !stop) {
    ++run.particles;
    std::vector<VertexId> fresh;
    pile.add_particle(run.state, vi, [&](std::size_t j) {
      if (seen[j]) return;
      seen[j] = 1;
      --remaining;
      const VertexId u = g.ordinary_vertex(j);
      run.first[u] = run.particles;
      fresh.push_back(u);
      if (stop_at && u == *stop_at) stop = true;
    });
    if (!fresh.empty()) run.order.push_back(std::move(fresh));
  }
  Configuration start = pile.empty();
  start.heights[vi] = run.particles;
  require(pile.linear_relation_holds(start, run.state), ErrorCode::AssertionFailure,
          "incremental stabilization broke sigma = c - L z");
  return run;
}

/// R_s(v, w) for every w at once: first topple count minus one.
inline std::vector<Impedance> sandpile_impedances_from(const Sandpile& pile, VertexId v) {
  const auto run = first_topple_run(pile, v);
  std::vector<Impedance> out(pile.graph().vertex_count(), Impedance::unbounded());
  for (VertexId u = 0; u < out.size(); ++u)
    if (run.first[u]) out[u] = Impedance::finite(*run.first[u] - 1);
  return out;
}

/// Particles that can be added at v (one at a time, from empty) before w
/// topples. R_s(v,v) = degree(v) - 1. Infinite when the sink separates v, w.
inline Impedance sandpile_impedance_exact(const Sandpile& pile, VertexId v, VertexId w) {
  const auto& g = pile.graph();
  const auto vi = g.ordinary_index(v), wi = g.ordinary_index(w);
  if (!pile.same_component(vi, wi)) return Impedance::unbounded();
  if (v == w) return Impedance::finite(g.degree(v) - 1);
  const auto run = first_topple_run(pile, v, w);
  return Impedance::finite(*run.first[w] - 1);
}

inline Impedance sandpile_impedance_exact(const SandpileGraph& g, VertexId v, VertexId w) {
  return sandpile_impedance_exact(Sandpile(g), v, w);
}

/// Smallest k such that stabilizing k particles at v (one shot, from empty)
/// topples w. Found by doubling and bisection over independent
/// stabilizations; monotone because the score vector is monotone in c.
inline Impedance minimum_particles_to_topple(const Sandpile& pile, VertexId v, VertexId w) {
  const auto& g = pile.graph();
  const auto vi = g.ordinary_index(v), wi = g.ordinary_index(w);
  if (!pile.same_component(vi, wi)) return Impedance::unbounded();
  auto topples = [&](std::int64_t k) {
    return pile.stabilize(with_particles(pile, pile.empty(), v, k)).score.counts[wi] > 0;
  };
  std::int64_t hi = 1;
  while (!topples(hi)) hi = detail::checked_mul(hi, 2);
  std::int64_t lo = hi / 2;  // lo never topples w (or is 0)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (topples(mid) ? hi : lo) = mid;
  }
  return Impedance::finite(hi);
}

struct LastToppler {
  VertexId vertex = 0;                // last first-toppling in FIFO order
  std::int64_t particles = 0;         // particles at v until every site toppled
  std::vector<VertexId> final_wave;   // all sites first toppling in that avalanche
  bool sink_adjacent = false;
};

/// Adds particles at v until every ordinary site has toppled at least once
/// and reports the site whose first toppling came last.
inline LastToppler last_toppler(const Sandpile& pile, VertexId v) {
  const auto& g = pile.graph();
  require(ordinary_connected(g), ErrorCode::InfiniteBound, "ordinary vertices are disconnected; some site never topples");
  const auto run = first_topple_run(pile, v);
  LastToppler out;
  out.particles = run.particles;
  out.final_wave = run.order.back();
  out.vertex = out.final_wave.back();
  out.sink_adjacent = g.sink_adjacent(out.vertex);
  return out;
}

// ---------------------------------------------------------------------------
// Recurrence

/// Burning test: repeatedly burn a vertex whose height covers its edges to
/// unburnt ordinary vertices; recurrent iff everything burns.
inline bool is_recurrent_burning(const Sandpile& pile, const Configuration& c) {
  require(pile.is_stable(c), ErrorCode::NotStable, "burning test needs a stable configuration");
  const std::size_t m = pile.size();
  std::vector<std::int64_t> unburnt_edges(m, 0);
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [j, mult] : pile.adjacency(i)) unburnt_edges[i] += mult;
  std::vector<char> burnt(m, 0);
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < m; ++i)
    if (c.heights[i] >= unburnt_edges[i]) ready.push_back(i);
  std::size_t count = 0;
  while (!ready.empty()) {
    const std::size_t i = ready.back();
    ready.pop_back();
    if (burnt[i]) continue;
    burnt[i] = 1;
    ++count;
    for (const auto& [j, mult] : pile.adjacency(i)) {
      if (burnt[j]) continue;
      unburnt_edges[j] -= mult;
      if (c.heights[j] >= unburnt_edges[j]) ready.push_back(j);
    }
  }
  return count == m;
}

/// Fires the sink (one particle per sink edge), stabilizes, and compares.
inline bool is_recurrent_sink_firing(const Sandpile& pile, const Configuration& c) {
  require(pile.is_stable(c), ErrorCode::NotStable, "sink-firing test needs a stable configuration");
  Configuration fired = c;
  for (std::size_t i = 0; i < pile.size(); ++i) fired.heights[i] += pile.sink_edges(i);
  return pile.stabilize(fired).stable == c;
}

/// Every stable configuration reachable from the maximal stable one by
/// adding particles and stabilizing (breadth-first). These are exactly the
/// recurrent configurations.
inline std::set<Configuration> recurrent_set(const Sandpile& pile, std::size_t state_limit = 2000000) {
  double states = 1.0;
  for (std::size_t i = 0; i < pile.size(); ++i) states *= static_cast<double>(pile.degree(i));
  require(states <= static_cast<double>(state_limit), ErrorCode::InvalidArgument, "stable state space too large");
  std::set<Configuration> seen{pile.max_stable()};
  std::deque<Configuration> frontier{pile.max_stable()};
  while (!frontier.empty()) {
    const auto c = frontier.front();
    frontier.pop_front();
    for (std::size_t i = 0; i < pile.size(); ++i) {
      auto next = c;
      ++next.heights[i];
      auto stable = pile.stabilize(next).stable;
      if (seen.insert(stable).second) frontier.push_back(std::move(stable));
    }
  }
  return seen;
}

inline bool is_recurrent_reachability(const Sandpile& pile, const Configuration& c) {
  require(pile.is_stable(c), ErrorCode::NotStable, "reachability test needs a stable configuration");
  return recurrent_set(pile).count(c) > 0;
}

/// Calls visit(c) for every stable configuration in lexicographic order.
template <class Visit>
void for_each_stable(const Sandpile& pile, Visit&& visit) {
  Configuration c = pile.empty();
  const std::size_t m = pile.size();
  while (true) {
    visit(static_cast<const Configuration&>(c));
    std::size_t i = 0;
    while (i < m && c.heights[i] == pile.degree(i) - 1) c.heights[i++] = 0;
    if (i == m) return;
    ++c.heights[i];
  }
}

// ---------------------------------------------------------------------------
// Heaviest transient configuration and scaling

struct TopupResult {
  std::int64_t particles = 0;          // R_s(v, w)
  Configuration single_site_stable;    // sigma(R_s(v,w) particles at v)
  Configuration topped_up;             // after greedily filling the other sites
};

/// Adds R_s(v,w) particles at v and stabilizes, then visits the sites other
/// than w in vertex order, adding one particle at a time while the site is
/// below capacity; an addition that would topple w is rolled back.
inline TopupResult heaviest_transient_topup(const Sandpile& pile, VertexId v, VertexId w) {
  const auto& g = pile.graph();
  const auto impedance = sandpile_impedance_exact(pile, v, w);
  require(!impedance.infinite, ErrorCode::InfiniteBound, "w never topples when particles are added at v");
  TopupResult out;
  out.particles = impedance.value;
  out.single_site_stable = pile.stabilize(with_particles(pile, pile.empty(), v, impedance.value)).stable;
  const auto wi = g.ordinary_index(w);
  Configuration c = out.single_site_stable;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < pile.size(); ++i) {
      if (i == wi) continue;
      while (c.heights[i] < pile.degree(i) - 1) {
        auto trial = c;
        ++trial.heights[i];
        const auto r = pile.stabilize(trial);
        if (r.score.counts[wi] > 0) break;
        c = r.stable;
        changed = true;
      }
    }
  }
  out.topped_up = c;
  return out;
}

/// sigma(k c) == sigma(k sigma(c)).
inline bool scaling_commutation_check(const Sandpile& pile, const Configuration& c, std::int64_t k) {
  require(k >= 1, ErrorCode::InvalidArgument, "scaling factor must be positive");
  auto scale = [k](Configuration x) {
    for (auto& h : x.heights) h = detail::checked_mul(h, k);
    return x;
  };
  const auto direct = pile.stabilize(scale(c)).stable;
  const auto via = pile.stabilize(scale(pile.stabilize(c).stable)).stable;
  return direct == via;
}

}  // namespace sandpile
