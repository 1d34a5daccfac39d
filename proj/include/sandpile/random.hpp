#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "sandpile/graph.hpp"

namespace sandpile {

using Rng = std::mt19937_64;

struct RandomSandpileOptions {
  std::size_t min_ordinary = 1;
  std::size_t max_ordinary = 12;
  std::int64_t max_degree = 0;  // 0 = unbounded
  double extra_edge_rate = 0.35;
  double sink_edge_rate = 0.35;
  double double_edge_rate = 0.15;
};

/// Random ordinary-connected sandpile: a random tree on the ordinary vertices
/// plus extra (possibly parallel) edges and random sink edges. Vertex 0
/// always has a sink edge; the sink is the last id.
inline SandpileGraph random_sandpile(Rng& rng, const RandomSandpileOptions& opt = {}) {
  require(opt.min_ordinary >= 1 && opt.min_ordinary <= opt.max_ordinary, ErrorCode::InvalidArgument,
          "bad ordinary vertex range");
  require(opt.max_degree == 0 || opt.max_degree >= 2 || opt.max_ordinary == 1, ErrorCode::InvalidArgument,
          "max degree must be at least 2");
  const std::size_t m = std::uniform_int_distribution<std::size_t>(opt.min_ordinary, opt.max_ordinary)(rng);
  const VertexId sink = m;
  const auto cap = opt.max_degree == 0 ? std::int64_t{1} << 40 : opt.max_degree;
  std::vector<std::int64_t> degree(m, 0);
  std::vector<EdgeSpec> edges;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto multiplicity_for = [&](std::int64_t room) {
    return (room >= 2 && coin(rng) < opt.double_edge_rate) ? std::int64_t{2} : std::int64_t{1};
  };

  edges.push_back({0, sink, 1});
  degree[0] = 1;
  for (VertexId i = 1; i < m; ++i) {
    std::vector<VertexId> open;
    for (VertexId j = 0; j < i; ++j)
      if (degree[j] < cap) open.push_back(j);
    // A path always leaves the newest vertex open, so this never stays empty.
    const VertexId j = open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)];
    const auto mult = multiplicity_for(std::min(cap - degree[j], cap));
    edges.push_back({j, i, mult});
    degree[i] += mult;
    degree[j] += mult;
  }
  if (m >= 2) {
    const auto attempts = static_cast<std::size_t>(opt.extra_edge_rate * static_cast<double>(m * (m - 1) / 2) + 0.5);
    std::uniform_int_distribution<VertexId> pick(0, m - 1);
    for (std::size_t t = 0; t < attempts; ++t) {
      const VertexId a = pick(rng), b = pick(rng);
      if (a == b || degree[a] >= cap || degree[b] >= cap) continue;
      const auto mult = multiplicity_for(std::min(cap - degree[a], cap - degree[b]));
      edges.push_back({std::min(a, b), std::max(a, b), mult});
      degree[a] += mult;
      degree[b] += mult;
    }
  }
  for (VertexId v = 0; v < m; ++v) {
    if (degree[v] >= cap || coin(rng) >= opt.sink_edge_rate) continue;
    const auto mult = multiplicity_for(cap - degree[v]);
    edges.push_back({v, sink, mult});
    degree[v] += mult;
  }
  return SandpileGraph::build(m + 1, edges, sink);
}

/// Uniform heights in [0, max_height] on the ordinary vertices.
inline std::vector<std::int64_t> random_heights(Rng& rng, const SandpileGraph& g, std::int64_t max_height) {
  std::uniform_int_distribution<std::int64_t> pick(0, max_height);
  std::vector<std::int64_t> heights(g.ordinary_count());
  for (auto& h : heights) h = pick(rng);
  return heights;
}

/// Uniform stable heights: each vertex in [0, degree - 1].
inline std::vector<std::int64_t> random_stable_heights(Rng& rng, const SandpileGraph& g) {
  std::vector<std::int64_t> heights(g.ordinary_count());
  for (std::size_t i = 0; i < heights.size(); ++i) {
    const auto d = g.degree(g.ordinary_vertex(i));
    heights[i] = std::uniform_int_distribution<std::int64_t>(0, d - 1)(rng);
  }
  return heights;
}

struct RandomPlanarOptions {
  std::size_t min_side = 2;
  std::size_t max_side = 5;
  double diagonal_rate = 0.5;
  double min_conductance = 0.5;
  double max_conductance = 2.0;
};

/// Random planar network with an embedding: a rows x cols grid where each
/// cell may carry one diagonal, boundary vertices wired to the sink in every
/// missing axis direction, and random conductances on every edge record.
inline SandpileGraph random_planar_network(Rng& rng, const RandomPlanarOptions& opt = {}) {
  std::uniform_int_distribution<std::size_t> side(opt.min_side, opt.max_side);
  const std::size_t rows = side(rng), cols = side(rng);
  auto id = [cols](std::size_t i, std::size_t j) { return i * cols + j; };
  std::vector<Point> position(rows * cols);
  std::vector<std::vector<std::optional<VertexId>>> slots(rows * cols);
  std::vector<std::vector<Point>> dirs(rows * cols);
  const Point up{0.0, 1.0}, down{0.0, -1.0}, left{-1.0, 0.0}, right{1.0, 0.0};
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const VertexId v = id(i, j);
      position[v] = {static_cast<double>(j), -static_cast<double>(i)};
      auto add = [&](bool present, std::size_t ni, std::size_t nj, Point d) {
        slots[v].push_back(present ? std::optional<VertexId>(id(ni, nj)) : std::nullopt);
        dirs[v].push_back(d);
      };
      add(i > 0, i - 1, j, up);
      add(i + 1 < rows, i + 1, j, down);
      add(j > 0, i, j - 1, left);
      add(j + 1 < cols, i, j + 1, right);
    }
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t i = 0; i + 1 < rows; ++i)
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      if (coin(rng) >= opt.diagonal_rate) continue;
      const bool falling = coin(rng) < 0.5;
      const VertexId a = falling ? id(i, j) : id(i, j + 1);
      const VertexId b = falling ? id(i + 1, j + 1) : id(i + 1, j);
      slots[a].push_back(b);
      dirs[a].push_back({0.0, 0.0});
      slots[b].push_back(a);
      dirs[b].push_back({0.0, 0.0});
    }
  const auto base = detail::lattice_patch(position, slots, dirs);
  std::uniform_real_distribution<double> conductance(opt.min_conductance, opt.max_conductance);
  std::vector<double> values(base.edge_count());
  for (auto& c : values) c = conductance(rng);
  return base.with_conductances(values);
}

}  // namespace sandpile
