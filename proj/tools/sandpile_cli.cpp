// Command-line front end for the sandpile library. Reports go to stdout or
// --out; exit status is 0 on success, 1 on bad input and 2 when a checked
// property fails.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sandpile/sandpile.hpp"

namespace {

using namespace sandpile;

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 1;
constexpr int kExitViolation = 2;

/// Thrown by commands whose checked property fails; carries the report.
struct PropertyViolation {
  std::string detail;
};

/// grid:N, triangular:N, honeycomb:N, line:K, random:SEED, or a JSON file.
SandpileGraph resolve_graph(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    std::uint64_t value = 0;
    try {
      value = std::stoull(spec.substr(colon + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "bad graph parameter in '" + spec + "'");
    }
    if (kind == "grid") return grid(value);
    if (kind == "triangular") return triangular(value);
    if (kind == "honeycomb") return honeycomb(value);
    if (kind == "line") return line_sandpile(value);
    if (kind == "random") {
      Rng rng(value);
      return random_sandpile(rng);
    }
    fail(ErrorCode::InvalidArgument, "unknown graph family '" + kind + "'");
  }
  return load_graph(spec);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      require(file_->good(), ErrorCode::InvalidArgument, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

Json configuration_json(const SandpileGraph& g, const Configuration& c) {
  Json out = Json::object();
  for (std::size_t i = 0; i < c.heights.size(); ++i) out[std::to_string(g.ordinary_vertex(i))] = c.heights[i];
  return out;
}

Configuration parse_configuration(const Sandpile& pile, const std::string& text) {
  Configuration c = pile.empty();
  std::stringstream in(text);
  std::string cell;
  std::size_t k = 0;
  while (std::getline(in, cell, ',')) {
    require(k < c.heights.size(), ErrorCode::InvalidArgument, "configuration has too many entries");
    try {
      c.heights[k++] = std::stoll(cell);
    } catch (const std::exception&) {
      fail(ErrorCode::InvalidArgument, "bad height '" + cell + "'");
    }
  }
  require(k == c.heights.size(), ErrorCode::InvalidArgument, "configuration needs one height per ordinary vertex");
  return c;
}

std::string impedance_text(const Impedance& z) { return z.infinite ? "inf" : std::to_string(z.value); }

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string graph = "grid:4";
  std::vector<std::string> add;
  std::string policy = "fifo";
  std::uint64_t seed = 0;
  std::string out;
};

void run_simulate(const SimulateArgs& a) {
  const Sandpile pile(resolve_graph(a.graph));
  const auto& g = pile.graph();
  Configuration c = pile.empty();
  for (const auto& item : a.add) {
    // v=<vertex>:k=<count>
    std::size_t v = 0;
    long long k = 0;
    if (std::sscanf(item.c_str(), "v=%zu:k=%lld", &v, &k) != 2 || k < 0)
      fail(ErrorCode::InvalidArgument, "--add expects v=<vertex>:k=<count>, got '" + item + "'");
    require(v < g.vertex_count() && !g.is_sink(v), ErrorCode::InvalidArgument, "--add vertex must be ordinary");
    c = with_particles(pile, c, v, k);
  }
  const auto policy = a.policy == "random" ? OrderPolicy::random(a.seed) : OrderPolicy::fifo();
  require(a.policy == "fifo" || a.policy == "random", ErrorCode::InvalidArgument, "--policy is fifo or random");
  const auto result = pile.stabilize(c, policy);
  Json report;
  report["stable"] = configuration_json(g, result.stable);
  Json score = Json::object();
  for (std::size_t i = 0; i < result.score.counts.size(); ++i)
    score[std::to_string(g.ordinary_vertex(i))] = result.score.counts[i];
  report["score"] = score;
  report["topple_events"] = result.topple_events;
  report["absorbed"] = result.absorbed;
  Output out(a.out);
  out.stream() << report.dump(1) << '\n';
}

// ---------------------------------------------------------------------------
// impedance

struct ImpedanceArgs {
  std::string graph = "grid:4";
  std::size_t v = 0;
  std::optional<std::size_t> w;
  bool cross_check = false;
  std::string out;
};

void run_impedance(const ImpedanceArgs& a) {
  const Sandpile pile(resolve_graph(a.graph));
  const auto& g = pile.graph();
  require(a.v < g.vertex_count() && !g.is_sink(a.v), ErrorCode::InvalidArgument, "--v must be ordinary");
  Output out(a.out);
  CsvWriter csv(out.stream(), {"v", "w", "impedance", "min_particles_to_topple"});
  std::vector<VertexId> targets;
  if (a.w) {
    require(*a.w < g.vertex_count() && !g.is_sink(*a.w), ErrorCode::InvalidArgument, "--w must be ordinary");
    targets.push_back(*a.w);
  } else {
    targets = g.ordinary_vertices();
  }
  const auto all = sandpile_impedances_from(pile, a.v);
  for (VertexId w : targets) {
    std::string oracle = "";
    if (a.cross_check) {
      const auto m = minimum_particles_to_topple(pile, a.v, w);
      oracle = impedance_text(m);
      const bool agree = (m.infinite && all[w].infinite) || (!m.infinite && !all[w].infinite && m.value == all[w].value + 1) ||
                         (w == a.v);
      if (!agree) throw PropertyViolation{"incremental and one-shot impedance disagree at w=" + std::to_string(w)};
    }
    csv.row() << a.v << w << impedance_text(all[w]) << oracle;
  }
}

// ---------------------------------------------------------------------------
// recurrent

struct RecurrentArgs {
  std::string graph = "grid:2";
  std::string config;
  bool exhaustive = false;
  std::string out;
};

void run_recurrent(const RecurrentArgs& a) {
  const Sandpile pile(resolve_graph(a.graph));
  Output out(a.out);
  if (a.exhaustive) {
    const auto recurrent = recurrent_set(pile);
    std::size_t checked = 0, count = 0;
    std::optional<Configuration> bad;
    for_each_stable(pile, [&](const Configuration& c) {
      const bool burn = is_recurrent_burning(pile, c), fire = is_recurrent_sink_firing(pile, c);
      const bool reach = recurrent.count(c) > 0;
      ++checked;
      if (burn) ++count;
      if ((burn != fire || burn != reach) && !bad) bad = c;
    });
    CsvWriter csv(out.stream(), {"stable_configurations", "recurrent", "disagreements"});
    csv.row() << checked << count << (bad ? 1 : 0);
    if (bad) throw PropertyViolation{configuration_json(pile.graph(), *bad).dump()};
    return;
  }
  const auto c = parse_configuration(pile, a.config);
  const bool burn = is_recurrent_burning(pile, c), fire = is_recurrent_sink_firing(pile, c);
  Json report;
  report["burning"] = burn;
  report["sink_firing"] = fire;
  try {
    report["reachability"] = is_recurrent_reachability(pile, c);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidArgument) throw;
    report["reachability"] = nullptr;
  }
  out.stream() << report.dump(1) << '\n';
  if (burn != fire || (report["reachability"].is_boolean() && report["reachability"].get<bool>() != burn))
    throw PropertyViolation{report.dump()};
}

// ---------------------------------------------------------------------------
// potential

struct PotentialArgs {
  std::string graph = "grid:4";
  std::size_t source = 0;
  std::string out;
};

void run_potential(const PotentialArgs& a) {
  const auto g = resolve_graph(a.graph);
  const auto pot = solve_potential(g, a.source);
  const auto profile = potential_profile(g, pot);
  Output out(a.out);
  CsvWriter csv(out.stream(), {"vertex", "potential", "gamma", "injected_current"});
  for (VertexId v = 0; v < g.vertex_count(); ++v) csv.row() << v << pot[v] << profile.gamma << pot.injected_current;
  if (!satisfies_max_principle(g, pot.values, {a.source})) throw PropertyViolation{"potential violates the maximum principle"};
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsArgs {
  std::string graph = "grid:4";
  std::optional<std::size_t> v, w;
  bool simulate = true;
  std::string out;
};

void run_bounds(const BoundsArgs& a) {
  const auto g = resolve_graph(a.graph);
  const GroundedSolver solver(g);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  if (a.v && a.w) {
    pairs.emplace_back(*a.v, *a.w);
  } else {
    for (VertexId v : g.boundary_vertices())
      for (VertexId w : g.boundary_vertices()) pairs.emplace_back(v, w);
  }
  std::optional<Sandpile> pile;
  if (a.simulate) pile.emplace(g);
  Output out(a.out);
  CsvWriter csv(out.stream(), {"v", "w", "lower", "exact", "upper", "upper_violation", "lower_violation", "lower_certified"});
  std::map<VertexId, std::vector<Impedance>> simulated;
  std::string violation;
  for (auto [v, w] : pairs) {
    const auto pot = solve_potential(solver, w);
    const auto upper = dual_certificate(g, pot, v, BoundDirection::Upper);
    const auto lower = dual_certificate(g, pot, v, BoundDirection::Lower);
    std::string exact;
    if (pile) {
      if (!simulated.count(v)) simulated[v] = sandpile_impedances_from(*pile, v);
      const auto z = simulated[v][w];
      exact = impedance_text(z);
      const double value = static_cast<double>(z.value);
      if (!z.infinite && (value < lower.objective - kInequalitySlack || value > upper.objective + kInequalitySlack) &&
          violation.empty())
        violation = "v=" + std::to_string(v) + " w=" + std::to_string(w) + " exact=" + exact;
    }
    csv.row() << v << w << lower.objective << exact << upper.objective << upper.max_violation << lower.max_violation
              << lower.certified_objective;
  }
  if (!violation.empty()) {
    Json report;
    report["graph"] = graph_to_json(g);
    report["violation"] = violation;
    throw PropertyViolation{report.dump()};
  }
}

// ---------------------------------------------------------------------------
// tcl-estimate

struct TclArgs {
  std::string graph = "grid:8";
  bool all_pairs = false;
  std::string out;
};

void run_tcl(const TclArgs& a) {
  const auto g = resolve_graph(a.graph);
  const auto est = tcl_upper_estimate(g, a.all_pairs);
  Output out(a.out);
  CsvWriter csv(out.stream(), {"estimate", "argmax_v", "argmax_w", "gamma", "potential", "relaxed"});
  csv.row() << est.estimate << est.argmax_v << est.argmax_w << est.gamma << est.potential << est.relaxed;
}

// ---------------------------------------------------------------------------
// grid-sweep

struct GridSweepArgs {
  std::vector<std::size_t> sizes{4, 8, 16, 32, 64};
  std::size_t simulate_max = 12;
  std::string out;
};

void run_grid_sweep(const GridSweepArgs& a) {
  std::vector<GridTclReport> reports(a.sizes.size());
  std::vector<std::size_t> gamma_failures(a.sizes.size());
  std::vector<CornerCenterResponse> c2c(a.sizes.size());
  for (std::size_t k = 0; k < a.sizes.size(); ++k) {
    const auto n = a.sizes[k];
    reports[k] = grid_tcl_pipeline(n, n <= a.simulate_max);
    gamma_failures[k] = gamma_grid_sweep(n).size();
    c2c[k] = corner_to_center_response(n);
  }
  Output out(a.out);
  CsvWriter csv(out.stream(), {"n", "quantity", "value", "method"});
  std::vector<double> ns, direct, probe;
  std::string violation;
  for (std::size_t k = 0; k < a.sizes.size(); ++k) {
    const auto& r = reports[k];
    csv.row() << r.n << "tcl_estimate" << r.direct.estimate << "solve";
    csv.row() << r.n << "tcl_analytic" << r.analytic << "chain";
    csv.row() << r.n << "beta" << r.beta << "solve";
    csv.row() << r.n << "lower_probe" << r.probe.value << "solve";
    csv.row() << r.n << "corner_center_response" << c2c[k].response << "solve";
    csv.row() << r.n << "gamma_failures" << gamma_failures[k] << "solve";
    if (r.simulated) {
      csv.row() << r.n << "simulated_max" << r.simulated_max << "simulation";
      const auto sim = static_cast<double>(r.simulated_max);
      if ((sim < r.probe.value || sim > r.direct.estimate) && violation.empty())
        violation = "n=" + std::to_string(r.n) + ": simulated maximum outside [probe, estimate]";
    }
    if (gamma_failures[k] > 0 && violation.empty()) violation = "n=" + std::to_string(r.n) + ": gamma inequality fails";
    ns.push_back(static_cast<double>(r.n));
    direct.push_back(r.direct.estimate);
    probe.push_back(r.probe.value);
  }
  if (ns.size() >= 2) {
    csv.row() << "fit" << "tcl_estimate_slope" << loglog_slope(ns, direct) << "regression";
    csv.row() << "fit" << "lower_probe_slope" << loglog_slope(ns, probe) << "regression";
  }
  if (!violation.empty()) throw PropertyViolation{violation};
}

// ---------------------------------------------------------------------------
// spectral-grid

struct SpectralArgs {
  std::vector<std::size_t> sizes{4, 8, 16, 32};
  std::string out;
};

void run_spectral(const SpectralArgs& a) {
  Output out(a.out);
  CsvWriter csv(out.stream(), {"n", "spectral", "dual_direct", "ratio"});
  double lo = 0.0, hi = 0.0;
  for (auto n : a.sizes) {
    const double s = spectral_corner_corner(n), d = dual_corner_corner(n);
    const double ratio = std::abs(s) / d;
    lo = lo == 0.0 ? ratio : std::min(lo, ratio);
    hi = std::max(hi, ratio);
    csv.row() << n << s << d << ratio;
  }
  csv.row() << "spread" << "" << "" << (lo > 0.0 ? hi / lo : 0.0);
}

// ---------------------------------------------------------------------------
// dual / eigen-current

struct DualArgs {
  std::string graph = "grid:2";
  std::string out;
};

void run_dual(const DualArgs& a) {
  const auto g = resolve_graph(a.graph);
  const auto dual = dualize(g);
  const auto back = dual_of_dual(dual);
  Json report;
  report["vertices"] = dual.vertex_count();
  report["edges"] = dual.edge_count();
  Json ends = Json::array();
  for (EdgeId e = 0; e < dual.edge_count(); ++e)
    ends.push_back({dual.map.ends[e].first, dual.map.ends[e].second, dual.conductance[e]});
  report["dual_edges"] = ends;
  report["rotation"] = dual.map.rotation;
  report["dual_of_dual_vertices"] = back.vertex_count();
  Output out(a.out);
  out.stream() << report.dump(1) << '\n';
  if (back.vertex_count() != g.vertex_count()) throw PropertyViolation{"dual of the dual has the wrong vertex count"};
}

struct EigenCurrentArgs {
  std::string graph = "grid:4";
  std::optional<std::size_t> power;
  double tolerance = 1e-8;
  std::string out;
};

void run_eigen_current(const EigenCurrentArgs& a) {
  const auto g = resolve_graph(a.graph);
  EdgeId power = 0;
  if (a.power) {
    power = *a.power;
  } else {
    const auto incident = g.incident_edges(g.sink());
    require(!incident.empty(), ErrorCode::InvalidArgument, "graph has no sink edges");
    power = incident.front();
  }
  const auto rd = restricted_dual(g, power);
  const auto spec = spectral_decomposition(rd);
  const auto z = direct_potentials(rd);
  Output out(a.out);
  CsvWriter csv(out.stream(), {"edge", "eigen_current", "direct_current", "relative_difference"});
  double worst = 0.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    if (!rd.usable(e)) continue;
    const double x = eigen_current(rd, spec, e), y = direct_current(rd, z, e);
    const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
    const double rel = std::abs(x - y) / scale;
    worst = std::max(worst, rel);
    csv.row() << e << x << y << rel;
  }
  if (worst > a.tolerance) throw PropertyViolation{"eigen and direct currents differ by " + format_real(worst)};
}

// ---------------------------------------------------------------------------
// reduce

struct ReduceArgs {
  std::string graph = "honeycomb:2";
  std::string mode = "honeycomb";
  std::size_t center = 0;
  std::size_t vi = 0, vj = 1;
  std::string out;
};

void run_reduce(const ReduceArgs& a) {
  const auto g = resolve_graph(a.graph);
  Output out(a.out);
  Json report;
  if (a.mode == "honeycomb") {
    const auto r = honeycomb_to_triangular(g);
    report["eliminated"] = r.eliminated;
    report["produced_resistances"] = r.produced;
    report["deviation"] = r.deviation;
    report["remaining_resistors"] = r.reduced.resistors().size();
    out.stream() << report.dump(1) << '\n';
    if (r.deviation > 1e-9) throw PropertyViolation{"reduced network is not equivalent"};
  } else if (a.mode == "star") {
    const auto net = ResistiveNetwork::from_graph(g);
    const auto boundary = net.boundary();
    const auto r = star_delta(net, a.center, boundary);
    const double deviation = equivalence_deviation(net, r.network, boundary);
    report["ends"] = r.ends;
    report["delta"] = r.delta;
    report["deviation"] = deviation;
    out.stream() << report.dump(1) << '\n';
    if (deviation > 1e-10) throw PropertyViolation{"star-delta changed boundary responses"};
  } else if (a.mode == "path") {
    const auto r = reduce_to_path(ResistiveNetwork::from_graph(g), a.vi, a.vj);
    report["steps"] = r.steps;
    report["history"] = r.history;
    report["is_path"] = is_pole_path(r.network, a.vi, a.vj);
    out.stream() << report.dump(1) << '\n';
    for (std::size_t k = 1; k < r.history.size(); ++k)
      if (r.history[k] > r.history[k - 1] + 1e-9) throw PropertyViolation{"a reduction step increased the potential"};
  } else {
    fail(ErrorCode::InvalidArgument, "--mode is honeycomb, star or path");
  }
}

// ---------------------------------------------------------------------------
// ksink

struct KsinkArgs {
  std::size_t edges = 8;
  std::size_t k = 5;
  std::size_t line_max = 0;
  std::string out;
};

void run_ksink(const KsinkArgs& a) {
  Output out(a.out);
  const auto b = ksink_bound(a.edges, a.k);
  CsvWriter csv(out.stream(), {"quantity", "k", "x", "value"});
  csv.row() << "exact_v1" << a.k << b.x.str() << b.exact.str();
  csv.row() << "envelope" << a.k << b.x.str() << b.envelope.str();
  csv.row() << "tcl_bound" << a.k << b.x.str() << b.tcl_bound.str();
  std::int64_t previous = 0;
  std::string violation;
  for (std::size_t k = 2; k <= a.line_max; ++k) {
    const auto c = line_sandpile_check(k);
    csv.row() << "line_sandpile_exact" << k << "2" << c.exact;
    csv.row() << "line_circuit_v1" << k << "2" << c.analytic.str();
    if (k >= 6 && previous > 0 && c.exact < 2 * previous && violation.empty())
      violation = "line sandpile growth ratio below 2 at k=" + std::to_string(k);
    previous = c.exact;
  }
  if (!violation.empty()) throw PropertyViolation{violation};
}

// ---------------------------------------------------------------------------
// counterexample-4x4

// The 4x4 stable configuration displayed for the last-toppler discussion.
constexpr std::int64_t kReferenceMatrix[4][4] = {{3, 3, 3, 0}, {3, 0, 3, 2}, {3, 3, 2, 3}, {0, 2, 3, 2}};

struct CounterexampleArgs {
  std::string out;
};

void run_counterexample(const CounterexampleArgs& a) {
  constexpr std::size_t n = 4;
  const Sandpile pile(grid(n));
  const VertexId v = grid_id(n, 1, 1), w = grid_id(n, n, n);
  const auto topup = heaviest_transient_topup(pile, v, w);
  Output out(a.out);
  auto& os = out.stream();
  os << "particles added at (1,1) before (4,4) topples: " << topup.particles << '\n';
  bool match = true;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const auto h = topup.single_site_stable.heights[pile.graph().ordinary_index(grid_id(n, i, j))];
      os << (j > 1 ? " " : "") << h;
      if (h != kReferenceMatrix[i - 1][j - 1]) match = false;
    }
    os << '\n';
  }
  os << "reference:\n";
  for (const auto& row : kReferenceMatrix) os << row[0] << ' ' << row[1] << ' ' << row[2] << ' ' << row[3] << '\n';
  os << (match ? "PASS" : "FAIL") << '\n';
  if (!match) throw PropertyViolation{"stable configuration differs from the reference matrix"};
}

// ---------------------------------------------------------------------------
// property-suite

struct PropertyArgs {
  std::uint64_t seed = 1;
  std::size_t count = 50;
  std::string out;
};

void run_property_suite(const PropertyArgs& a) {
  Rng rng(a.seed);
  Output out(a.out);
  CsvWriter csv(out.stream(), {"check", "instances", "violations"});
  std::size_t sandwich = 0, sandwich_bad = 0, abelian = 0, abelian_bad = 0, oracle = 0, oracle_bad = 0;
  std::optional<Json> first_bad;
  auto record = [&](const SandpileGraph& g, const std::string& what) {
    if (first_bad) return;
    first_bad = Json::object();
    (*first_bad)["graph"] = graph_to_json(g);
    (*first_bad)["violation"] = what;
  };
  for (std::size_t t = 0; t < a.count; ++t) {
    const auto g = random_sandpile(rng);
    const Sandpile pile(g);
    if (ordinary_connected(g)) {
      const GroundedSolver solver(g);
      for (VertexId v : g.boundary_vertices()) {
        const auto row = sandpile_impedances_from(pile, v);
        for (VertexId w : g.boundary_vertices()) {
          const auto pot = solve_potential(solver, w);
          const double lower = impedance_lower_bound(g, pot, v), upper = impedance_upper_bound(g, pot, v);
          const double exact = static_cast<double>(row[w].value);
          ++sandwich;
          if (exact < lower - kInequalitySlack || exact > upper + kInequalitySlack) {
            ++sandwich_bad;
            record(g, "sandwich v=" + std::to_string(v) + " w=" + std::to_string(w));
          }
        }
      }
    }
    const auto heights = random_heights(rng, g, 12);
    const Configuration c{heights};
    const auto fifo = pile.stabilize(c, OrderPolicy::fifo());
    const auto random = pile.stabilize(c, OrderPolicy::random(rng()));
    ++abelian;
    if (fifo.stable != random.stable || !(fifo.score == random.score)) {
      ++abelian_bad;
      record(g, "abelian invariance");
    }
    const Configuration s{random_stable_heights(rng, g)};
    ++oracle;
    if (is_recurrent_burning(pile, s) != is_recurrent_sink_firing(pile, s)) {
      ++oracle_bad;
      record(g, "burning and sink-firing disagree");
    }
  }
  csv.row() << "bound_sandwich" << sandwich << sandwich_bad;
  csv.row() << "abelian_invariance" << abelian << abelian_bad;
  csv.row() << "recurrence_oracles" << oracle << oracle_bad;
  if (first_bad) throw PropertyViolation{first_bad->dump()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Abelian sandpile experiments"};
  app.require_subcommand(1);

  SimulateArgs simulate;
  auto* c_sim = app.add_subcommand("simulate", "stabilize a configuration");
  c_sim->add_option("--graph", simulate.graph, "grid:N, triangular:N, honeycomb:N, line:K, random:SEED or a file");
  c_sim->add_option("--add", simulate.add, "v=<vertex>:k=<count>, repeatable");
  c_sim->add_option("--policy", simulate.policy, "fifo or random");
  c_sim->add_option("--seed", simulate.seed);
  c_sim->add_option("--out", simulate.out);

  ImpedanceArgs impedance;
  auto* c_imp = app.add_subcommand("impedance", "exact sandpile impedance by simulation");
  c_imp->add_option("--graph", impedance.graph);
  c_imp->add_option("--v", impedance.v)->required();
  c_imp->add_option("--w", impedance.w);
  c_imp->add_flag("--cross-check", impedance.cross_check, "also run the one-shot doubling oracle");
  c_imp->add_option("--out", impedance.out);

  RecurrentArgs recurrent;
  auto* c_rec = app.add_subcommand("recurrent", "recurrence tests");
  c_rec->add_option("--graph", recurrent.graph);
  c_rec->add_option("--config", recurrent.config, "comma-separated heights in ordinary order");
  c_rec->add_flag("--exhaustive", recurrent.exhaustive, "compare all three tests on every stable configuration");
  c_rec->add_option("--out", recurrent.out);

  PotentialArgs potential;
  auto* c_pot = app.add_subcommand("potential", "harmonic potential with unit value at a source");
  c_pot->add_option("--graph", potential.graph);
  c_pot->add_option("--source", potential.source)->required();
  c_pot->add_option("--out", potential.out);

  BoundsArgs bounds;
  auto* c_bnd = app.add_subcommand("bounds", "impedance bounds with dual certificates");
  c_bnd->add_option("--graph", bounds.graph);
  c_bnd->add_option("--v", bounds.v);
  c_bnd->add_option("--w", bounds.w);
  c_bnd->add_flag("!--no-simulate", bounds.simulate, "skip the exact simulation");
  c_bnd->add_option("--out", bounds.out);

  TclArgs tcl;
  auto* c_tcl = app.add_subcommand("tcl-estimate", "solve-based transience class estimate");
  c_tcl->add_option("--graph", tcl.graph);
  c_tcl->add_flag("--all-pairs", tcl.all_pairs);
  c_tcl->add_option("--out", tcl.out);

  GridSweepArgs sweep;
  auto* c_sweep = app.add_subcommand("grid-sweep", "grid estimates, probes and growth fits");
  c_sweep->add_option("--sizes", sweep.sizes)->delimiter(',');
  c_sweep->add_option("--simulate-max", sweep.simulate_max);
  c_sweep->add_option("--out", sweep.out);

  SpectralArgs spectral;
  auto* c_spec = app.add_subcommand("spectral-grid", "corner-to-corner spectral sum against the dual computation");
  c_spec->add_option("--sizes", spectral.sizes)->delimiter(',');
  c_spec->add_option("--out", spectral.out);

  DualArgs dual;
  auto* c_dual = app.add_subcommand("dual", "planar dual of an embedded graph");
  c_dual->add_option("--graph", dual.graph);
  c_dual->add_option("--out", dual.out);

  EigenCurrentArgs eigen;
  auto* c_eig = app.add_subcommand("eigen-current", "restricted-dual currents, spectral against direct");
  c_eig->add_option("--graph", eigen.graph);
  c_eig->add_option("--power", eigen.power, "power edge id (a sink edge)");
  c_eig->add_option("--tolerance", eigen.tolerance);
  c_eig->add_option("--out", eigen.out);

  ReduceArgs reduce;
  auto* c_red = app.add_subcommand("reduce", "network reductions");
  c_red->add_option("--graph", reduce.graph);
  c_red->add_option("--mode", reduce.mode, "honeycomb, star or path");
  c_red->add_option("--center", reduce.center);
  c_red->add_option("--vi", reduce.vi);
  c_red->add_option("--vj", reduce.vj);
  c_red->add_option("--out", reduce.out);

  KsinkArgs ksink;
  auto* c_ks = app.add_subcommand("ksink", "line-circuit bound for k sink connections");
  c_ks->add_option("--edges", ksink.edges);
  c_ks->add_option("--k", ksink.k);
  c_ks->add_option("--line-max", ksink.line_max, "also simulate line sandpiles up to this length");
  c_ks->add_option("--out", ksink.out);

  CounterexampleArgs counter;
  auto* c_ce = app.add_subcommand("counterexample-4x4", "heaviest transient configuration on GRID_4");
  c_ce->add_option("--out", counter.out);

  PropertyArgs props;
  auto* c_prop = app.add_subcommand("property-suite", "randomized property checks");
  c_prop->add_option("--seed", props.seed);
  c_prop->add_option("--count", props.count);
  c_prop->add_option("--out", props.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*c_sim) run_simulate(simulate);
    else if (*c_imp) run_impedance(impedance);
    else if (*c_rec) run_recurrent(recurrent);
    else if (*c_pot) run_potential(potential);
    else if (*c_bnd) run_bounds(bounds);
    else if (*c_tcl) run_tcl(tcl);
    else if (*c_sweep) run_grid_sweep(sweep);
    else if (*c_spec) run_spectral(spectral);
    else if (*c_dual) run_dual(dual);
    else if (*c_eig) run_eigen_current(eigen);
    else if (*c_red) run_reduce(reduce);
    else if (*c_ks) run_ksink(ksink);
    else if (*c_ce) run_counterexample(counter);
    else if (*c_prop) run_property_suite(props);
  } catch (const PropertyViolation& v) {
    std::cerr << "violation: " << v.detail << '\n';
    return kExitViolation;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool property = e.code() == ErrorCode::AssertionFailure || e.code() == ErrorCode::InfeasibleCertificate;
    return property ? kExitViolation : kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitOk;
}
