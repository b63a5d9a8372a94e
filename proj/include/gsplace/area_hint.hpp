#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "gsplace/gsp_init.hpp"
#include "gsplace/metrics.hpp"
#include "gsplace/netlist.hpp"
#include "gsplace/signed_graph.hpp"

namespace gsplace {

/// Which movables receive a repulsive edge from a fixed macro.
enum class MacroCandidatePolicy {
  kCenterInside,  ///< instance center lies in the closed footprint
  kOverlap,       ///< instance rectangle overlaps the footprint
};

struct HintConfig {
  int iterations = 3;
  double relaxation = 0.5;
  int bins_x = 32;
  int bins_y = 32;
  double detection_ratio = 0.1;
  double capacity = 0.9;
  double mu = 4.0;
  int power = 2;
  MacroCandidatePolicy candidates = MacroCandidatePolicy::kCenterInside;
  int max_net_degree = kDefaultMaxNetDegree;

  void validate() const {
    if (iterations < 0) throw ConfigError("refine_iteration must be >= 0");
    if (relaxation < 0.0 || relaxation > 1.0) throw ConfigError("relaxation must lie in [0, 1]");
    if (bins_x < 1 || bins_y < 1) throw ConfigError("refine_num_bin_xy must be >= 1");
    if (!(detection_ratio > 0.0) || detection_ratio > 1.0)
      throw ConfigError("detection_ratio must lie in (0, 1]");
    if (!(capacity > 0.0)) throw ConfigError("bin_capacity must be > 0");
    if (!(mu > 0.0)) throw ConfigError("logistic slope mu must be > 0");
    if (power < 1) throw ConfigError("refinement filter power must be >= 1");
  }

  int window_x() const { return std::max(1, static_cast<int>(std::floor(detection_ratio * bins_x))); }
  int window_y() const { return std::max(1, static_cast<int>(std::floor(detection_ratio * bins_y))); }
};

enum class NodeOrigin { kInstance, kMacroPin, kMacroVirtual, kBinVirtual };

struct HintNode {
  NodeOrigin origin = NodeOrigin::kInstance;
  std::size_t ref = 0;  ///< instance id, or bin index for bin nodes
  Point site;           ///< pinned coordinate for non-instance nodes
};

/// Fixed pin-site nodes replacing fixed macros in the graph.
struct PinExpansion {
  std::vector<HintNode> nodes;                      ///< appended after the instance nodes
  std::vector<std::vector<std::size_t>> pin_node;   ///< [net][pin] -> graph node
};

/// One fixed node per distinct pin site of every fixed macro; pins of other
/// instances keep mapping to their instance node. Pinless macros keep their
/// single center node.
inline PinExpansion expand_macro_pins(const Netlist& nl) {
  PinExpansion ex;
  const std::size_t n = nl.size();
  std::map<std::pair<std::size_t, std::pair<double, double>>, std::size_t> site_node;
  ex.pin_node.resize(nl.nets().size());
  for (std::size_t e = 0; e < nl.nets().size(); ++e) {
    const Net& net = nl.nets()[e];
    ex.pin_node[e].resize(net.pins.size());
    for (std::size_t a = 0; a < net.pins.size(); ++a) {
      const Pin& pin = net.pins[a];
      const Instance& inst = nl.instance(pin.instance);
      if (inst.kind != InstanceKind::kFixedMacro) {
        ex.pin_node[e][a] = pin.instance;
        continue;
      }
      const auto key = std::make_pair(pin.instance, std::make_pair(pin.dx, pin.dy));
      auto it = site_node.find(key);
      if (it == site_node.end()) {
        const std::size_t id = n + ex.nodes.size();
        ex.nodes.push_back({NodeOrigin::kMacroPin, pin.instance,
                            {inst.position.x + pin.dx, inst.position.y + pin.dy}});
        it = site_node.emplace(key, id).first;
      }
      ex.pin_node[e][a] = it->second;
    }
  }
  return ex;
}

/// Mean |w| of the instance-graph edges incident to each node (0 when isolated).
inline std::vector<double> base_weights(const SignedGraph& instance_graph) {
  std::vector<double> bw(instance_graph.node_count(), 0.0);
  for (std::size_t i = 0; i < bw.size(); ++i) {
    const std::size_t deg = instance_graph.row_end(i) - instance_graph.row_begin(i);
    if (deg == 0) continue;
    double s = 0.0;
    for (std::size_t p = instance_graph.row_begin(i); p < instance_graph.row_end(i); ++p)
      s += std::abs(instance_graph.weight(p));
    bw[i] = s / static_cast<double>(deg);
  }
  return bw;
}

/// Axis-normalized distance ratio of `p` to a box centered at `c`.
inline double max_ratio(Point p, Point c, double half_w, double half_h) {
  return std::max(std::abs(p.x - c.x) / half_w, std::abs(p.y - c.y) / half_h);
}

/// Negative edges from every candidate movable to the macro's virtual node.
inline std::vector<WeightedEdge> macro_repulsion_edges(const Netlist& nl, std::size_t macro,
                                                       std::size_t virtual_node,
                                                       const GraphSignal& centers,
                                                       const std::vector<double>& base_weight,
                                                       MacroCandidatePolicy policy =
                                                           MacroCandidatePolicy::kCenterInside) {
  const Instance& m = nl.instance(macro);
  if (!(m.width > 0.0) || !(m.height > 0.0))
    throw ConfigError("macro '" + m.name + "' has zero size");
  const Point mc = center_of(m, m.position);
  const double hw = 0.5 * m.width, hh = 0.5 * m.height;
  std::vector<WeightedEdge> out;
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    if (inst.fixed() || base_weight[i] <= 0.0) continue;
    const Point p{centers.x[i], centers.y[i]};
    const double dx = std::abs(p.x - mc.x), dy = std::abs(p.y - mc.y);
    const bool candidate = policy == MacroCandidatePolicy::kCenterInside
                               ? (dx <= hw && dy <= hh)
                               : (dx < hw + 0.5 * inst.width && dy < hh + 0.5 * inst.height);
    if (!candidate) continue;
    const double w = -std::exp(-max_ratio(p, mc, hw, hh)) * base_weight[i];
    out.push_back({i, virtual_node, w});
  }
  return out;
}

/// φ_b = 2·sigmoid(μ(D_b − C)) − 1, written as tanh(μ(D_b − C)/2).
inline double bin_sign_strength(double density, double capacity, double mu) {
  return std::tanh(0.5 * mu * (density - capacity));
}

struct BinEdges {
  std::vector<HintNode> nodes;     ///< one per bin that emits edges
  std::vector<WeightedEdge> edges;
  std::vector<double> phi;         ///< per bin
};

/// Density-signed edges between each bin's virtual node and the movables inside
/// its detection window. Bins with φ_b = 0 emit nothing.
inline BinEdges bin_virtual_edges(const Netlist& nl, const DensityGrid& density,
                                  const GraphSignal& centers, const HintConfig& cfg,
                                  const std::vector<double>& base_weight,
                                  std::size_t first_node) {
  const BinGrid& g = density.grid;
  BinEdges out;
  out.phi.resize(g.size());
  std::vector<std::vector<std::size_t>> bucket(g.size());
  for (std::size_t i = 0; i < nl.size(); ++i) {
    if (nl.instance(i).fixed() || base_weight[i] <= 0.0) continue;
    bucket[g.index(g.col_of(centers.x[i]), g.row_of(centers.y[i]))].push_back(i);
  }
  const int nxw = cfg.window_x(), nyw = cfg.window_y();
  const double hw = 0.5 * g.bin_w(), hh = 0.5 * g.bin_h();
  for (int by = 0; by < g.ny; ++by)
    for (int bx = 0; bx < g.nx; ++bx) {
      const std::size_t b = g.index(bx, by);
      const double phi = bin_sign_strength(density.rho[b], cfg.capacity, cfg.mu);
      out.phi[b] = phi;
      if (phi == 0.0) continue;
      const Point bc = g.bin_center(bx, by);
      const std::size_t node = first_node + out.nodes.size();
      bool used = false;
      const int x0 = bx - (nxw - 1) / 2, y0 = by - (nyw - 1) / 2;
      for (int wy = std::max(0, y0); wy < std::min(g.ny, y0 + nyw); ++wy)
        for (int wx = std::max(0, x0); wx < std::min(g.nx, x0 + nxw); ++wx)
          for (std::size_t i : bucket[g.index(wx, wy)]) {
            const double w =
                -std::exp(-max_ratio({centers.x[i], centers.y[i]}, bc, hw, hh)) * phi *
                base_weight[i];
            if (w == 0.0) continue;
            out.edges.push_back({i, node, w});
            used = true;
          }
      if (used) out.nodes.push_back({NodeOrigin::kBinVirtual, b, bc});
    }
  return out;
}

struct HintGraph {
  SignedGraph graph;
  std::vector<HintNode> nodes;  ///< provenance, one per graph node
  std::size_t instance_count = 0;
  std::size_t macro_edge_count = 0;
  std::size_t bin_edge_count = 0;
  std::vector<double> phi;

  /// Instance rows from `centers`, pinned sites for every other node.
  GraphSignal lift(const GraphSignal& centers) const {
    GraphSignal s(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const bool inst = nodes[i].origin == NodeOrigin::kInstance;
      s.x[i] = inst ? centers.x[i] : nodes[i].site.x;
      s.y[i] = inst ? centers.y[i] : nodes[i].site.y;
    }
    return s;
  }
};

struct HintLaplacian {
  HintGraph hint;
  SparseMatrix laplacian;
};

/// Signed hint graph at the current signal and its Laplacian L = D − A.
inline HintLaplacian build_hint_laplacian(const Netlist& nl, const GraphSignal& centers,
                                          const HintConfig& cfg,
                                          const std::vector<double>& base_weight) {
  cfg.validate();
  HintGraph hg;
  hg.instance_count = nl.size();
  hg.nodes.resize(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) hg.nodes[i] = {NodeOrigin::kInstance, i, {}};

  const PinExpansion ex = expand_macro_pins(nl);
  hg.nodes.insert(hg.nodes.end(), ex.nodes.begin(), ex.nodes.end());
  std::vector<WeightedEdge> edges = clique_pairs(
      nl, cfg.max_net_degree, [&](std::size_t e, std::size_t a) { return ex.pin_node[e][a]; });

  for (std::size_t m = 0; m < nl.size(); ++m) {
    if (nl.instance(m).kind != InstanceKind::kFixedMacro) continue;
    const std::size_t v = hg.nodes.size();
    auto me = macro_repulsion_edges(nl, m, v, centers, base_weight, cfg.candidates);
    if (me.empty()) continue;
    const Instance& mi = nl.instance(m);
    hg.nodes.push_back({NodeOrigin::kMacroVirtual, m, center_of(mi, mi.position)});
    hg.macro_edge_count += me.size();
    edges.insert(edges.end(), me.begin(), me.end());
  }

  const BinGrid grid(nl.region(), cfg.bins_x, cfg.bins_y);
  const DensityGrid density = bin_density(nl, positions_from_signal(nl, centers), grid);
  BinEdges be = bin_virtual_edges(nl, density, centers, cfg, base_weight, hg.nodes.size());
  hg.nodes.insert(hg.nodes.end(), be.nodes.begin(), be.nodes.end());
  hg.bin_edge_count = be.edges.size();
  hg.phi = std::move(be.phi);
  edges.insert(edges.end(), be.edges.begin(), be.edges.end());

  std::vector<std::uint8_t> fixed(hg.nodes.size(), 1), virt(hg.nodes.size(), 1);
  for (std::size_t i = 0; i < nl.size(); ++i) {
    fixed[i] = nl.instance(i).fixed() ? 1 : 0;
    virt[i] = 0;
  }
  for (std::size_t i = nl.size(); i < hg.nodes.size(); ++i)
    virt[i] = hg.nodes[i].origin == NodeOrigin::kMacroPin ? 0 : 1;
  hg.graph = SignedGraph(hg.nodes.size(), std::move(edges), std::move(fixed), std::move(virt));
  SparseMatrix L = signed_laplacian(hg.graph);
  return {std::move(hg), std::move(L)};
}

inline HintLaplacian build_hint_laplacian(const Netlist& nl, const GraphSignal& centers,
                                          const HintConfig& cfg) {
  return build_hint_laplacian(
      nl, centers, cfg, base_weights(build_instance_graph(nl, NetModel::kClique, cfg.max_net_degree)));
}

/// k successive applications of (I − L/λ_up), λ_up the Gershgorin bound.
inline GraphSignal apply_refinement_filter(const SparseMatrix& L, int power, const GraphSignal& s) {
  const double up = gershgorin_upper(L);
  if (!(up > 0.0)) return s;
  GraphSignal out = s;
  std::vector<double> Lg;
  for (int c = 0; c < 2; ++c) {
    auto& ch = out.channel(c);
    for (int it = 0; it < power; ++it) {
      L.multiply(ch, Lg);
      for (std::size_t i = 0; i < ch.size(); ++i) ch[i] -= Lg[i] / up;
    }
  }
  return out;
}

struct RefineIterationStats {
  std::size_t nodes = 0;
  std::size_t macro_edges = 0;
  std::size_t bin_edges = 0;
  double lambda_up = 0.0;
};

struct RefineResult {
  GraphSignal signal;            ///< instance centers
  std::vector<Point> positions;  ///< lower-left
  std::vector<RefineIterationStats> iterations;
};

/// Relaxed fixed-point iteration: build hints, filter, blend, re-pin, clamp.
inline RefineResult refine(const GraphSignal& initial, const Netlist& nl, const HintConfig& cfg) {
  cfg.validate();
  RefineResult res;
  res.signal = initial;
  const std::vector<double> bw =
      base_weights(build_instance_graph(nl, NetModel::kClique, cfg.max_net_degree));
  const double gamma = cfg.relaxation;
  for (int k = 0; k < cfg.iterations && gamma > 0.0; ++k) {
    const HintLaplacian hl = build_hint_laplacian(nl, res.signal, cfg, bw);
    const GraphSignal lifted = hl.hint.lift(res.signal);
    const GraphSignal filtered = apply_refinement_filter(hl.laplacian, cfg.power, lifted);
    for (std::size_t i = 0; i < nl.size(); ++i) {
      res.signal.x[i] = (1.0 - gamma) * res.signal.x[i] + gamma * filtered.x[i];
      res.signal.y[i] = (1.0 - gamma) * res.signal.y[i] + gamma * filtered.y[i];
    }
    repin_fixed(nl, res.signal);
    res.signal = signal_from_positions(nl, positions_from_signal(nl, res.signal));
    res.iterations.push_back({hl.hint.graph.node_count(), hl.hint.macro_edge_count,
                              hl.hint.bin_edge_count, gershgorin_upper(hl.laplacian)});
  }
  res.positions = positions_from_signal(nl, res.signal);
  return res;
}

}  // namespace gsplace
