#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsplace/netlist.hpp"
#include "gsplace/random.hpp"
#include "gsplace/signed_graph.hpp"

namespace gsplace {

enum class RescaleMode { kBboxAffine, kNone };

struct InitConfig {
  BandFilterSpec filter;
  std::uint64_t seed = 1;
  /// Side fraction of the centered sampling window.
  double window = 1.0;
  RescaleMode rescale = RescaleMode::kBboxAffine;
  int max_net_degree = kDefaultMaxNetDegree;

  void validate() const {
    if (!(window > 0.0) || window > 1.0) throw ConfigError("sampling window must lie in (0, 1]");
    filter.validate();
  }
};

struct InitResult {
  std::vector<Point> positions;  ///< lower-left, every instance
  GraphSignal sample;            ///< step-1 signal (centers)
  GraphSignal filtered;          ///< after filtering and re-pinning, before rescale
  std::string warning;
};

inline Region sampling_window(const Region& r, double window) {
  const Point c = r.center();
  const double hw = 0.5 * window * r.width(), hh = 0.5 * window * r.height();
  return {c.x - hw, c.y - hh, c.x + hw, c.y + hh};
}

/// Movable centers i.i.d. uniform over the window; fixed rows at their centers.
inline GraphSignal random_signal(const Netlist& nl, std::uint64_t seed, double window) {
  const Region w = sampling_window(nl.region(), window);
  Rng rng(seed);
  GraphSignal s(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    if (inst.fixed()) {
      const Point c = center_of(inst, inst.position);
      s.x[i] = c.x;
      s.y[i] = c.y;
    } else {
      s.x[i] = rng.uniform(w.xmin, w.xmax);
      s.y[i] = rng.uniform(w.ymin, w.ymax);
    }
  }
  return s;
}

/// Overwrites fixed rows with the instances' pinned centers.
inline void repin_fixed(const Netlist& nl, GraphSignal& s) {
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    if (!inst.fixed()) continue;
    const Point c = center_of(inst, inst.position);
    s.x[i] = c.x;
    s.y[i] = c.y;
  }
}

/// Lower-left positions from a center signal: fixed instances keep their loaded
/// positions bit-exactly, movables are clamped into the region.
inline std::vector<Point> positions_from_signal(const Netlist& nl, const GraphSignal& s) {
  std::vector<Point> p(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    p[i] = inst.fixed() ? inst.position : lower_left_of(inst, {s.x[i], s.y[i]});
  }
  clamp_to_region(nl, p);
  return p;
}

inline GraphSignal signal_from_positions(const Netlist& nl, const std::vector<Point>& lower_left) {
  GraphSignal s(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Point c = center_of(nl.instance(i), lower_left[i]);
    s.x[i] = c.x;
    s.y[i] = c.y;
  }
  return s;
}

/// Filter an explicit sample, re-pin fixed rows, rescale movables.
inline InitResult gsp_initialize_from(const Netlist& nl, const InitConfig& cfg, GraphSignal sample) {
  cfg.validate();
  InitResult res;
  res.sample = std::move(sample);
  const SignedGraph g = build_instance_graph(nl, NetModel::kClique, cfg.max_net_degree);
  GraphSignal out = apply_band_filter(g, cfg.filter, res.sample);
  repin_fixed(nl, out);
  res.filtered = out;

  if (cfg.rescale == RescaleMode::kBboxAffine && nl.movable_count() > 0) {
    const Region w = sampling_window(nl.region(), cfg.window);
    for (int c = 0; c < 2; ++c) {
      auto& ch = out.channel(c);
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < nl.size(); ++i) {
        if (nl.instance(i).fixed()) continue;
        lo = std::min(lo, ch[i]);
        hi = std::max(hi, ch[i]);
      }
      const double wlo = c == 0 ? w.xmin : w.ymin, whi = c == 0 ? w.xmax : w.ymax;
      const double span = hi - lo;
      if (!(span > 1e-12 * std::max(1.0, whi - wlo))) {
        res.warning += std::string(res.warning.empty() ? "" : "; ") +
                       "degenerate movable extent along " + (c == 0 ? "x" : "y") +
                       ", rescale skipped";
        continue;
      }
      const double scale = (whi - wlo) / span;
      for (std::size_t i = 0; i < nl.size(); ++i)
        if (!nl.instance(i).fixed()) ch[i] = wlo + (ch[i] - lo) * scale;
    }
  }
  res.positions = positions_from_signal(nl, out);
  return res;
}

/// Sample, filter, re-pin, rescale.
inline InitResult gsp_initialize(const Netlist& nl, const InitConfig& cfg) {
  cfg.validate();
  return gsp_initialize_from(nl, cfg, random_signal(nl, cfg.seed, cfg.window));
}

}  // namespace gsplace
