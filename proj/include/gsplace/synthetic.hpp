#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/netlist.hpp"
#include "gsplace/random.hpp"

namespace gsplace {

/// Netlist plus the positions it was loaded or generated with.
struct DesignBundle {
  Netlist netlist;
  std::vector<Point> positions;
  std::string source;
};

/// Deterministic macro-heavy mixed-size design description.
struct SyntheticSpec {
  int cells = 500;
  int macros = 4;
  /// Boundary I/O pins; negative selects max(4, cells/50) when cells > 0.
  int io_pins = -1;
  /// Macro side range as a fraction of the region side.
  double macro_size_min = 0.08;
  double macro_size_max = 0.18;
  /// Mean net degree; degree = 2 + geometric.
  double mean_degree = 3.0;
  /// Probability that a net draws its pins from one cluster.
  double clustering = 0.8;
  int cells_per_cluster = 40;
  double nets_per_cell = 1.0;
  /// Region side; 0 derives it from `utilization` of the non-macro area.
  double region_width = 0.0;
  double region_height = 0.0;
  double utilization = 0.5;
  /// Macro jitter within its grid slot, as a fraction of the slack.
  double macro_jitter = 0.5;
  double macro_net_fraction = 0.02;
  double io_net_fraction = 0.05;
  std::uint64_t seed = 1;

  void validate() const {
    if (cells < 0 || macros < 0) throw ConfigError("synthetic counts must be >= 0");
    if (!(macro_size_min > 0.0 && macro_size_min <= macro_size_max && macro_size_max < 1.0))
      throw ConfigError("macro size fractions must satisfy 0 < min <= max < 1");
    if (!(mean_degree >= 2.0)) throw ConfigError("mean net degree must be >= 2");
    if (clustering < 0.0 || clustering > 1.0) throw ConfigError("clustering must lie in [0, 1]");
    if (!(utilization > 0.0 && utilization < 1.0)) throw ConfigError("utilization must lie in (0, 1)");
    if (region_width < 0.0 || region_height < 0.0) throw ConfigError("region dims must be >= 0");
  }
};

inline constexpr double kSyntheticRowHeight = 1.0;
inline constexpr int kMacroPinSites = 8;

/// Generates a design; identical spec (including seed) gives an identical design.
inline DesignBundle generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  // Cell sizes first: they fix the region when it is derived.
  std::vector<double> cell_w(spec.cells);
  double cell_area = 0.0;
  for (auto& w : cell_w) {
    w = static_cast<double>(1 + rng.index(4));
    cell_area += w * kSyntheticRowHeight;
  }
  std::vector<std::pair<double, double>> macro_frac(spec.macros);
  double macro_frac_area = 0.0;
  for (auto& f : macro_frac) {
    f.first = rng.uniform(spec.macro_size_min, spec.macro_size_max);
    f.second = rng.uniform(spec.macro_size_min, spec.macro_size_max);
    macro_frac_area += f.first * f.second;
  }
  if (macro_frac_area >= 1.0) throw ConfigError("infeasible synthetic spec: macros exceed the region");

  double W = spec.region_width, H = spec.region_height;
  if (W <= 0.0 || H <= 0.0) {
    const double side = std::sqrt(std::max(cell_area, 16.0) / (spec.utilization * (1.0 - macro_frac_area)));
    W = W > 0.0 ? W : std::ceil(side);
    H = H > 0.0 ? H : std::ceil(side);
  }
  const Region region{0.0, 0.0, W, H};

  std::vector<Instance> inst;
  inst.reserve(spec.cells + spec.macros + std::max(spec.io_pins, 0) + 64);
  for (int i = 0; i < spec.cells; ++i)
    inst.push_back({"c" + std::to_string(i), cell_w[i], kSyntheticRowHeight, InstanceKind::kMovableCell,
                    {region.center().x - 0.5 * cell_w[i], region.center().y - 0.5 * kSyntheticRowHeight}});

  // Macros on a jittered grid.
  const int gcols = spec.macros > 0 ? static_cast<int>(std::ceil(std::sqrt(spec.macros))) : 1;
  const int grows = spec.macros > 0 ? (spec.macros + gcols - 1) / gcols : 1;
  const double slot_w = W / gcols, slot_h = H / grows;
  std::vector<std::size_t> macro_ids;
  for (int m = 0; m < spec.macros; ++m) {
    const double mw = std::min(macro_frac[m].first * W, 0.95 * slot_w);
    const double mh = std::min(macro_frac[m].second * H, 0.95 * slot_h);
    const int col = m % gcols, row = m / gcols;
    const double jx = spec.macro_jitter * 0.5 * (slot_w - mw) * (2.0 * rng.uniform() - 1.0);
    const double jy = spec.macro_jitter * 0.5 * (slot_h - mh) * (2.0 * rng.uniform() - 1.0);
    const double cx = (col + 0.5) * slot_w + jx, cy = (row + 0.5) * slot_h + jy;
    macro_ids.push_back(inst.size());
    inst.push_back({"m" + std::to_string(m), mw, mh, InstanceKind::kFixedMacro,
                    {cx - 0.5 * mw, cy - 0.5 * mh}});
  }

  const int io = spec.io_pins >= 0 ? spec.io_pins : (spec.cells > 0 ? std::max(4, spec.cells / 50) : 0);
  std::vector<std::size_t> io_ids;
  for (int p = 0; p < io; ++p) {
    // Evenly around the perimeter, counter-clockwise from the lower-left corner.
    const double perim = 2.0 * (W + H);
    double s = (p + 0.5) * perim / io;
    Point pos;
    if (s < W) pos = {s, 0.0};
    else if ((s -= W) < H) pos = {W, s};
    else if ((s -= H) < W) pos = {W - s, H};
    else pos = {0.0, H - (s - W)};
    io_ids.push_back(inst.size());
    inst.push_back({"p" + std::to_string(p), 0.0, 0.0, InstanceKind::kIoPin, pos});
  }

  // Nets.
  std::vector<Net> nets;
  if (spec.cells > 0) {
    const int clusters = std::max(1, spec.cells / std::max(1, spec.cells_per_cluster));
    std::vector<std::vector<std::size_t>> members(clusters);
    std::vector<int> cluster_of(spec.cells);
    for (int c = 0; c < spec.cells; ++c) {
      cluster_of[c] = static_cast<int>(rng.index(clusters));
      members[cluster_of[c]].push_back(c);
    }
    const double p_geo = 1.0 / (spec.mean_degree - 1.0);
    const int n_nets = static_cast<int>(std::lround(spec.cells * spec.nets_per_cell));
    const std::size_t max_deg = 64;
    for (int e = 0; e < n_nets; ++e) {
      const std::size_t driver = static_cast<std::size_t>(e % spec.cells);
      const std::size_t degree = std::min<std::size_t>(2 + rng.geometric(p_geo), max_deg);
      const bool local = rng.uniform() < spec.clustering;
      const auto& pool = members[cluster_of[driver]];
      Net net;
      net.name = "n" + std::to_string(e);
      std::vector<std::size_t> chosen{driver};
      for (std::size_t k = 1; k < degree; ++k) {
        std::size_t pick = driver;
        for (int attempt = 0; attempt < 8 && std::find(chosen.begin(), chosen.end(), pick) != chosen.end();
             ++attempt)
          pick = local ? pool[rng.index(pool.size())] : rng.index(spec.cells);
        chosen.push_back(pick);
      }
      for (std::size_t c : chosen) net.pins.push_back({c, 0.5 * cell_w[c], 0.5 * kSyntheticRowHeight});
      if (!macro_ids.empty() && rng.uniform() < spec.macro_net_fraction * macro_ids.size()) {
        const std::size_t m = macro_ids[rng.index(macro_ids.size())];
        const int site = static_cast<int>(rng.index(kMacroPinSites));
        const double mw = inst[m].width, mh = inst[m].height;
        // Two sites per macro edge, at quarter points.
        const double q = (site % 2 == 0) ? 0.25 : 0.75;
        Point off;
        switch (site / 2) {
          case 0: off = {q * mw, 0.0}; break;
          case 1: off = {mw, q * mh}; break;
          case 2: off = {q * mw, mh}; break;
          default: off = {0.0, q * mh}; break;
        }
        net.pins.back() = {m, off.x, off.y};
      } else if (!io_ids.empty() && rng.uniform() < spec.io_net_fraction) {
        net.pins.back() = {io_ids[rng.index(io_ids.size())], 0.0, 0.0};
      }
      nets.push_back(std::move(net));
    }
  }

  DesignBundle b{Netlist(std::move(inst), std::move(nets), region), {}, {}};
  b.positions = b.netlist.initial_positions();
  b.source = "synthetic:cells=" + std::to_string(spec.cells) + ",macros=" + std::to_string(spec.macros) +
             ",seed=" + std::to_string(spec.seed);
  return b;
}

}  // namespace gsplace
