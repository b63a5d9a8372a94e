#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/netlist.hpp"

namespace gsplace {

inline double overlap_1d(double a0, double a1, double b0, double b1) noexcept {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

/// Weighted half-perimeter wirelength over absolute pin coordinates.
inline double hpwl(const Netlist& nl, const std::vector<Point>& lower_left) {
  double total = 0.0;
  for (const Net& net : nl.nets()) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const Pin& pin : net.pins) {
      if (pin.instance >= lower_left.size())
        throw NetlistError("net '" + net.name + "': pin on instance " +
                           std::to_string(pin.instance) + " has no position");
      const double x = lower_left[pin.instance].x + pin.dx;
      const double y = lower_left[pin.instance].y + pin.dy;
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
    total += net.weight * ((xhi - xlo) + (yhi - ylo));
  }
  return total;
}

/// Per-bin occupancy (occupied area / bin area).
struct DensityGrid {
  BinGrid grid;
  std::vector<double> rho;

  DensityGrid() = default;
  explicit DensityGrid(BinGrid g) : grid(g), rho(g.size(), 0.0) {}

  double& at(int ix, int iy) { return rho[grid.index(ix, iy)]; }
  double at(int ix, int iy) const { return rho[grid.index(ix, iy)]; }

  double total_area() const {
    double s = 0.0;
    for (double r : rho) s += r;
    return s * grid.bin_area();
  }
};

/// Adds `scale` times the exact rectangle/bin intersection of [x0,x1]x[y0,y1]
/// (clipped to the region) to the grid.
inline void accumulate_rect(DensityGrid& dg, double x0, double y0, double x1, double y1,
                            double scale = 1.0) {
  const BinGrid& g = dg.grid;
  const Region& r = g.region;
  x0 = std::max(x0, r.xmin);
  y0 = std::max(y0, r.ymin);
  x1 = std::min(x1, r.xmax);
  y1 = std::min(y1, r.ymax);
  if (!(x1 > x0) || !(y1 > y0)) return;
  const double bw = g.bin_w(), bh = g.bin_h(), inv_area = scale / g.bin_area();
  const int ix0 = g.col_of(x0), ix1 = g.col_of(std::nextafter(x1, x0));
  const int iy0 = g.row_of(y0), iy1 = g.row_of(std::nextafter(y1, y0));
  for (int iy = iy0; iy <= iy1; ++iy) {
    const double by0 = r.ymin + iy * bh;
    const double oy = overlap_1d(y0, y1, by0, by0 + bh);
    if (oy <= 0.0) continue;
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double bx0 = r.xmin + ix * bw;
      const double ox = overlap_1d(x0, x1, bx0, bx0 + bw);
      if (ox > 0.0) dg.at(ix, iy) += ox * oy * inv_area;
    }
  }
}

enum class DensitySelection { kAll, kMovable, kFixed };

/// Exact-intersection bin occupancy of the selected instances.
inline DensityGrid bin_density(const Netlist& nl, const std::vector<Point>& lower_left,
                               const BinGrid& grid,
                               DensitySelection sel = DensitySelection::kAll) {
  DensityGrid dg(grid);
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    if (sel == DensitySelection::kMovable && inst.fixed()) continue;
    if (sel == DensitySelection::kFixed && !inst.fixed()) continue;
    const Point p = lower_left[i];
    accumulate_rect(dg, p.x, p.y, p.x + inst.width, p.y + inst.height);
  }
  return dg;
}

/// Sum of per-bin excess over the target, normalized by `movable_area`.
inline double density_overflow(const DensityGrid& dg, double target_density, double movable_area) {
  if (!(target_density > 0.0) || target_density > 1.0)
    throw ConfigError("target density must lie in (0, 1]");
  if (!(movable_area > 0.0)) return 0.0;
  double excess = 0.0;
  for (double r : dg.rho) excess += std::max(0.0, r - target_density);
  return excess * dg.grid.bin_area() / movable_area;
}

/// Overflow of a placement: movable occupancy plus fixed occupancy scaled by the
/// target density, so a fully blocked bin sits exactly at target.
inline double placement_overflow(const Netlist& nl, const std::vector<Point>& lower_left,
                                 const BinGrid& grid, double target_density) {
  DensityGrid dg = bin_density(nl, lower_left, grid, DensitySelection::kMovable);
  const DensityGrid fixed = bin_density(nl, lower_left, grid, DensitySelection::kFixed);
  for (std::size_t b = 0; b < dg.rho.size(); ++b)
    dg.rho[b] += target_density * std::min(1.0, fixed.rho[b]);
  return density_overflow(dg, target_density, nl.movable_area());
}

}  // namespace gsplace
