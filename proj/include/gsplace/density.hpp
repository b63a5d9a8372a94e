#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "gsplace/macro_schedule.hpp"
#include "gsplace/metrics.hpp"
#include "gsplace/netlist.hpp"
#include "gsplace/poisson.hpp"

namespace gsplace {

/// Smoothed electrostatic density of a netlist on a bin grid.
///
/// Movable instances are spread with a box kernel: the instance rectangle
/// dilated to at least one bin per axis, carrying the instance area, with exact
/// (trapezoid) weights at partially covered bins. Fixed macros contribute their
/// scheduled charge scaled by the target density.
class DensityModel {
 public:
  DensityModel(const Netlist& nl, BinGrid grid, double target_density, ScheduleSpec schedule)
      : nl_(&nl), grid_(grid), target_(target_density), schedule_(schedule) {
    if (!(target_density > 0.0) || target_density > 1.0)
      throw ConfigError("target density must lie in (0, 1]");
    schedule_.validate();
    kw_.resize(nl.size());
    kh_.resize(nl.size());
    for (std::size_t i = 0; i < nl.size(); ++i) {
      const Instance& inst = nl.instance(i);
      kw_[i] = std::min(std::max(inst.width, grid_.bin_w()), grid_.region.width());
      kh_[i] = std::min(std::max(inst.height, grid_.bin_h()), grid_.region.height());
      if (inst.kind == InstanceKind::kFixedMacro && inst.area() > 0.0)
        macros_.push_back(MacroCharge::of(inst, i, target_));
    }
  }

  const BinGrid& grid() const noexcept { return grid_; }
  double target_density() const noexcept { return target_; }
  const ScheduleSpec& schedule() const noexcept { return schedule_; }
  double kernel_w(std::size_t i) const { return kw_[i]; }
  double kernel_h(std::size_t i) const { return kh_[i]; }

  /// Admissible center range of a movable so its kernel stays inside the region.
  Point clamp_center(std::size_t i, Point c) const {
    const Region& r = grid_.region;
    return {std::clamp(c.x, r.xmin + 0.5 * kw_[i], r.xmax - 0.5 * kw_[i]),
            std::clamp(c.y, r.ymin + 0.5 * kh_[i], r.ymax - 0.5 * kh_[i])};
  }

  /// Fixed-macro density at schedule iteration t (cached per iteration).
  const DensityGrid& fixed_density(int t) {
    const bool snapped = charge_state(t, schedule_).snapped;
    const int key = snapped ? -1 : t;
    if (!fixed_cache_ || fixed_key_ != key) {
      DensityGrid dg(grid_);
      for (const auto& m : macros_) macro_bin_contribution(m, t, schedule_, dg);
      fixed_cache_ = std::move(dg);
      fixed_key_ = key;
    }
    return *fixed_cache_;
  }

  /// Movable kernel density from instance centers.
  DensityGrid movable_density(const std::vector<Point>& centers) const {
    DensityGrid dg(grid_);
    for (std::size_t i = 0; i < nl_->size(); ++i) {
      const Instance& inst = nl_->instance(i);
      if (inst.fixed() || inst.area() <= 0.0) continue;
      const Point c = centers[i];
      accumulate_rect(dg, c.x - 0.5 * kw_[i], c.y - 0.5 * kh_[i], c.x + 0.5 * kw_[i],
                      c.y + 0.5 * kh_[i], inst.area() / (kw_[i] * kh_[i]));
    }
    return dg;
  }

  DensityGrid total_density(const std::vector<Point>& centers, int t) {
    DensityGrid dg = movable_density(centers);
    const DensityGrid& f = fixed_density(t);
    for (std::size_t b = 0; b < dg.rho.size(); ++b) dg.rho[b] += f.rho[b];
    return dg;
  }

  /// Electrostatic energy ½ Σ_b (ρ_b − mean) φ_b · binArea.
  double energy(const DensityGrid& dg, const PoissonSolution& sol) const {
    double mean = 0.0;
    for (double r : dg.rho) mean += r;
    mean /= static_cast<double>(dg.rho.size());
    double e = 0.0;
    for (std::size_t b = 0; b < dg.rho.size(); ++b) e += (dg.rho[b] - mean) * sol.phi[b];
    return 0.5 * e * grid_.bin_area();
  }

  /// Exact gradient of the energy w.r.t. each movable center: the kernel
  /// average of ∇φ scaled by the instance area.
  std::vector<Point> gradient(const std::vector<Point>& centers, const PoissonSolution& sol) const {
    std::vector<Point> g(nl_->size());
    const Region& r = grid_.region;
    const double bw = grid_.bin_w(), bh = grid_.bin_h();
    for (std::size_t i = 0; i < nl_->size(); ++i) {
      const Instance& inst = nl_->instance(i);
      if (inst.fixed() || inst.area() <= 0.0) continue;
      const double x0 = centers[i].x - 0.5 * kw_[i], x1 = centers[i].x + 0.5 * kw_[i];
      const double y0 = centers[i].y - 0.5 * kh_[i], y1 = centers[i].y + 0.5 * kh_[i];
      const double scale = inst.area() / (kw_[i] * kh_[i]);
      const int ix0 = grid_.col_of(x0), ix1 = grid_.col_of(std::nextafter(x1, x0));
      const int iy0 = grid_.row_of(y0), iy1 = grid_.row_of(std::nextafter(y1, y0));
      // ∂overlap/∂x: +oy in the column holding the right edge, −oy in the left one.
      double gx = 0.0, gy = 0.0;
      for (int iy = iy0; iy <= iy1; ++iy) {
        const double oy = overlap_1d(y0, y1, r.ymin + iy * bh, r.ymin + (iy + 1) * bh);
        if (oy <= 0.0) continue;
        gx += oy * (sol.phi[grid_.index(ix1, iy)] - sol.phi[grid_.index(ix0, iy)]);
      }
      for (int ix = ix0; ix <= ix1; ++ix) {
        const double ox = overlap_1d(x0, x1, r.xmin + ix * bw, r.xmin + (ix + 1) * bw);
        if (ox <= 0.0) continue;
        gy += ox * (sol.phi[grid_.index(ix, iy1)] - sol.phi[grid_.index(ix, iy0)]);
      }
      g[i] = {scale * gx, scale * gy};
    }
    return g;
  }

  const std::vector<MacroCharge>& macros() const noexcept { return macros_; }

 private:
  const Netlist* nl_;
  BinGrid grid_;
  double target_;
  ScheduleSpec schedule_;
  std::vector<double> kw_, kh_;
  std::vector<MacroCharge> macros_;
  std::optional<DensityGrid> fixed_cache_;
  int fixed_key_ = -2;
};

/// Smoothed density of all instances at schedule iteration t.
inline DensityGrid smoothed_density(const Netlist& nl, const std::vector<Point>& lower_left,
                                    const BinGrid& grid, const ScheduleSpec& schedule, int t,
                                    double target_density) {
  DensityModel model(nl, grid, target_density, schedule);
  return model.total_density(centers_of(nl, lower_left), t);
}

/// Bilinear interpolation of a bin-centered field at point p (clamped to the
/// lattice of bin centers).
inline double bilinear(const BinGrid& g, const std::vector<double>& field, Point p) {
  const double fx = std::clamp((p.x - g.region.xmin) / g.bin_w() - 0.5, 0.0, g.nx - 1.0);
  const double fy = std::clamp((p.y - g.region.ymin) / g.bin_h() - 0.5, 0.0, g.ny - 1.0);
  const int i0 = std::min(static_cast<int>(fx), g.nx - 1), j0 = std::min(static_cast<int>(fy), g.ny - 1);
  const int i1 = std::min(i0 + 1, g.nx - 1), j1 = std::min(j0 + 1, g.ny - 1);
  const double tx = fx - i0, ty = fy - j0;
  return (1 - tx) * (1 - ty) * field[g.index(i0, j0)] + tx * (1 - ty) * field[g.index(i1, j0)] +
         (1 - tx) * ty * field[g.index(i0, j1)] + tx * ty * field[g.index(i1, j1)];
}

/// a_k·E(r_k) with E bilinearly interpolated at each movable center.
inline std::vector<Point> density_gradient_bilinear(const Netlist& nl, const BinGrid& grid,
                                                    const PoissonSolution& sol,
                                                    const std::vector<Point>& centers) {
  std::vector<Point> g(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    if (inst.fixed()) continue;
    g[i] = {inst.area() * bilinear(grid, sol.ex, centers[i]),
            inst.area() * bilinear(grid, sol.ey, centers[i])};
  }
  return g;
}

}  // namespace gsplace
