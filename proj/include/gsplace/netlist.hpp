#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gsplace/error.hpp"

namespace gsplace {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class InstanceKind { kMovableCell, kMovableMacro, kFixedMacro, kIoPin };

inline constexpr bool is_fixed(InstanceKind k) noexcept {
  return k == InstanceKind::kFixedMacro || k == InstanceKind::kIoPin;
}

inline constexpr std::string_view to_string(InstanceKind k) noexcept {
  switch (k) {
    case InstanceKind::kMovableCell: return "movable-cell";
    case InstanceKind::kMovableMacro: return "movable-macro";
    case InstanceKind::kFixedMacro: return "fixed-macro";
    case InstanceKind::kIoPin: return "io-pin";
  }
  return "unknown";
}

/// A placeable object. `position` is the lower-left corner as loaded; for fixed
/// kinds it is authoritative for the whole flow.
struct Instance {
  std::string name;
  double width = 0.0;
  double height = 0.0;
  InstanceKind kind = InstanceKind::kMovableCell;
  Point position;

  bool fixed() const noexcept { return is_fixed(kind); }
  double area() const noexcept { return width * height; }
};

/// Pin offset is measured from the owning instance's lower-left corner.
struct Pin {
  std::size_t instance = 0;
  double dx = 0.0;
  double dy = 0.0;
};

struct Net {
  std::string name;
  std::vector<Pin> pins;
  double weight = 1.0;
};

struct Region {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 1.0;
  double ymax = 1.0;

  double width() const noexcept { return xmax - xmin; }
  double height() const noexcept { return ymax - ymin; }
  double area() const noexcept { return width() * height(); }
  Point center() const noexcept { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  bool contains(Point p) const noexcept {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

/// Uniform bin grid over a region.
struct BinGrid {
  Region region;
  int nx = 1;
  int ny = 1;

  BinGrid() = default;
  BinGrid(Region r, int bins_x, int bins_y) : region(r), nx(bins_x), ny(bins_y) {
    if (nx < 1 || ny < 1) throw ConfigError("bin grid dimensions must be >= 1");
    if (!(r.xmax > r.xmin) || !(r.ymax > r.ymin)) throw ConfigError("degenerate placement region");
  }

  double bin_w() const noexcept { return region.width() / nx; }
  double bin_h() const noexcept { return region.height() / ny; }
  double bin_area() const noexcept { return bin_w() * bin_h(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int ix, int iy) const noexcept {
    return static_cast<std::size_t>(iy) * nx + ix;
  }
  Point bin_center(int ix, int iy) const noexcept {
    return {region.xmin + (ix + 0.5) * bin_w(), region.ymin + (iy + 0.5) * bin_h()};
  }
  int col_of(double x) const noexcept {
    return std::clamp(static_cast<int>(std::floor((x - region.xmin) / bin_w())), 0, nx - 1);
  }
  int row_of(double y) const noexcept {
    return std::clamp(static_cast<int>(std::floor((y - region.ymin) / bin_h())), 0, ny - 1);
  }
};

/// Immutable netlist with placement region. Construction validates pin references.
class Netlist {
 public:
  Netlist() = default;
  Netlist(std::vector<Instance> instances, std::vector<Net> nets, Region region)
      : instances_(std::move(instances)), nets_(std::move(nets)), region_(region) {
    if (!(region_.xmax > region_.xmin) || !(region_.ymax > region_.ymin))
      throw ConfigError("placement region must have positive extent");
    for (const auto& inst : instances_) {
      if (inst.width < 0.0 || inst.height < 0.0)
        throw NetlistError("instance '" + inst.name + "' has negative size");
      if (inst.fixed()) ++fixed_count_;
    }
    for (const auto& net : nets_) {
      if (net.pins.empty()) throw NetlistError("net '" + net.name + "' has no pins");
      if (!(net.weight > 0.0)) throw NetlistError("net '" + net.name + "' has non-positive weight");
      for (const auto& pin : net.pins) {
        if (pin.instance >= instances_.size())
          throw NetlistError("net '" + net.name + "' references unknown instance id " +
                             std::to_string(pin.instance));
      }
      pin_count_ += net.pins.size();
    }
  }

  const std::vector<Instance>& instances() const noexcept { return instances_; }
  const std::vector<Net>& nets() const noexcept { return nets_; }
  const Instance& instance(std::size_t i) const { return instances_.at(i); }
  const Region& region() const noexcept { return region_; }

  std::size_t size() const noexcept { return instances_.size(); }
  std::size_t pin_count() const noexcept { return pin_count_; }
  std::size_t fixed_count() const noexcept { return fixed_count_; }
  std::size_t movable_count() const noexcept { return instances_.size() - fixed_count_; }

  double movable_area() const noexcept {
    double a = 0.0;
    for (const auto& inst : instances_)
      if (!inst.fixed()) a += inst.area();
    return a;
  }

  /// Loaded lower-left positions of every instance.
  std::vector<Point> initial_positions() const {
    std::vector<Point> p;
    p.reserve(instances_.size());
    for (const auto& inst : instances_) p.push_back(inst.position);
    return p;
  }

 private:
  std::vector<Instance> instances_;
  std::vector<Net> nets_;
  Region region_;
  std::size_t pin_count_ = 0;
  std::size_t fixed_count_ = 0;
};

inline Point center_of(const Instance& inst, Point lower_left) noexcept {
  return {lower_left.x + 0.5 * inst.width, lower_left.y + 0.5 * inst.height};
}

inline Point lower_left_of(const Instance& inst, Point center) noexcept {
  return {center.x - 0.5 * inst.width, center.y - 0.5 * inst.height};
}

inline std::vector<Point> centers_of(const Netlist& nl, const std::vector<Point>& lower_left) {
  std::vector<Point> c(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) c[i] = center_of(nl.instance(i), lower_left[i]);
  return c;
}

inline std::vector<Point> lower_lefts_of(const Netlist& nl, const std::vector<Point>& centers) {
  std::vector<Point> p(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) p[i] = lower_left_of(nl.instance(i), centers[i]);
  return p;
}

/// Moves every movable instance so its rectangle lies inside the region
/// (instances larger than the region are centered on it).
inline void clamp_to_region(const Netlist& nl, std::vector<Point>& lower_left) {
  const Region& r = nl.region();
  for (std::size_t i = 0; i < nl.size(); ++i) {
    const Instance& inst = nl.instance(i);
    if (inst.fixed()) continue;
    auto clamp_axis = [](double v, double lo, double hi, double size) {
      if (size >= hi - lo) return lo + 0.5 * (hi - lo - size);
      return std::clamp(v, lo, hi - size);
    };
    lower_left[i].x = clamp_axis(lower_left[i].x, r.xmin, r.xmax, inst.width);
    lower_left[i].y = clamp_axis(lower_left[i].y, r.ymin, r.ymax, inst.height);
  }
}

/// FNV-1a digest of a netlist's names, sizes, kinds, positions, pins and region.
inline std::uint64_t fingerprint(const Netlist& nl) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix_bytes = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  auto mix_d = [&](double v) { mix_bytes(&v, sizeof v); };
  auto mix_s = [&](const std::string& s) { mix_bytes(s.data(), s.size() + 1); };
  for (const Instance& inst : nl.instances()) {
    mix_s(inst.name);
    mix_d(inst.width);
    mix_d(inst.height);
    const int k = static_cast<int>(inst.kind);
    mix_bytes(&k, sizeof k);
    mix_d(inst.position.x);
    mix_d(inst.position.y);
  }
  for (const Net& net : nl.nets()) {
    mix_s(net.name);
    mix_d(net.weight);
    for (const Pin& p : net.pins) {
      mix_bytes(&p.instance, sizeof p.instance);
      mix_d(p.dx);
      mix_d(p.dy);
    }
  }
  const Region& r = nl.region();
  for (double v : {r.xmin, r.ymin, r.xmax, r.ymax}) mix_d(v);
  return h;
}

}  // namespace gsplace
