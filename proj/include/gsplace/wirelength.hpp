#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/netlist.hpp"

namespace gsplace {

enum class WirelengthModel { kWA, kLSE };

inline WirelengthModel parse_wirelength_model(std::string_view s) {
  if (s == "WA" || s == "wa") return WirelengthModel::kWA;
  if (s == "LSE" || s == "lse") return WirelengthModel::kLSE;
  throw ConfigError("unknown wirelength model '" + std::string(s) + "'");
}

inline std::string_view to_string(WirelengthModel m) noexcept {
  return m == WirelengthModel::kWA ? "WA" : "LSE";
}

struct WirelengthResult {
  double value = 0.0;
  std::vector<Point> grad;  ///< per instance; pins move rigidly with their instance
};

/// Smooth wirelength of one axis of one net and d/dx_i, written into `grad`.
/// Exponentials are shifted by the max/min coordinate for stability.
inline double smooth_net_axis(const double* x, std::size_t n, double gamma, WirelengthModel model,
                              double* grad, std::vector<double>& scratch) {
  if (n < 2) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = 0.0;
    return 0.0;
  }
  const double xmax = *std::max_element(x, x + n), xmin = *std::min_element(x, x + n);
  scratch.resize(2 * n);
  double* a = scratch.data();
  double* b = scratch.data() + n;
  double sa = 0.0, sb = 0.0, ta = 0.0, tb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = std::exp((x[i] - xmax) / gamma);
    b[i] = std::exp((xmin - x[i]) / gamma);
    sa += a[i];
    sb += b[i];
    ta += x[i] * a[i];
    tb += x[i] * b[i];
  }
  if (model == WirelengthModel::kLSE) {
    for (std::size_t i = 0; i < n; ++i) grad[i] = a[i] / sa - b[i] / sb;
    return gamma * (std::log(sa) + std::log(sb)) + (xmax - xmin);
  }
  const double xp = ta / sa, xm = tb / sb;
  for (std::size_t i = 0; i < n; ++i)
    grad[i] = a[i] / sa * (1.0 + (x[i] - xp) / gamma) - b[i] / sb * (1.0 - (x[i] - xm) / gamma);
  return xp - xm;
}

/// Flattened pin table for repeated wirelength evaluation.
class WirelengthEvaluator {
 public:
  explicit WirelengthEvaluator(const Netlist& nl) : nl_(&nl) {
    net_begin_.reserve(nl.nets().size() + 1);
    net_begin_.push_back(0);
    for (const Net& net : nl.nets()) {
      for (const Pin& p : net.pins) {
        inst_.push_back(p.instance);
        dx_.push_back(p.dx);
        dy_.push_back(p.dy);
      }
      net_begin_.push_back(inst_.size());
      weight_.push_back(net.weight);
    }
  }

  /// Weighted smooth wirelength; `grad` (if non-null) receives per-instance gradients.
  double evaluate(const std::vector<Point>& lower_left, double gamma, WirelengthModel model,
                  std::vector<Point>* grad) const {
    if (!(gamma > 0.0)) throw ConfigError("wirelength smoothing gamma must be > 0");
    if (grad) grad->assign(nl_->size(), Point{});
    double total = 0.0;
    std::vector<double> xs, ys, gx, gy, scratch;
    for (std::size_t e = 0; e + 1 < net_begin_.size(); ++e) {
      const std::size_t b = net_begin_[e], n = net_begin_[e + 1] - b;
      if (n < 2) continue;
      xs.resize(n);
      ys.resize(n);
      gx.resize(n);
      gy.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        const Point p = lower_left[inst_[b + k]];
        xs[k] = p.x + dx_[b + k];
        ys[k] = p.y + dy_[b + k];
      }
      const double w = weight_[e];
      total += w * (smooth_net_axis(xs.data(), n, gamma, model, gx.data(), scratch) +
                    smooth_net_axis(ys.data(), n, gamma, model, gy.data(), scratch));
      if (grad)
        for (std::size_t k = 0; k < n; ++k) {
          (*grad)[inst_[b + k]].x += w * gx[k];
          (*grad)[inst_[b + k]].y += w * gy[k];
        }
    }
    return total;
  }

 private:
  const Netlist* nl_;
  std::vector<std::size_t> net_begin_;
  std::vector<std::size_t> inst_;
  std::vector<double> dx_, dy_, weight_;
};

inline WirelengthResult wa_wirelength_and_grad(const Netlist& nl, const std::vector<Point>& lower_left,
                                               double gamma,
                                               WirelengthModel model = WirelengthModel::kWA) {
  WirelengthResult r;
  r.value = WirelengthEvaluator(nl).evaluate(lower_left, gamma, model, &r.grad);
  return r;
}

}  // namespace gsplace
