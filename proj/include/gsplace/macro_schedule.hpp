#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/metrics.hpp"
#include "gsplace/netlist.hpp"

namespace gsplace {

/// Iteration-dependent macro charge model. kHard is the conventional full
/// footprint at every iteration.
enum class ScheduleModel { kHard, kGaussian, kExponential, kLinear, kSigmoid };

inline std::string_view to_string(ScheduleModel m) noexcept {
  switch (m) {
    case ScheduleModel::kHard: return "none";
    case ScheduleModel::kGaussian: return "gaussian";
    case ScheduleModel::kExponential: return "exp";
    case ScheduleModel::kLinear: return "linear";
    case ScheduleModel::kSigmoid: return "sigmoid";
  }
  return "none";
}

inline ScheduleModel parse_schedule_model(std::string_view s) {
  if (s == "none" || s == "hard") return ScheduleModel::kHard;
  if (s == "gaussian" || s == "gaussian-redistribution") return ScheduleModel::kGaussian;
  if (s == "exp" || s == "exp-restoration") return ScheduleModel::kExponential;
  if (s == "linear" || s == "linear-restoration") return ScheduleModel::kLinear;
  if (s == "sigmoid" || s == "sigmoid-restoration") return ScheduleModel::kSigmoid;
  throw ConfigError("unknown schedule model '" + std::string(s) + "'");
}

struct ScheduleSpec {
  ScheduleModel model = ScheduleModel::kExponential;
  int horizon = 300;
  // Scheme A: log-linear edge decay ratio.
  double r0 = 0.05;
  double r1 = 0.95;
  // Scheme B: linear normalized FWHM.
  double beta_min = 0.2;
  double beta_max = 1.0;
  // Smoothstep knots of the A/B blend.
  double alpha0 = 0.3;
  double alpha1 = 0.7;
  double sigma_factor = 0.05;
  double k_factor = 2.0;
  double sigma_min = 1e-3;
  double k_min = 1e-3;
  double k_cap = 1e3;
  int supersample = 4;

  void validate() const {
    if (horizon < 1) throw ConfigError("schedule_iteration must be >= 1");
    if (!(r0 > 0.0 && r0 < 1.0 && r1 > 0.0 && r1 < 1.0))
      throw ConfigError("edge decay endpoints r0, r1 must lie in (0, 1)");
    if (!(r0 < r1)) throw ConfigError("r0 must be < r1");
    if (!(beta_min > 0.0 && beta_min < beta_max)) throw ConfigError("need 0 < beta_min < beta_max");
    if (!(alpha0 >= 0.0 && alpha0 < alpha1 && alpha1 <= 1.0))
      throw ConfigError("need 0 <= alpha0 < alpha1 <= 1");
    if (!(sigma_factor > 0.0)) throw ConfigError("sigma_factor must be > 0");
    if (!(k_factor > 0.0)) throw ConfigError("k_factor must be > 0");
    if (!(sigma_min > 0.0) || !(k_min > 0.0) || !(k_cap > k_min))
      throw ConfigError("schedule clamps must satisfy 0 < min < cap");
    if (supersample < 1) throw ConfigError("supersample must be >= 1");
  }

  /// First iteration that uses the full hard footprint.
  int snap_iteration() const { return static_cast<int>(std::ceil(0.95 * horizon)); }
};

/// σ at which exp(−tan²(0.45π)/(2σ²)) = 0.99: the exponential model is then
/// indistinguishable from a uniform footprint.
inline double sigma_cap() {
  static const double cap =
      std::tan(0.45 * std::numbers::pi) / std::sqrt(-2.0 * std::log(0.99));
  return cap;
}

// ---- charge-density models (local coordinates relative to the macro center) ----

inline double gaussian_peak(double eta) {
  const double e = std::erf(eta / std::numbers::sqrt2);
  return 2.0 * eta * eta / (std::numbers::pi * e * e);
}

/// Area-normalized Gaussian truncated to the w×h footprint.
inline double rho_gaussian(double eta, double dx, double dy, double w, double h) {
  if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
  if (std::abs(dx) > 0.5 * w || std::abs(dy) > 0.5 * h) return 0.0;
  return gaussian_peak(eta) * std::exp(-2.0 * eta * eta * (dx * dx / (w * w) + dy * dy / (h * h)));
}

inline double rho_exponential(double sigma, double dx, double dy, double w, double h) {
  if (std::abs(dx) >= 0.5 * w || std::abs(dy) >= 0.5 * h) return 0.0;
  const double tx = std::tan(std::numbers::pi * dx / w), ty = std::tan(std::numbers::pi * dy / h);
  return std::exp(-(tx * tx + ty * ty) / (2.0 * sigma * sigma));
}

inline double radial(double dx, double dy, double w, double h) {
  return std::sqrt(2.0 * (dx * dx / (w * w) + dy * dy / (h * h)));
}

inline double rho_linear(double k, double dx, double dy, double w, double h) {
  if (std::abs(dx) > 0.5 * w || std::abs(dy) > 0.5 * h) return 0.0;
  return std::max(0.0, 1.0 - k * radial(dx, dy, w, h));
}

inline double rho_sigmoid(double k, double dx, double dy, double w, double h) {
  if (std::abs(dx) > 0.5 * w || std::abs(dy) > 0.5 * h) return 0.0;
  return 2.0 / (1.0 + std::exp(k * radial(dx, dy, w, h)));
}

// ---- schedules ----

inline double smoothstep_weight(double alpha, double alpha0, double alpha1) {
  if (alpha <= alpha0) return 0.0;
  if (alpha >= alpha1) return 1.0;
  // 3z^2 - 2z^3 written around the midpoint (u = 2z - 1) so w(mid) = 0.5 exactly
  const double u = (2.0 * alpha - alpha0 - alpha1) / (alpha1 - alpha0);
  return 0.5 + u * (0.75 - 0.25 * u * u);
}

inline double eta_scheme_a(double alpha, const ScheduleSpec& s) {
  const double log_r = (1.0 - alpha) * std::log(s.r0) + alpha * std::log(s.r1);
  return std::sqrt(-2.0 * log_r);
}

inline double eta_scheme_b(double alpha, const ScheduleSpec& s) {
  const double beta = s.beta_min + (s.beta_max - s.beta_min) * alpha;
  return std::sqrt(2.0 * std::numbers::ln2) / beta;
}

/// Blended concentration η(t) = η_B^{1−w} η_A^{w}.
inline double eta_schedule(double t, double T, const ScheduleSpec& s) {
  if (!(s.r0 > 0.0 && s.r0 < 1.0 && s.r1 > 0.0 && s.r1 < 1.0))
    throw ConfigError("edge decay endpoints r0, r1 must lie in (0, 1)");
  const double alpha = std::clamp(t / T, 0.0, 1.0);
  const double w = smoothstep_weight(alpha, s.alpha0, s.alpha1);
  return std::pow(eta_scheme_b(alpha, s), 1.0 - w) * std::pow(eta_scheme_a(alpha, s), w);
}

/// σ(t) = −σ_factor·T·ln(1 − t/T), clamped to [σ_min, σ_cap].
inline double sigma_schedule(double t, double T, double sigma_factor, double sigma_min = 1e-3) {
  const double cap = sigma_cap();
  if (t >= T) return cap;
  const double s = -sigma_factor * T * std::log1p(-t / T);
  return std::clamp(s, sigma_min, cap);
}

/// k(t) = k_factor / tan(π t / (2T)), clamped to [k_min, k_cap].
inline double k_schedule(double t, double T, double k_factor, double k_min = 1e-3,
                         double k_cap = 1e3) {
  if (t <= 0.0) return k_cap;
  if (t >= T) return k_min;
  // cot(πu/2) = (1 + cos πu) / sin πu, exact at u = 1/2
  const double u = std::numbers::pi * t / T;
  const double k = k_factor * (1.0 + std::cos(u)) / std::sin(u);
  return std::clamp(k, k_min, k_cap);
}

/// Resolved model parameter at one iteration.
struct ChargeState {
  ScheduleModel model = ScheduleModel::kHard;
  bool snapped = true;  ///< full uniform footprint
  double param = 0.0;   ///< η, σ or k depending on the model

  double evaluate(double dx, double dy, double w, double h) const {
    if (snapped) return (std::abs(dx) <= 0.5 * w && std::abs(dy) <= 0.5 * h) ? 1.0 : 0.0;
    switch (model) {
      case ScheduleModel::kGaussian: return rho_gaussian(param, dx, dy, w, h);
      case ScheduleModel::kExponential: return rho_exponential(param, dx, dy, w, h);
      case ScheduleModel::kLinear: return rho_linear(param, dx, dy, w, h);
      case ScheduleModel::kSigmoid: return rho_sigmoid(param, dx, dy, w, h);
      case ScheduleModel::kHard: break;
    }
    return (std::abs(dx) <= 0.5 * w && std::abs(dy) <= 0.5 * h) ? 1.0 : 0.0;
  }
};

inline ChargeState charge_state(int t, const ScheduleSpec& s) {
  ChargeState st;
  st.model = s.model;
  st.snapped = s.model == ScheduleModel::kHard || t >= s.snap_iteration();
  if (st.snapped) return st;
  const double T = s.horizon;
  switch (s.model) {
    case ScheduleModel::kGaussian: st.param = eta_schedule(t, T, s); break;
    case ScheduleModel::kExponential: st.param = sigma_schedule(t, T, s.sigma_factor, s.sigma_min); break;
    case ScheduleModel::kLinear:
    case ScheduleModel::kSigmoid: st.param = k_schedule(t, T, s.k_factor, s.k_min, s.k_cap); break;
    case ScheduleModel::kHard: break;
  }
  return st;
}

/// A fixed macro as a scheduled charge source.
struct MacroCharge {
  std::size_t macro = 0;
  double width = 0.0;
  double height = 0.0;
  Point center;
  double amplitude = 1.0;

  static MacroCharge of(const Instance& inst, std::size_t id, double amplitude) {
    return {id, inst.width, inst.height, center_of(inst, inst.position), amplitude};
  }
};

namespace detail {
inline double gaussian_axis_integral(double eta, double a, double b, double size) {
  const double k = std::numbers::sqrt2 * eta / size;
  return size / eta * std::sqrt(std::numbers::pi / 8.0) * (std::erf(k * b) - std::erf(k * a));
}

/// Midpoint samples per axis over [a,b]: at least `minimum`, and at least
/// `per_side` samples per full macro side.
inline int sample_count(double a, double b, double size, int minimum, int per_side) {
  return std::max(minimum, static_cast<int>(std::ceil(per_side * (b - a) / size)));
}

/// ∫_a^b exp(−tan²(πu/size)/(2σ²)) du by the midpoint rule.
inline double exponential_axis_integral(double sigma, double a, double b, double size, int n) {
  const double step = (b - a) / n, inv = 1.0 / (2.0 * sigma * sigma);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = a + (i + 0.5) * step;
    if (std::abs(u) >= 0.5 * size) continue;
    const double tu = std::tan(std::numbers::pi * u / size);
    sum += std::exp(-tu * tu * inv);
  }
  return sum * step;
}
}  // namespace detail

/// Sampling density (per macro side) for the restoration integrals.
inline constexpr int kRadialSamplesPerSide = 64;
inline constexpr int kSeparableSamplesPerSide = 1024;

/// Adds amplitude·∬_{B_b ∩ footprint} ρ_t / binArea to every overlapped bin.
///
/// Gaussian: exact per-axis erf differences. Exponential: separable, per-axis
/// midpoint sums. Linear/sigmoid: 2-D midpoint supersampling with at least
/// `spec.supersample` samples per bin axis.
inline void macro_bin_contribution(const MacroCharge& mc, int t, const ScheduleSpec& spec,
                                   DensityGrid& out) {
  const ChargeState st = charge_state(t, spec);
  const BinGrid& g = out.grid;
  const double fx0 = mc.center.x - 0.5 * mc.width, fx1 = mc.center.x + 0.5 * mc.width;
  const double fy0 = mc.center.y - 0.5 * mc.height, fy1 = mc.center.y + 0.5 * mc.height;
  if (st.snapped) {
    accumulate_rect(out, fx0, fy0, fx1, fy1, mc.amplitude);
    return;
  }
  const Region& r = g.region;
  const double x0 = std::max(fx0, r.xmin), x1 = std::min(fx1, r.xmax);
  const double y0 = std::max(fy0, r.ymin), y1 = std::min(fy1, r.ymax);
  if (!(x1 > x0) || !(y1 > y0)) return;
  const double bw = g.bin_w(), bh = g.bin_h(), inv_area = mc.amplitude / g.bin_area();
  const int ix0 = g.col_of(x0), ix1 = g.col_of(std::nextafter(x1, x0));
  const int iy0 = g.row_of(y0), iy1 = g.row_of(std::nextafter(y1, y0));
  const int s = spec.supersample;

  // per-column / per-row axis factors for the separable models
  const bool separable = spec.model == ScheduleModel::kGaussian || spec.model == ScheduleModel::kExponential;
  std::vector<double> fx, fy;
  auto axis = [&](double a, double b, double c, double size) {
    if (spec.model == ScheduleModel::kGaussian) return detail::gaussian_axis_integral(st.param, a - c, b - c, size);
    const int n = detail::sample_count(a, b, size, s, kSeparableSamplesPerSide);
    return detail::exponential_axis_integral(st.param, a - c, b - c, size, n);
  };
  if (separable) {
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double cx0 = std::max(x0, r.xmin + ix * bw), cx1 = std::min(x1, r.xmin + (ix + 1) * bw);
      fx.push_back(cx1 > cx0 ? axis(cx0, cx1, mc.center.x, mc.width) : 0.0);
    }
    for (int iy = iy0; iy <= iy1; ++iy) {
      const double cy0 = std::max(y0, r.ymin + iy * bh), cy1 = std::min(y1, r.ymin + (iy + 1) * bh);
      fy.push_back(cy1 > cy0 ? axis(cy0, cy1, mc.center.y, mc.height) : 0.0);
    }
  }
  const double peak = spec.model == ScheduleModel::kGaussian ? gaussian_peak(st.param) : 1.0;

  for (int iy = iy0; iy <= iy1; ++iy) {
    const double cy0 = std::max(y0, r.ymin + iy * bh), cy1 = std::min(y1, r.ymin + (iy + 1) * bh);
    if (!(cy1 > cy0)) continue;
    for (int ix = ix0; ix <= ix1; ++ix) {
      const double cx0 = std::max(x0, r.xmin + ix * bw), cx1 = std::min(x1, r.xmin + (ix + 1) * bw);
      if (!(cx1 > cx0)) continue;
      double integral = 0.0;
      if (separable) {
        integral = peak * fx[static_cast<std::size_t>(ix - ix0)] * fy[static_cast<std::size_t>(iy - iy0)];
      } else {
        const int nx = detail::sample_count(cx0, cx1, mc.width, s, kRadialSamplesPerSide);
        const int ny = detail::sample_count(cy0, cy1, mc.height, s, kRadialSamplesPerSide);
        const double sx = (cx1 - cx0) / nx, sy = (cy1 - cy0) / ny;
        for (int a = 0; a < nx; ++a)
          for (int b = 0; b < ny; ++b)
            integral += st.evaluate(cx0 + (a + 0.5) * sx - mc.center.x,
                                    cy0 + (b + 0.5) * sy - mc.center.y, mc.width, mc.height);
        integral *= sx * sy;
      }
      out.at(ix, iy) += integral * inv_area;
    }
  }
}

}  // namespace gsplace
