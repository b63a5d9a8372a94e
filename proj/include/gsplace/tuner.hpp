#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/random.hpp"

namespace gsplace {

enum class ParamKind { kReal, kInt, kCategorical };

struct ParamDesc {
  std::string name;
  ParamKind kind = ParamKind::kReal;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::string> choices;
  bool log_scale = false;

  static ParamDesc real(std::string n, double lo, double hi, bool log = false) {
    return {std::move(n), ParamKind::kReal, lo, hi, {}, log};
  }
  static ParamDesc integer(std::string n, int lo, int hi) {
    return {std::move(n), ParamKind::kInt, static_cast<double>(lo), static_cast<double>(hi), {}, false};
  }
  static ParamDesc categorical(std::string n, std::vector<std::string> c) {
    ParamDesc d{std::move(n), ParamKind::kCategorical, 0.0, 0.0, std::move(c), false};
    d.hi = static_cast<double>(d.choices.size()) - 1.0;
    return d;
  }
};

struct ParamSpace {
  std::vector<ParamDesc> params;

  std::size_t size() const noexcept { return params.size(); }

  void validate() const {
    std::set<std::string> names;
    for (const auto& p : params) {
      if (!names.insert(p.name).second) throw ConfigError("duplicate parameter '" + p.name + "'");
      if (p.kind == ParamKind::kCategorical) {
        if (p.choices.empty()) throw ConfigError("parameter '" + p.name + "' has no choices");
        continue;
      }
      if (!std::isfinite(p.lo) || !std::isfinite(p.hi) || p.lo > p.hi)
        throw ConfigError("parameter '" + p.name + "' has invalid bounds");
      if (p.log_scale && !(p.lo > 0.0)) throw ConfigError("log-scale parameter '" + p.name + "' needs lo > 0");
    }
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i].name == name) return i;
    throw ConfigError("unknown parameter '" + name + "'");
  }
};

/// One value per parameter; categoricals hold the choice index.
using Assignment = std::vector<double>;

inline bool within_space(const ParamSpace& space, const Assignment& a) {
  if (a.size() != space.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& p = space.params[i];
    if (!(a[i] >= p.lo && a[i] <= p.hi)) return false;
    if (p.kind != ParamKind::kReal && a[i] != std::round(a[i])) return false;
  }
  return true;
}

inline std::string format_value(const ParamDesc& p, double v) {
  if (p.kind == ParamKind::kCategorical) return p.choices.at(static_cast<std::size_t>(v));
  if (p.kind == ParamKind::kInt) return std::to_string(static_cast<long long>(std::llround(v)));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

enum class TrialStatus { kOk, kFailed };

struct Trial {
  int id = 0;
  Assignment params;
  std::vector<double> objectives;
  TrialStatus status = TrialStatus::kOk;
  std::string error;
  bool ok() const noexcept { return status == TrialStatus::kOk; }
};

// ---------------------------------------------------------------- Pareto

inline bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strict = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] > b[k]) return false;
    if (a[k] < b[k]) strict = true;
  }
  return strict;
}

/// Non-dominated sorting; rank 0 is the Pareto front.
inline std::vector<int> pareto_rank(const std::vector<std::vector<double>>& pts) {
  const std::size_t n = pts.size();
  std::vector<int> rank(n, -1), dom_count(n, 0);
  std::vector<std::vector<std::size_t>> dominated(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(pts[i], pts[j])) {
        dominated[i].push_back(j);
        ++dom_count[j];
      } else if (dominates(pts[j], pts[i])) {
        dominated[j].push_back(i);
        ++dom_count[i];
      }
    }
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < n; ++i)
    if (dom_count[i] == 0) front.push_back(i);
  for (int r = 0; !front.empty(); ++r) {
    std::vector<std::size_t> next;
    for (std::size_t i : front) {
      rank[i] = r;
      for (std::size_t j : dominated[i])
        if (--dom_count[j] == 0) next.push_back(j);
    }
    front = std::move(next);
  }
  return rank;
}

/// Crowding distance of each point among `members` (indices into pts).
inline std::vector<double> crowding_distance(const std::vector<std::vector<double>>& pts,
                                             const std::vector<std::size_t>& members) {
  const std::size_t m = members.size();
  std::vector<double> d(m, 0.0);
  if (m == 0) return d;
  const std::size_t nobj = pts[members[0]].size();
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < nobj; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pts[members[a]][k] < pts[members[b]][k]; });
    const double lo = pts[members[order.front()]][k], hi = pts[members[order.back()]][k];
    d[order.front()] = d[order.back()] = std::numeric_limits<double>::infinity();
    if (hi <= lo) continue;
    for (std::size_t r = 1; r + 1 < m; ++r)
      d[order[r]] += (pts[members[order[r + 1]]][k] - pts[members[order[r - 1]]][k]) / (hi - lo);
  }
  return d;
}

/// Indices of successful trials on the first front.
inline std::vector<std::size_t> pareto_front(const std::vector<Trial>& trials) {
  std::vector<std::size_t> ok;
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < trials.size(); ++i)
    if (trials[i].ok()) {
      ok.push_back(i);
      pts.push_back(trials[i].objectives);
    }
  const auto rank = pareto_rank(pts);
  std::vector<std::size_t> front;
  for (std::size_t k = 0; k < ok.size(); ++k)
    if (rank[k] == 0) front.push_back(ok[k]);
  return front;
}

// ------------------------------------------------------------- Hypervolume

/// Area dominated by `pts` and bounded by `ref` (minimization).
inline double hypervolume_2d(std::vector<std::vector<double>> pts, const std::vector<double>& ref) {
  std::erase_if(pts, [&](const auto& p) { return !(p[0] < ref[0] && p[1] < ref[1]); });
  std::sort(pts.begin(), pts.end());
  double hv = 0.0, best_y = ref[1];
  for (const auto& p : pts) {
    if (p[1] < best_y) {
      hv += (ref[0] - p[0]) * (best_y - p[1]);
      best_y = p[1];
    }
  }
  return hv;
}

/// Volume dominated by `pts` and bounded by `ref`, by slicing along the third axis.
inline double hypervolume_3d(std::vector<std::vector<double>> pts, const std::vector<double>& ref) {
  std::erase_if(pts, [&](const auto& p) { return !(p[0] < ref[0] && p[1] < ref[1] && p[2] < ref[2]); });
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[2] < b[2]; });
  double hv = 0.0;
  std::vector<std::vector<double>> slab;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    slab.push_back({pts[i][0], pts[i][1]});
    const double z_next = i + 1 < pts.size() ? pts[i + 1][2] : ref[2];
    if (z_next > pts[i][2]) hv += hypervolume_2d(slab, ref) * (z_next - pts[i][2]);
  }
  return hv;
}

// ------------------------------------------------------------------- MOTPE

struct MotpeOptions {
  double gamma_q = 0.25;
  int n_candidates = 24;
  /// Bandwidth floor as a fraction of the parameter range.
  double bandwidth_floor = 0.01;
};

namespace tuner_detail {

inline double to_internal(const ParamDesc& p, double v) { return p.log_scale ? std::log(v) : v; }
inline double from_internal(const ParamDesc& p, double u) { return p.log_scale ? std::exp(u) : u; }

/// Per-dimension truncated Gaussian KDE over an internal-space interval, with
/// one extra uniform prior component. Each center's bandwidth is the larger
/// gap to its sorted neighbours (interval ends count as neighbours), clamped
/// to [floor, range].
struct Kde1d {
  std::vector<double> centers, h;
  double lo = 0.0, hi = 1.0;

  Kde1d(std::vector<double> c, double lo_, double hi_, double floor_frac) : centers(std::move(c)), lo(lo_), hi(hi_) {
    const double range = hi - lo;
    h.assign(centers.size(), 1.0);
    if (range <= 0.0) return;
    std::vector<std::size_t> order(centers.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return centers[a] < centers[b]; });
    for (std::size_t r = 0; r < order.size(); ++r) {
      const double x = centers[order[r]];
      const double left = r == 0 ? x - lo : x - centers[order[r - 1]];
      const double right = r + 1 == order.size() ? hi - x : centers[order[r + 1]] - x;
      h[order[r]] = std::clamp(std::max(left, right), floor_frac * range, range);
    }
  }

  double pdf(double x) const {
    const double range = hi - lo;
    const double w = 1.0 / (static_cast<double>(centers.size()) + 1.0);
    double s = range > 0.0 ? w / range : w;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double c = centers[k], hk = h[k];
      const double mass = 0.5 * (std::erf((hi - c) / (hk * std::numbers::sqrt2)) -
                                 std::erf((lo - c) / (hk * std::numbers::sqrt2)));
      const double z = (x - c) / hk;
      s += w * std::exp(-0.5 * z * z) / (hk * std::sqrt(2.0 * std::numbers::pi) * std::max(mass, 1e-300));
    }
    return s;
  }

  double sample(Rng& rng) const {
    const std::size_t k = rng.index(centers.size() + 1);
    if (k == centers.size() || hi <= lo) return rng.uniform(lo, hi);
    for (int attempt = 0; attempt < 64; ++attempt) {
      const double x = centers[k] + h[k] * rng.normal();
      if (x >= lo && x <= hi) return x;
    }
    return std::clamp(centers[k], lo, hi);
  }
};

struct Categorical {
  std::vector<double> p;
  Categorical(const std::vector<double>& values, std::size_t n_choices) : p(n_choices, 1.0) {
    for (double v : values) p[static_cast<std::size_t>(v)] += 1.0;
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& x : p) x /= total;
  }
  double pmf(double v) const { return p[static_cast<std::size_t>(v)]; }
  double sample(Rng& rng) const {
    double u = rng.uniform(), acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<double>(i);
    }
    return static_cast<double>(p.size() - 1);
  }
};

}  // namespace tuner_detail

inline Assignment sample_uniform(const ParamSpace& space, Rng& rng) {
  Assignment a(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto& p = space.params[i];
    switch (p.kind) {
      case ParamKind::kCategorical: a[i] = static_cast<double>(rng.index(p.choices.size())); break;
      case ParamKind::kInt:
        a[i] = p.lo + static_cast<double>(rng.index(static_cast<std::size_t>(p.hi - p.lo) + 1));
        break;
      case ParamKind::kReal:
        a[i] = p.log_scale ? std::exp(rng.uniform(std::log(p.lo), std::log(p.hi))) : rng.uniform(p.lo, p.hi);
        a[i] = std::clamp(a[i], p.lo, p.hi);
        break;
    }
  }
  return a;
}

/// Splits successful trials into the better (L) and remaining (G) groups by
/// Pareto rank, breaking ties within a rank by larger crowding distance.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_history(
    const std::vector<Trial>& history, double gamma_q) {
  std::vector<std::size_t> ok;
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < history.size(); ++i)
    if (history[i].ok()) {
      ok.push_back(i);
      pts.push_back(history[i].objectives);
    }
  if (ok.empty()) return {};
  const auto rank = pareto_rank(pts);
  std::vector<double> crowd(ok.size(), 0.0);
  const int max_rank = *std::max_element(rank.begin(), rank.end());
  for (int r = 0; r <= max_rank; ++r) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < ok.size(); ++k)
      if (rank[k] == r) members.push_back(k);
    const auto d = crowding_distance(pts, members);
    for (std::size_t m = 0; m < members.size(); ++m) crowd[members[m]] = d[m];
  }
  std::vector<std::size_t> order(ok.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rank[a] != rank[b]) return rank[a] < rank[b];
    return crowd[a] > crowd[b];
  });
  const std::size_t n_l = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(gamma_q * ok.size())));
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t r = 0; r < order.size(); ++r) (r < n_l ? out.first : out.second).push_back(ok[order[r]]);
  return out;
}

/// Proposes the candidate maximizing Π l(x)/g(x) among n_candidates drawn from L.
inline Assignment motpe_suggest(const std::vector<Trial>& history, const ParamSpace& space, Rng& rng,
                                const MotpeOptions& opt = {}) {
  space.validate();
  if (!(opt.gamma_q > 0.0 && opt.gamma_q <= 1.0)) throw ConfigError("split quantile must lie in (0, 1]");
  if (opt.n_candidates < 1) throw ConfigError("candidate count must be >= 1");
  const auto [L, G] = split_history(history, opt.gamma_q);
  if (L.empty()) return sample_uniform(space, rng);

  using namespace tuner_detail;
  std::vector<Assignment> cands(opt.n_candidates, Assignment(space.size()));
  std::vector<double> score(opt.n_candidates, 0.0);
  for (std::size_t d = 0; d < space.size(); ++d) {
    const ParamDesc& p = space.params[d];
    std::vector<double> lv, gv;
    for (std::size_t i : L) lv.push_back(to_internal(p, history[i].params[d]));
    for (std::size_t i : G) gv.push_back(to_internal(p, history[i].params[d]));
    if (p.kind == ParamKind::kCategorical) {
      const Categorical l(lv, p.choices.size()), g(gv, p.choices.size());
      for (int c = 0; c < opt.n_candidates; ++c) {
        cands[c][d] = l.sample(rng);
        score[c] += std::log(l.pmf(cands[c][d])) - std::log(g.pmf(cands[c][d]));
      }
      continue;
    }
    // Integers get half a unit of slack so the end values keep full mass.
    const double slack = p.kind == ParamKind::kInt ? 0.5 : 0.0;
    const double lo = to_internal(p, p.lo) - slack, hi = to_internal(p, p.hi) + slack;
    const Kde1d l(lv, lo, hi, opt.bandwidth_floor), g(gv, lo, hi, opt.bandwidth_floor);
    for (int c = 0; c < opt.n_candidates; ++c) {
      double u = l.sample(rng);
      double v = from_internal(p, u);
      if (p.kind == ParamKind::kInt) v = std::clamp(std::round(v), p.lo, p.hi);
      v = std::clamp(v, p.lo, p.hi);
      u = to_internal(p, v);
      cands[c][d] = v;
      score[c] += std::log(l.pdf(u)) - std::log(g.pdf(u));
    }
  }
  const auto best = std::max_element(score.begin(), score.end()) - score.begin();
  return cands[best];
}

// ------------------------------------------------------------------- run

using TrialEvaluator = std::function<std::vector<double>(const Assignment&)>;

struct TunerOptions {
  int budget = 100;
  std::uint64_t seed = 1;
  MotpeOptions motpe;
  /// Evaluated first when set (warm start).
  std::optional<Assignment> warm_start;
  /// Uniform samples drawn before MOTPE proposals begin (after the warm start).
  int random_startup = 0;
  /// Called after every trial, e.g. to append a log line.
  std::function<void(const Trial&)> on_trial;
};

struct TunerResult {
  std::vector<Trial> trials;
  std::vector<std::size_t> front;  ///< indices into trials
};

namespace tuner_detail {

inline Trial evaluate_trial(int id, Assignment a, const TrialEvaluator& eval) {
  Trial t;
  t.id = id;
  t.params = std::move(a);
  try {
    t.objectives = eval(t.params);
    for (double v : t.objectives)
      if (!std::isfinite(v)) throw Error("non-finite objective");
  } catch (const std::exception& e) {
    t.status = TrialStatus::kFailed;
    t.error = e.what();
    t.objectives.clear();
  }
  return t;
}

}  // namespace tuner_detail

/// Warm start, then MOTPE proposals, until `budget` trials have run.
inline TunerResult run_tuner(const TrialEvaluator& eval, const ParamSpace& space, const TunerOptions& opt) {
  space.validate();
  if (opt.budget < 1) throw ConfigError("tuner budget must be >= 1");
  if (opt.warm_start && !within_space(space, *opt.warm_start))
    throw ConfigError("warm-start assignment lies outside the parameter space");
  Rng rng(opt.seed);
  TunerResult res;
  for (int id = 0; id < opt.budget; ++id) {
    Assignment a;
    if (id == 0 && opt.warm_start) a = *opt.warm_start;
    else if (id < opt.random_startup + (opt.warm_start ? 1 : 0)) a = sample_uniform(space, rng);
    else a = motpe_suggest(res.trials, space, rng, opt.motpe);
    res.trials.push_back(tuner_detail::evaluate_trial(id, std::move(a), eval));
    if (opt.on_trial) opt.on_trial(res.trials.back());
  }
  res.front = pareto_front(res.trials);
  return res;
}

/// Uniform random search with the same trial bookkeeping.
inline TunerResult run_random_search(const TrialEvaluator& eval, const ParamSpace& space, int budget,
                                     std::uint64_t seed) {
  space.validate();
  Rng rng(seed);
  TunerResult res;
  for (int id = 0; id < budget; ++id)
    res.trials.push_back(tuner_detail::evaluate_trial(id, sample_uniform(space, rng), eval));
  res.front = pareto_front(res.trials);
  return res;
}

// ---------------------------------------------------------------- distill

struct KMeansResult {
  std::vector<int> labels;
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
};

/// Lloyd's k-means with k-means++ seeding; best of `restarts` runs.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& x, int k, std::uint64_t seed,
                           int restarts = 50, int max_iter = 100) {
  const std::size_t n = x.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw ConfigError("k-means needs 1 <= k <= n");
  const std::size_t dim = x[0].size();
  auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
    return s;
  };
  Rng rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    std::vector<std::vector<double>> c{x[rng.index(n)]};
    std::vector<double> dmin(n);
    while (static_cast<int>(c.size()) < k) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        dmin[i] = std::numeric_limits<double>::infinity();
        for (const auto& cc : c) dmin[i] = std::min(dmin[i], dist2(x[i], cc));
        total += dmin[i];
      }
      std::size_t pick = rng.index(n);
      if (total > 0.0) {
        double u = rng.uniform() * total;
        for (std::size_t i = 0; i < n; ++i) {
          u -= dmin[i];
          if (u <= 0.0 && dmin[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
      c.push_back(x[pick]);
    }
    std::vector<int> label(n, -1);
    for (int it = 0; it < max_iter; ++it) {
      bool changed = false;
      for (std::size_t i = 0; i < n; ++i) {
        int arg = 0;
        double bd = dist2(x[i], c[0]);
        for (int j = 1; j < k; ++j)
          if (const double d = dist2(x[i], c[j]); d < bd) bd = d, arg = j;
        if (label[i] != arg) label[i] = arg, changed = true;
      }
      std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
      std::vector<int> cnt(k, 0);
      for (std::size_t i = 0; i < n; ++i) {
        ++cnt[label[i]];
        for (std::size_t d = 0; d < dim; ++d) sum[label[i]][d] += x[i][d];
      }
      for (int j = 0; j < k; ++j) {
        if (cnt[j] == 0) continue;  // keep the old centroid
        for (std::size_t d = 0; d < dim; ++d) c[j][d] = sum[j][d] / cnt[j];
      }
      if (!changed && it > 0) break;
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) inertia += dist2(x[i], c[label[i]]);
    if (inertia < best.inertia) best = {label, c, inertia};
  }
  return best;
}

/// Representatives of the front: min-max normalize, k-means, and keep the
/// member nearest each centroid. Returns sorted indices into `objectives`.
inline std::vector<std::size_t> distill(const std::vector<std::vector<double>>& objectives, int k,
                                        std::uint64_t seed = 1) {
  const std::size_t n = objectives.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (k < 1) throw ConfigError("distill needs k >= 1");
  if (static_cast<std::size_t>(k) >= n) return all;
  const std::size_t dim = objectives[0].size();
  std::vector<std::vector<double>> x = objectives;
  for (std::size_t d = 0; d < dim; ++d) {
    double lo = x[0][d], hi = x[0][d];
    for (const auto& p : x) lo = std::min(lo, p[d]), hi = std::max(hi, p[d]);
    for (auto& p : x) p[d] = hi > lo ? (p[d] - lo) / (hi - lo) : 0.0;
  }
  const KMeansResult km = kmeans(x, k, seed);
  std::vector<std::size_t> reps;
  for (int j = 0; j < k; ++j) {
    std::size_t arg = n;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (km.labels[i] != j) continue;
      double s = 0.0;
      for (std::size_t d = 0; d < dim; ++d) s += (x[i][d] - km.centroids[j][d]) * (x[i][d] - km.centroids[j][d]);
      if (s < bd) bd = s, arg = i;
    }
    if (arg < n) reps.push_back(arg);
  }
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  return reps;
}

}  // namespace gsplace
