#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <tuple>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/netlist.hpp"

namespace gsplace {

/// Two-channel (x, y) signal over graph nodes.
struct GraphSignal {
  std::vector<double> x;
  std::vector<double> y;

  GraphSignal() = default;
  explicit GraphSignal(std::size_t n) : x(n, 0.0), y(n, 0.0) {}

  std::size_t size() const noexcept { return x.size(); }
  std::vector<double>& channel(int c) { return c == 0 ? x : y; }
  const std::vector<double>& channel(int c) const { return c == 0 ? x : y; }
};

struct WeightedEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 0.0;
};

/// Compressed sparse row matrix. Used for Laplacians and adjacency operators.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col;
  std::vector<double> val;

  void multiply(const std::vector<double>& in, std::vector<double>& out) const {
    out.assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double s = 0.0;
      for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += val[p] * in[col[p]];
      out[r] = s;
    }
  }

  double at(std::size_t r, std::size_t c) const {
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p)
      if (col[p] == c) return val[p];
    return 0.0;
  }
};

/// Symmetric weighted graph whose weights may be negative. Both directions of
/// every undirected edge are stored; self-edges are never stored.
class SignedGraph {
 public:
  SignedGraph() : row_ptr_{0} {}

  /// Builds from an undirected edge list; parallel edges are summed, self-edges
  /// and edges that cancel to exactly zero are dropped.
  SignedGraph(std::size_t n, std::vector<WeightedEdge> edges, std::vector<std::uint8_t> fixed = {},
              std::vector<std::uint8_t> is_virtual = {})
      : n_(n), fixed_(std::move(fixed)), virtual_(std::move(is_virtual)) {
    fixed_.resize(n_, 0);
    virtual_.resize(n_, 0);
    std::vector<WeightedEdge> dir;
    dir.reserve(2 * edges.size());
    for (const auto& e : edges) {
      if (e.i >= n_ || e.j >= n_) throw Error("graph edge endpoint out of range");
      if (!std::isfinite(e.w)) throw Error("graph edge weight is not finite");
      if (e.i == e.j) continue;
      dir.push_back({e.i, e.j, e.w});
      dir.push_back({e.j, e.i, e.w});
    }
    std::sort(dir.begin(), dir.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    row_ptr_.assign(n_ + 1, 0);
    for (std::size_t p = 0; p < dir.size();) {
      std::size_t q = p;
      double w = 0.0;
      while (q < dir.size() && dir[q].i == dir[p].i && dir[q].j == dir[p].j) w += dir[q++].w;
      if (w != 0.0) {
        col_.push_back(dir[p].j);
        w_.push_back(w);
        ++row_ptr_[dir[p].i + 1];
      }
      p = q;
    }
    for (std::size_t r = 0; r < n_; ++r) row_ptr_[r + 1] += row_ptr_[r];
  }

  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return w_.size() / 2; }
  bool fixed(std::size_t i) const { return fixed_[i] != 0; }
  bool is_virtual(std::size_t i) const { return virtual_[i] != 0; }
  const std::vector<std::uint8_t>& fixed_flags() const noexcept { return fixed_; }

  std::size_t row_begin(std::size_t i) const { return row_ptr_[i]; }
  std::size_t row_end(std::size_t i) const { return row_ptr_[i + 1]; }
  std::size_t neighbor(std::size_t p) const { return col_[p]; }
  double weight(std::size_t p) const { return w_[p]; }

  double weight_between(std::size_t i, std::size_t j) const {
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
      if (col_[p] == j) return w_[p];
    return 0.0;
  }

  /// Each undirected edge once, with i < j.
  std::vector<WeightedEdge> edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
        if (i < col_[p]) out.push_back({i, col_[p], w_[p]});
    return out;
  }

  /// Text dump of the edge list, one "i j w" line per undirected edge.
  void dump(std::ostream& os) const {
    os.precision(17);
    for (const auto& e : edges()) os << e.i << ' ' << e.j << ' ' << e.w << '\n';
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> w_;
  std::vector<std::uint8_t> fixed_;
  std::vector<std::uint8_t> virtual_;
};

enum class NetModel { kClique };

inline constexpr int kDefaultMaxNetDegree = 100;

/// Unmerged clique pairs of every net with 2 <= pins <= max_degree, weighted
/// net.weight * 2 / pins. Pairs whose pins sit on the same instance are dropped.
/// `pin_node(net_index, pin_index)` maps a pin to its graph node.
template <typename PinNode>
std::vector<WeightedEdge> clique_pairs(const Netlist& nl, int max_degree, PinNode&& pin_node) {
  std::vector<WeightedEdge> pairs;
  const auto& nets = nl.nets();
  for (std::size_t n = 0; n < nets.size(); ++n) {
    const Net& net = nets[n];
    const std::size_t p = net.pins.size();
    if (p < 2 || p > static_cast<std::size_t>(max_degree)) continue;
    const double w = net.weight * 2.0 / static_cast<double>(p);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a + 1; b < p; ++b) {
        if (net.pins[a].instance == net.pins[b].instance) continue;
        pairs.push_back({pin_node(n, a), pin_node(n, b), w});
      }
  }
  return pairs;
}

/// Instance graph: one node per instance, clique net model.
inline SignedGraph build_instance_graph(const Netlist& nl, NetModel model = NetModel::kClique,
                                        int max_degree = kDefaultMaxNetDegree) {
  (void)model;
  auto pairs = clique_pairs(nl, max_degree, [&](std::size_t n, std::size_t a) {
    return nl.nets()[n].pins[a].instance;
  });
  std::vector<std::uint8_t> fixed(nl.size());
  for (std::size_t i = 0; i < nl.size(); ++i) fixed[i] = nl.instance(i).fixed() ? 1 : 0;
  return SignedGraph(nl.size(), std::move(pairs), std::move(fixed));
}

/// Laplacian quadratic form sum_{(i,j)} w_ij (g_j - g_i)^2, per channel.
inline std::array<double, 2> smoothness(const SignedGraph& g, const GraphSignal& s) {
  std::array<double, 2> out{0.0, 0.0};
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (std::size_t p = g.row_begin(i); p < g.row_end(i); ++p) {
      const std::size_t j = g.neighbor(p);
      if (j <= i) continue;
      const double dx = s.x[j] - s.x[i], dy = s.y[j] - s.y[i];
      out[0] += g.weight(p) * dx * dx;
      out[1] += g.weight(p) * dy * dy;
    }
  return out;
}

/// Number of edges whose endpoint values have strictly opposite signs.
inline std::size_t zero_crossings(const SignedGraph& g, const std::vector<double>& values) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    for (std::size_t p = g.row_begin(i); p < g.row_end(i); ++p) {
      const std::size_t j = g.neighbor(p);
      if (j > i && values[i] * values[j] < 0.0) ++count;
    }
  return count;
}

/// Ã_σ = D_σ^{-1/2} (A + σI) D_σ^{-1/2}, D_σ the row sums of |A| + σI.
inline SparseMatrix augmented_normalized_adjacency(const SignedGraph& g, double sigma) {
  if (sigma < 0.0) throw ConfigError("self-loop coefficient sigma must be >= 0");
  const std::size_t n = g.node_count();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = sigma;
    for (std::size_t p = g.row_begin(i); p < g.row_end(i); ++p) d += std::abs(g.weight(p));
    if (!(d > 0.0))
      throw ConfigError("node " + std::to_string(i) +
                        " has zero degree; use a self-loop coefficient sigma > 0");
    inv_sqrt[i] = 1.0 / std::sqrt(d);
  }
  SparseMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    bool diag_done = sigma == 0.0;
    for (std::size_t p = g.row_begin(i); p < g.row_end(i); ++p) {
      const std::size_t j = g.neighbor(p);
      if (!diag_done && j > i) {
        m.col.push_back(i);
        m.val.push_back(sigma * inv_sqrt[i] * inv_sqrt[i]);
        diag_done = true;
      }
      m.col.push_back(j);
      m.val.push_back(g.weight(p) * inv_sqrt[i] * inv_sqrt[j]);
    }
    if (!diag_done) {
      m.col.push_back(i);
      m.val.push_back(sigma * inv_sqrt[i] * inv_sqrt[i]);
    }
    m.row_ptr[i + 1] = m.col.size();
  }
  return m;
}

/// Applies `op` k times to each channel.
inline GraphSignal apply_power(const SparseMatrix& op, int k, const GraphSignal& s) {
  GraphSignal out = s;
  std::vector<double> tmp;
  for (int c = 0; c < 2; ++c) {
    auto& ch = out.channel(c);
    for (int it = 0; it < k; ++it) {
      op.multiply(ch, tmp);
      ch.swap(tmp);
    }
  }
  return out;
}

/// Ã_σ^k g by k successive sparse products.
inline GraphSignal apply_augmented_adjacency(const SignedGraph& g, double sigma, int k,
                                             const GraphSignal& s) {
  if (k < 0) throw ConfigError("filter power k must be >= 0");
  return apply_power(augmented_normalized_adjacency(g, sigma), k, s);
}

struct FilterBand {
  double sigma = 0.0;
  int k = 1;
  double alpha = 0.0;
};

/// Low/mid/high blend of augmented-adjacency powers; weights sum to one.
struct BandFilterSpec {
  FilterBand low{4.0, 4, 0.5};
  FilterBand mid{4.0, 2, 0.3};
  FilterBand high{2.0, 2, 0.2};

  /// Builds a spec whose high weight is 1 - low - mid.
  static BandFilterSpec from_effects(double low_effect, double mid_effect, FilterBand low_band,
                                     FilterBand mid_band, FilterBand high_band) {
    BandFilterSpec s;
    s.low = low_band;
    s.mid = mid_band;
    s.high = high_band;
    s.low.alpha = low_effect;
    s.mid.alpha = mid_effect;
    s.high.alpha = 1.0 - low_effect - mid_effect;
    s.validate();
    return s;
  }

  void validate() const {
    for (const FilterBand* b : {&low, &mid, &high}) {
      if (b->sigma < 0.0) throw ConfigError("filter sigma must be >= 0");
      if (b->k < 1) throw ConfigError("filter power k must be >= 1");
      if (b->alpha < -1e-12) throw ConfigError("filter mixing weight must be >= 0");
    }
    if (std::abs(low.alpha + mid.alpha + high.alpha - 1.0) > 1e-9)
      throw ConfigError("filter mixing weights must sum to 1");
  }
};

inline GraphSignal apply_band_filter(const SignedGraph& g, const BandFilterSpec& spec,
                                     const GraphSignal& s) {
  spec.validate();
  GraphSignal out(s.size());
  for (const FilterBand* b : {&spec.low, &spec.mid, &spec.high}) {
    if (b->alpha == 0.0) continue;
    const GraphSignal part = apply_augmented_adjacency(g, b->sigma, b->k, s);
    for (std::size_t i = 0; i < s.size(); ++i) {
      out.x[i] += b->alpha * part.x[i];
      out.y[i] += b->alpha * part.y[i];
    }
  }
  return out;
}

/// L = D - A with signed degrees D_ii = sum_j w_ij.
inline SparseMatrix signed_laplacian(const SignedGraph& g) {
  const std::size_t n = g.node_count();
  SparseMatrix m;
  m.n = n;
  m.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t p = g.row_begin(i); p < g.row_end(i); ++p) deg += g.weight(p);
    bool diag_done = false;
    for (std::size_t p = g.row_begin(i); p < g.row_end(i); ++p) {
      const std::size_t j = g.neighbor(p);
      if (!diag_done && j > i) {
        m.col.push_back(i);
        m.val.push_back(deg);
        diag_done = true;
      }
      m.col.push_back(j);
      m.val.push_back(-g.weight(p));
    }
    if (!diag_done) {
      m.col.push_back(i);
      m.val.push_back(deg);
    }
    m.row_ptr[i + 1] = m.col.size();
  }
  return m;
}

/// Gershgorin upper bound on the spectrum: max_i (L_ii + sum_{j != i} |L_ij|).
inline double gershgorin_upper(const SparseMatrix& L) {
  double up = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < L.n; ++i) {
    double r = 0.0;
    for (std::size_t p = L.row_ptr[i]; p < L.row_ptr[i + 1]; ++p)
      r += L.col[p] == i ? L.val[p] : std::abs(L.val[p]);
    up = std::max(up, r);
  }
  return L.n == 0 ? 0.0 : up;
}

}  // namespace gsplace
