#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "gsplace/error.hpp"
#include "gsplace/netlist.hpp"

namespace gsplace {

struct PoissonSolution {
  std::vector<double> phi;  ///< potential at bin centers
  std::vector<double> ex;   ///< ∂φ/∂x at bin centers
  std::vector<double> ey;   ///< ∂φ/∂y at bin centers
  double source_mean = 0.0; ///< mean of (ρ − ρ_tgt) removed before the solve
};

/// Neumann Poisson solver ∇²φ = −(ρ − ρ_tgt − mean)/ε on a bin grid, expanded in
/// the cosine basis cos(ω_u x)cos(ω_v y), ω_u = πu/L_x. Transforms are separable
/// dense products with precomputed tables, O(nx·ny·(nx+ny)) per transform.
class PoissonSolver {
 public:
  PoissonSolver(const BinGrid& grid, double epsilon = 1.0)
      : nx_(grid.nx), ny_(grid.ny), eps_(epsilon) {
    if (nx_ < 2 || ny_ < 2) throw ConfigError("Poisson grid needs at least 2 bins per axis");
    if (!(epsilon > 0.0)) throw ConfigError("Poisson scaling epsilon must be > 0");
    const double lx = grid.region.width(), ly = grid.region.height();
    build_tables(nx_, lx, cos_x_, sin_x_, omega_x_);
    build_tables(ny_, ly, cos_y_, sin_y_, omega_y_);
  }

  int nx() const noexcept { return nx_; }
  int ny() const noexcept { return ny_; }
  double omega_x(int u) const { return omega_x_[u]; }
  double omega_y(int v) const { return omega_y_[v]; }

  /// Cosine coefficients a_uv with f_ij = Σ a_uv cos(ω_u x_i) cos(ω_v y_j).
  std::vector<double> forward(const std::vector<double>& f) const {
    std::vector<double> tmp(f.size()), out(f.size());
    // along x: tmp[j][u] = Σ_i C_x[u][i] f[j][i]
    for (int j = 0; j < ny_; ++j)
      for (int u = 0; u < nx_; ++u) {
        double s = 0.0;
        const double* c = &cos_x_[static_cast<std::size_t>(u) * nx_];
        const double* row = &f[static_cast<std::size_t>(j) * nx_];
        for (int i = 0; i < nx_; ++i) s += c[i] * row[i];
        tmp[static_cast<std::size_t>(j) * nx_ + u] = s * (u == 0 ? 1.0 : 2.0) / nx_;
      }
    for (int v = 0; v < ny_; ++v) {
      const double* c = &cos_y_[static_cast<std::size_t>(v) * ny_];
      const double norm = (v == 0 ? 1.0 : 2.0) / ny_;
      double* o = &out[static_cast<std::size_t>(v) * nx_];
      for (int u = 0; u < nx_; ++u) o[u] = 0.0;
      for (int j = 0; j < ny_; ++j) {
        const double cj = c[j] * norm;
        const double* t = &tmp[static_cast<std::size_t>(j) * nx_];
        for (int u = 0; u < nx_; ++u) o[u] += cj * t[u];
      }
    }
    return out;
  }

  /// Evaluates Σ a_uv X_u(x_i) Y_v(y_j) with X, Y either cosine or sine tables.
  std::vector<double> inverse(const std::vector<double>& a, bool sin_x = false,
                              bool sin_y = false) const {
    const auto& tx = sin_x ? sin_x_ : cos_x_;
    const auto& ty = sin_y ? sin_y_ : cos_y_;
    std::vector<double> tmp(a.size(), 0.0), out(a.size());
    // along y: tmp[j][u] = Σ_v T_y[v][j] a[v][u]
    for (int v = 0; v < ny_; ++v) {
      const double* t = &ty[static_cast<std::size_t>(v) * ny_];
      const double* av = &a[static_cast<std::size_t>(v) * nx_];
      for (int j = 0; j < ny_; ++j) {
        const double c = t[j];
        if (c == 0.0) continue;
        double* o = &tmp[static_cast<std::size_t>(j) * nx_];
        for (int u = 0; u < nx_; ++u) o[u] += c * av[u];
      }
    }
    for (int j = 0; j < ny_; ++j) {
      const double* row = &tmp[static_cast<std::size_t>(j) * nx_];
      for (int i = 0; i < nx_; ++i) {
        double s = 0.0;
        for (int u = 0; u < nx_; ++u) s += tx[static_cast<std::size_t>(u) * nx_ + i] * row[u];
        out[static_cast<std::size_t>(j) * nx_ + i] = s;
      }
    }
    return out;
  }

  /// Solves for φ and E = ∇φ given bin densities ρ (row-major, y outer).
  PoissonSolution solve(const std::vector<double>& rho, double target_density) const {
    PoissonSolution sol;
    std::vector<double> f(rho.size());
    double mean = 0.0;
    for (std::size_t b = 0; b < rho.size(); ++b) {
      f[b] = rho[b] - target_density;
      mean += f[b];
    }
    mean /= static_cast<double>(rho.size());
    for (double& v : f) v -= mean;
    sol.source_mean = mean;

    const std::vector<double> a = forward(f);
    std::vector<double> phi_hat(a.size()), ex_hat(a.size()), ey_hat(a.size());
    for (int v = 0; v < ny_; ++v)
      for (int u = 0; u < nx_; ++u) {
        const std::size_t k = static_cast<std::size_t>(v) * nx_ + u;
        if (u == 0 && v == 0) {
          phi_hat[k] = ex_hat[k] = ey_hat[k] = 0.0;
          continue;
        }
        const double w2 = omega_x_[u] * omega_x_[u] + omega_y_[v] * omega_y_[v];
        phi_hat[k] = a[k] / (eps_ * w2);
        ex_hat[k] = -omega_x_[u] * phi_hat[k];
        ey_hat[k] = -omega_y_[v] * phi_hat[k];
      }
    sol.phi = inverse(phi_hat);
    sol.ex = inverse(ex_hat, true, false);
    sol.ey = inverse(ey_hat, false, true);
    return sol;
  }

 private:
  static void build_tables(int n, double length, std::vector<double>& c, std::vector<double>& s,
                           std::vector<double>& omega) {
    c.resize(static_cast<std::size_t>(n) * n);
    s.resize(c.size());
    omega.resize(n);
    for (int u = 0; u < n; ++u) {
      omega[u] = std::numbers::pi * u / length;
      for (int i = 0; i < n; ++i) {
        const double arg = std::numbers::pi * u * (i + 0.5) / n;
        c[static_cast<std::size_t>(u) * n + i] = std::cos(arg);
        s[static_cast<std::size_t>(u) * n + i] = std::sin(arg);
      }
    }
  }

  int nx_, ny_;
  double eps_;
  std::vector<double> cos_x_, sin_x_, omega_x_;
  std::vector<double> cos_y_, sin_y_, omega_y_;
};

/// One-shot solve on a grid.
inline PoissonSolution poisson_solve(const BinGrid& grid, const std::vector<double>& rho,
                                     double target_density, double epsilon = 1.0) {
  return PoissonSolver(grid, epsilon).solve(rho, target_density);
}

}  // namespace gsplace
