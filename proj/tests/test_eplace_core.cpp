#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"

using namespace gsplace;
using namespace gsplace::testing;

namespace {

/// Naive O(n^4) cosine analysis on bin centers: a_uv with
/// f_ij = Σ a_uv cos(πu(i+½)/nx) cos(πv(j+½)/ny).
std::vector<double> naive_cosine_coeffs(const std::vector<double>& f, int nx, int ny) {
  std::vector<double> a(f.size(), 0.0);
  for (int v = 0; v < ny; ++v)
    for (int u = 0; u < nx; ++u) {
      double s = 0.0;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          s += f[static_cast<std::size_t>(j * nx + i)] * std::cos(std::numbers::pi * u * (i + 0.5) / nx) *
               std::cos(std::numbers::pi * v * (j + 0.5) / ny);
      a[static_cast<std::size_t>(v * nx + u)] = s * (u ? 2.0 : 1.0) / nx * (v ? 2.0 : 1.0) / ny;
    }
  return a;
}

/// Random netlist of cells with random multi-pin nets in a 100x100 region.
Netlist random_cells(Rng& rng, int cells, int nets, int max_degree) {
  std::vector<Instance> inst;
  for (int i = 0; i < cells; ++i)
    inst.push_back(cell("c" + std::to_string(i), rng.uniform(0.5, 4), rng.uniform(0.5, 4), rng.uniform(5, 90),
                        rng.uniform(5, 90)));
  std::vector<Net> ns;
  for (int e = 0; e < nets; ++e) {
    std::vector<Pin> pins;
    const int deg = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(max_degree - 1)));
    for (int k = 0; k < deg; ++k) {
      const std::size_t c = rng.index(static_cast<std::size_t>(cells));
      pins.push_back({c, rng.uniform(0, inst[c].width), rng.uniform(0, inst[c].height)});
    }
    ns.push_back(net("n" + std::to_string(e), pins, rng.uniform(0.5, 2)));
  }
  return Netlist(std::move(inst), std::move(ns), {0, 0, 100, 100});
}

}  // namespace

// ---- wirelength ----

TEST(Wirelength, TwoPinClosedForm) {
  const Netlist nl({cell("a", 0, 0, 0, 0), cell("b", 0, 0, 1, 0)}, {net("n", {{0, 0, 0}, {1, 0, 0}})},
                   {-5, -5, 5, 5});
  const double w = WirelengthEvaluator(nl).evaluate(nl.initial_positions(), 0.1, WirelengthModel::kWA, nullptr);
  EXPECT_NEAR(w, std::tanh(5.0), 1e-12);
  EXPECT_NEAR(w, 0.99991, 1e-5);
}

TEST(Wirelength, CoincidentPinsZero) {
  const Netlist nl({cell("a", 1, 1, 3, 3), cell("b", 1, 1, 3, 3)}, {net("n", {{0, 0.5, 0.5}, {1, 0.5, 0.5}})},
                   {0, 0, 10, 10});
  for (auto model : {WirelengthModel::kWA, WirelengthModel::kLSE}) {
    const WirelengthResult r = wa_wirelength_and_grad(nl, nl.initial_positions(), 0.5, model);
    if (model == WirelengthModel::kWA) { EXPECT_NEAR(r.value, 0.0, 1e-15); }
    for (const Point& g : r.grad) {
      EXPECT_NEAR(g.x, 0.0, 1e-15);
      EXPECT_NEAR(g.y, 0.0, 1e-15);
    }
  }
}

TEST(Wirelength, SinglePinNetContributesNothing) {
  const Netlist nl({cell("a", 1, 1, 3, 3)}, {net("n", {{0, 0.5, 0.5}})}, {0, 0, 10, 10});
  const WirelengthResult r = wa_wirelength_and_grad(nl, nl.initial_positions(), 1.0);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.grad[0].x, 0.0);
}

TEST(Wirelength, GradientMatchesCentralDifferences) {
  Rng rng(41);
  for (auto model : {WirelengthModel::kWA, WirelengthModel::kLSE}) {
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      // one random net of up to 30 pins over a handful of cells
      const Netlist nl = random_cells(rng, 12, 1, 30);
      auto pos = nl.initial_positions();
      const double gamma = rng.uniform(0.5, 5.0);
      WirelengthEvaluator ev(nl);
      std::vector<Point> grad;
      ev.evaluate(pos, gamma, model, &grad);
      const double h = 1e-6 * 100.0;
      double gmax = 0.0;
      for (const Point& g : grad) gmax = std::max({gmax, std::abs(g.x), std::abs(g.y)});
      for (std::size_t i = 0; i < nl.size(); ++i)
        for (int axis = 0; axis < 2; ++axis) {
          double& c = axis ? pos[i].y : pos[i].x;
          const double c0 = c;
          c = c0 + h;
          const double fp = ev.evaluate(pos, gamma, model, nullptr);
          c = c0 - h;
          const double fm = ev.evaluate(pos, gamma, model, nullptr);
          c = c0;
          const double fd = (fp - fm) / (2 * h), an = axis ? grad[i].y : grad[i].x;
          worst = std::max(worst, std::abs(fd - an) / std::max(gmax, 1e-12));
        }
    }
    EXPECT_LE(worst, 1e-5) << to_string(model);
  }
}

TEST(Wirelength, UnderestimatesHpwlAndTightensAsGammaShrinks) {
  Rng rng(42);
  for (int t = 0; t < 100; ++t) {
    const Netlist nl = random_cells(rng, 10, 1, 8);
    const auto pos = nl.initial_positions();
    WirelengthEvaluator ev(nl);
    const double h = hpwl(nl, pos);
    const double w_small = ev.evaluate(pos, 0.5, WirelengthModel::kWA, nullptr);
    const double w_big = ev.evaluate(pos, 4.0, WirelengthModel::kWA, nullptr);
    EXPECT_LE(w_small, h * (1 + 1e-12));
    EXPECT_LE(w_big, w_small * (1 + 1e-12));
    EXPECT_GE(ev.evaluate(pos, 0.5, WirelengthModel::kLSE, nullptr), h * (1 - 1e-12));
  }
}

// ---- density ----

TEST(SmoothedDensity, EmptyIsZero) {
  const Netlist nl({}, {}, {0, 0, 16, 16});
  const DensityGrid dg = smoothed_density(nl, {}, BinGrid(nl.region(), 8, 8), ScheduleSpec{}, 0, 0.9);
  for (double r : dg.rho) EXPECT_EQ(r, 0.0);
}

TEST(SmoothedDensity, SingleCellMass) {
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const double w = rng.uniform(0.1, 5), h = rng.uniform(0.1, 5);
    // lower-left at least one bin from the walls so the dilated kernel stays inside
    const Netlist nl({cell("a", w, h, rng.uniform(1.25, 18 - w), rng.uniform(1.25, 18 - h))}, {}, {0, 0, 20, 20});
    const DensityGrid dg =
        smoothed_density(nl, nl.initial_positions(), BinGrid(nl.region(), 16, 16), ScheduleSpec{}, 0, 0.9);
    EXPECT_NEAR(dg.total_area(), w * h, 1e-9);
  }
}

TEST(SmoothedDensity, SnappedMacroIsExactRectangle) {
  const Netlist nl({fixed_macro("m", 7.3, 5.1, 3.3, 6.6)}, {}, {0, 0, 20, 20});
  const BinGrid g(nl.region(), 16, 16);
  ScheduleSpec s;
  const DensityGrid dg = smoothed_density(nl, nl.initial_positions(), g, s, s.snap_iteration(), 0.9);
  DensityGrid ref(g);
  accumulate_rect(ref, 3.3, 6.6, 3.3 + 7.3, 6.6 + 5.1, 0.9);
  for (std::size_t b = 0; b < dg.rho.size(); ++b) EXPECT_NEAR(dg.rho[b], ref.rho[b], 1e-6);
}

TEST(DensityGradient, BilinearZeroCases) {
  const Netlist nl({cell("a", 1, 1, 3, 3), cell("z", 0, 0, 5, 5)}, {}, {0, 0, 16, 16});
  const BinGrid g(nl.region(), 8, 8);
  PoissonSolution zero;
  zero.ex.assign(64, 0.0);
  zero.ey.assign(64, 0.0);
  for (const Point& p : density_gradient_bilinear(nl, g, zero, centers_of(nl, nl.initial_positions())))
    EXPECT_EQ(p.x, 0.0);
  PoissonSolution one;
  one.ex.assign(64, 1.0);
  one.ey.assign(64, -2.0);
  const auto gr = density_gradient_bilinear(nl, g, one, centers_of(nl, nl.initial_positions()));
  EXPECT_DOUBLE_EQ(gr[0].x, 1.0);
  EXPECT_DOUBLE_EQ(gr[0].y, -2.0);
  EXPECT_EQ(gr[1].x, 0.0);
}

TEST(DensityGradient, MatchesFiniteDifferenceOfEnergy) {
  Rng rng(44);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Instance> inst;
    for (int i = 0; i < 60; ++i)
      inst.push_back(cell("c", rng.uniform(1, 8), rng.uniform(1, 8), rng.uniform(8, 84), rng.uniform(8, 84)));
    inst.push_back(fixed_macro("m", 20, 15, 40, 40));
    const Netlist nl(std::move(inst), {}, {0, 0, 100, 100});
    const BinGrid g(nl.region(), 16, 16);
    DensityModel model(nl, g, 0.9, ScheduleSpec{});
    const PoissonSolver solver(g);
    auto centers = centers_of(nl, nl.initial_positions());
    const int t = 100;
    auto energy = [&](const std::vector<Point>& c) {
      const DensityGrid dg = model.total_density(c, t);
      return model.energy(dg, solver.solve(dg.rho, 0.9));
    };
    const DensityGrid dg = model.total_density(centers, t);
    const auto grad = model.gradient(centers, solver.solve(dg.rho, 0.9));
    const double h = 1e-4 * g.bin_w();
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i + 1 < nl.size(); ++i)
      for (int axis = 0; axis < 2; ++axis) {
        double& c = axis ? centers[i].y : centers[i].x;
        const double c0 = c;
        c = c0 + h;
        const double ep = energy(centers);
        c = c0 - h;
        const double em = energy(centers);
        c = c0;
        const double fd = (ep - em) / (2 * h), an = axis ? grad[i].y : grad[i].x;
        err = std::max(err, std::abs(fd - an));
        scale = std::max(scale, std::abs(fd));
      }
    EXPECT_LE(err / scale, 5e-3);
  }
}

TEST(DensityGradient, ScheduleContinuity) {
  // T·max_b |Δρ_b(t+1) − Δρ_b(t)| for one macro under default schedules;
  // bounds are the measured values with 10% headroom
  const Netlist nl({fixed_macro("m", 30, 20, 30, 40)}, {}, {0, 0, 100, 100});
  const BinGrid g(nl.region(), 32, 32);
  for (auto [m, bound] : {std::pair{ScheduleModel::kGaussian, 60.0}, {ScheduleModel::kExponential, 41.0},
                          {ScheduleModel::kLinear, 3.3}, {ScheduleModel::kSigmoid, 5.0}}) {
    ScheduleSpec s;
    s.model = m;
    DensityModel model(nl, g, 0.9, s);
    std::vector<double> prev = model.fixed_density(0).rho;
    double worst = 0.0;
    for (int t = 1; t < s.snap_iteration(); ++t) {
      const std::vector<double> cur = model.fixed_density(t).rho;
      for (std::size_t b = 0; b < cur.size(); ++b) worst = std::max(worst, std::abs(cur[b] - prev[b]));
      prev = cur;
    }
    EXPECT_LE(worst * s.horizon, bound) << to_string(m);
  }
}

// ---- Poisson ----

TEST(Poisson, UniformAtTargetIsZero) {
  const BinGrid g({0, 0, 10, 10}, 8, 8);
  const PoissonSolution s = poisson_solve(g, std::vector<double>(64, 0.7), 0.7);
  for (std::size_t b = 0; b < 64; ++b) {
    EXPECT_EQ(s.phi[b], 0.0);
    EXPECT_EQ(s.ex[b], 0.0);
    EXPECT_EQ(s.ey[b], 0.0);
  }
}

TEST(Poisson, SpectralResidualAgainstNaiveTransform) {
  Rng rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    const int nx = 8 + static_cast<int>(rng.index(17)), ny = 8 + static_cast<int>(rng.index(17));
    const double lx = rng.uniform(5, 200), ly = rng.uniform(5, 200), eps = rng.uniform(0.5, 2);
    const BinGrid g({0, 0, lx, ly}, nx, ny);
    std::vector<double> rho(static_cast<std::size_t>(nx * ny));
    double rmax = 0.0, mean = 0.0;
    for (double& r : rho) r = rng.uniform(0, 2), rmax = std::max(rmax, r), mean += r;
    mean /= static_cast<double>(rho.size());
    const PoissonSolution s = poisson_solve(g, rho, 0.9, eps);
    // ∇²φ evaluated spectrally from an independent transform of φ
    const auto a = naive_cosine_coeffs(s.phi, nx, ny);
    std::vector<double> lap_hat(a.size());
    for (int v = 0; v < ny; ++v)
      for (int u = 0; u < nx; ++u) {
        const double wx = std::numbers::pi * u / lx, wy = std::numbers::pi * v / ly;
        lap_hat[static_cast<std::size_t>(v * nx + u)] = -(wx * wx + wy * wy) * a[static_cast<std::size_t>(v * nx + u)];
      }
    double worst = 0.0;
    for (int j = 1; j + 1 < ny; ++j)
      for (int i = 1; i + 1 < nx; ++i) {
        double lap = 0.0;
        for (int v = 0; v < ny; ++v)
          for (int u = 0; u < nx; ++u)
            lap += lap_hat[static_cast<std::size_t>(v * nx + u)] * std::cos(std::numbers::pi * u * (i + 0.5) / nx) *
                   std::cos(std::numbers::pi * v * (j + 0.5) / ny);
        const std::size_t b = static_cast<std::size_t>(j * nx + i);
        worst = std::max(worst, std::abs(lap + (rho[b] - 0.9 - (mean - 0.9)) / eps));
      }
    EXPECT_LE(worst, 1e-6 * rmax) << nx << "x" << ny;
  }
}

TEST(Poisson, SingleModeRecovery) {
  for (auto [nx, ny, lx, ly] : {std::tuple{16, 16, 10.0, 10.0}, {32, 8, 100.0, 7.0}, {9, 13, 3.0, 50.0}}) {
    const BinGrid g({0, 0, lx, ly}, nx, ny);
    const double eps = 1.7, w = std::numbers::pi / lx;
    std::vector<double> rho(static_cast<std::size_t>(nx * ny));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) rho[static_cast<std::size_t>(j * nx + i)] = 0.5 + std::cos(w * g.bin_w() * (i + 0.5));
    const PoissonSolution s = poisson_solve(g, rho, 0.5, eps);
    double err = 0.0, ferr = 0.0;
    const double amp = 1.0 / (eps * w * w);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double x = g.bin_w() * (i + 0.5);
        const std::size_t b = static_cast<std::size_t>(j * nx + i);
        err = std::max(err, std::abs(s.phi[b] - amp * std::cos(w * x)));
        ferr = std::max(ferr, std::abs(s.ex[b] + amp * w * std::sin(w * x)) + std::abs(s.ey[b]));
      }
    EXPECT_LE(err, 1e-8 * amp);
    EXPECT_LE(ferr, 1e-8 * amp * w);
  }
}

TEST(Poisson, Linearity) {
  Rng rng(46);
  const BinGrid g({0, 0, 30, 20}, 16, 12);
  std::vector<double> r1(192), r2(192), mix(192);
  for (std::size_t b = 0; b < 192; ++b) r1[b] = rng.uniform(0, 1), r2[b] = rng.uniform(0, 1);
  const double a = 1.7, c = -0.6;
  for (std::size_t b = 0; b < 192; ++b) mix[b] = a * r1[b] + c * r2[b];
  const auto s1 = poisson_solve(g, r1, 0.0), s2 = poisson_solve(g, r2, 0.0), sm = poisson_solve(g, mix, 0.0);
  for (std::size_t b = 0; b < 192; ++b) {
    EXPECT_NEAR(sm.phi[b], a * s1.phi[b] + c * s2.phi[b], 1e-10);
    EXPECT_NEAR(sm.ex[b], a * s1.ex[b] + c * s2.ex[b], 1e-10);
  }
}

TEST(Poisson, RejectsTinyGrid) { EXPECT_THROW(PoissonSolver(BinGrid({0, 0, 1, 1}, 1, 4)), ConfigError); }

// ---- placer ----

TEST(Placer, WirelengthOnlyConvergesToFixedPin) {
  // 2x2 cell on a 1x1-bin grid with target 0.5: overflow never reaches the stop
  // threshold without density force, so the run is wirelength-only
  const Netlist nl({cell("a", 2, 2, 3, 12), io_pin("p", 11, 5)}, {net("n", {{0, 1, 1}, {1, 0, 0}})},
                   {0, 0, 16, 16});
  PlacerConfig cfg;
  cfg.density_weight = 0.0;
  cfg.target_density = 0.5;
  cfg.bins_x = cfg.bins_y = 16;
  cfg.max_iterations = 400;
  ScheduleSpec s;
  s.model = ScheduleModel::kHard;
  const PlacementResult r = run_global_placement(nl, nl.initial_positions(), cfg, s);
  EXPECT_GT(r.iterations, 0);
  EXPECT_NEAR(r.positions[0].x + 1, 11.0, 1e-3 * 16);
  EXPECT_NEAR(r.positions[0].y + 1, 5.0, 1e-3 * 16);
  for (const auto& it : r.trace) EXPECT_EQ(it.lambda, 0.0);
}

TEST(Placer, FeasibleStartReturnsImmediately) {
  std::vector<Instance> inst;
  for (int i = 0; i < 16; ++i) inst.push_back(cell("c", 1, 1, 4.0 * (i % 4) + 1.5, 4.0 * (i / 4) + 1.5));
  const Netlist nl(std::move(inst), {net("n", {{0, 0, 0}, {5, 0, 0}})}, {0, 0, 16, 16});
  const PlacementResult r = run_global_placement(nl, nl.initial_positions(), PlacerConfig{}, ScheduleSpec{});
  EXPECT_EQ(r.iterations, 0);
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.stop, StopReason::kOverflowReached);
}

TEST(Placer, SyntheticRunReachesOverflowTarget) {
  const DesignBundle d = generate_synthetic({});
  const Netlist& nl = d.netlist;
  InitConfig ic;
  const auto init = gsp_initialize(nl, ic).positions;
  PlacerConfig cfg;
  const PlacementResult r = run_global_placement(nl, init, cfg, ScheduleSpec{});
  ASSERT_FALSE(r.trace.empty());
  EXPECT_EQ(r.stop, StopReason::kOverflowReached);
  EXPECT_LE(r.trace.back().overflow, cfg.stop_overflow);
  EXPECT_EQ(static_cast<int>(r.trace.size()), r.iterations);
  for (const auto& it : r.trace) {
    EXPECT_TRUE(std::isfinite(it.objective));
    EXPECT_GT(it.lambda, 0.0);
  }
  for (std::size_t i = 0; i < nl.size(); ++i) {
    if (nl.instance(i).fixed()) {
      EXPECT_EQ(r.positions[i].x, nl.instance(i).position.x);
      continue;
    }
    EXPECT_GE(r.positions[i].x, nl.region().xmin - 1e-9);
    EXPECT_LE(r.positions[i].x + nl.instance(i).width, nl.region().xmax + 1e-9);
  }
  EXPECT_LE(r.trace.back().hpwl, r.trace.front().hpwl);
}

TEST(Placer, ConfigValidation) {
  PlacerConfig cfg;
  cfg.stop_overflow = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.gamma = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = {};
  cfg.density_weight = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Placer, LambdaMultiplierRule) {
  EXPECT_DOUBLE_EQ(density_weight_multiplier(0.0, 10.0, 0.95, 1.05), 1.05);
  EXPECT_DOUBLE_EQ(density_weight_multiplier(10.0, 10.0, 0.95, 1.05), 1.0);
  EXPECT_DOUBLE_EQ(density_weight_multiplier(1e6, 10.0, 0.95, 1.05), 0.95);
  EXPECT_DOUBLE_EQ(density_weight_multiplier(-1e6, 10.0, 0.95, 1.05), 1.05);
}
