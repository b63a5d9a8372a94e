// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "test_util.hpp"

using namespace gsplace;
using namespace gsplace::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ------------------------------------------------------------ 1..3 spectral

Outcome spectral_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(1001);
  double worst_band = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 20 + rng.index(181);
    const SignedGraph g = random_connected(rng, n, 4.0 / static_cast<double>(n));
    const GraphSignal s = random_graph_signal(rng, n);
    const double lo = rng.uniform(0, 1), mid = rng.uniform(0, 1 - lo);
    const auto spec = BandFilterSpec::from_effects(lo, mid, {rng.uniform(0, 8), 1 + int(rng.index(6)), 0},
                                                   {rng.uniform(0, 8), 1 + int(rng.index(6)), 0},
                                                   {rng.uniform(0, 8), 1 + int(rng.index(6)), 0});
    const GraphSignal out = apply_band_filter(g, spec, s);
    for (int c = 0; c < 2; ++c) {
      Eigen::VectorXd expect = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      for (const FilterBand* b : {&spec.low, &spec.mid, &spec.high})
        expect += b->alpha * spectral_apply(dense_augmented_adjacency(g, b->sigma), to_eigen(s.channel(c)),
                                            [&](double l) { return std::pow(l, b->k); });
      worst_band = std::max(worst_band, max_rel_diff(out.channel(c), expect));
    }
  }
  double worst_hint = 0.0;
  std::size_t max_nodes = 0;
  for (int t = 0; t < 50; ++t) {
    SyntheticSpec spec;
    spec.cells = 40 + static_cast<int>(rng.index(80));
    spec.macros = 1 + static_cast<int>(rng.index(3));
    spec.seed = 2000 + static_cast<std::uint64_t>(t);
    const DesignBundle d = generate_synthetic(spec);
    InitConfig ic;
    ic.seed = static_cast<std::uint64_t>(t) + 1;
    const GraphSignal c = signal_from_positions(d.netlist, gsp_initialize(d.netlist, ic).positions);
    HintConfig hc;
    hc.bins_x = hc.bins_y = 8;
    hc.detection_ratio = 0.25;
    const HintLaplacian hl = build_hint_laplacian(d.netlist, c, hc);
    const GraphSignal lifted = hl.hint.lift(c);
    const Eigen::MatrixXd L = dense_of(hl.laplacian);
    max_nodes = std::max(max_nodes, static_cast<std::size_t>(L.rows()));
    double up = -1e300;
    for (Eigen::Index i = 0; i < L.rows(); ++i) up = std::max(up, L(i, i) + L.row(i).cwiseAbs().sum() - std::abs(L(i, i)));
    const int power = 1 + static_cast<int>(rng.index(3));
    const GraphSignal out = apply_refinement_filter(hl.laplacian, power, lifted);
    for (int ch = 0; ch < 2; ++ch) {
      const Eigen::VectorXd expect =
          spectral_apply(L, to_eigen(lifted.channel(ch)), [&](double l) { return std::pow(1.0 - l / up, power); });
      worst_hint = std::max(worst_hint, max_rel_diff(out.channel(ch), expect));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst_band <= 1e-9 && worst_hint <= 1e-9 && secs < 30.0,
          fmt("band max rel err %.2e, refinement max rel err %.2e (hint graphs up to %zu nodes), %.1f s", worst_band,
              worst_hint, max_nodes, secs)};
}

Outcome smoothness_monotone() {
  Rng rng(1002);
  int violations = 0;
  for (int t = 0; t < 50; ++t) {
    const SignedGraph g = random_connected(rng, 20 + rng.index(100), 0.08);
    const GraphSignal s = random_graph_signal(rng, g.node_count());
    for (int k = 0; k < 5; ++k) {
      const double lo = rng.uniform(0, 1), mid = rng.uniform(0, 1 - lo);
      const auto spec = BandFilterSpec::from_effects(lo, mid, {rng.uniform(0, 8), 1 + int(rng.index(6)), 0},
                                                     {rng.uniform(0, 8), 1 + int(rng.index(6)), 0},
                                                     {rng.uniform(0, 8), 1 + int(rng.index(6)), 0});
      const auto before = smoothness(g, s), after = smoothness(g, apply_band_filter(g, spec, s));
      violations += (after[0] > before[0]) + (after[1] > before[1]);
    }
  }
  return {violations == 0, fmt("%d violations over 50 graphs x 5 specs x 2 channels", violations)};
}

Outcome gershgorin() {
  Rng rng(1003);
  int violations = 0;
  double min_margin = 1e300;
  for (int t = 0; t < 100; ++t) {
    const SignedGraph g = random_graph(rng, 5 + rng.index(60), 0.25, 0.5);
    const SparseMatrix L = signed_laplacian(g);
    const Eigen::MatrixXd d = dense_of(L);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
    const double lmax = es.eigenvalues().maxCoeff();
    // the dense solver carries its own rounding; allow 1e-12 of the matrix scale
    const double tol = 1e-12 * std::max(1.0, d.cwiseAbs().maxCoeff());
    const double up = gershgorin_upper(L);
    violations += up + tol < lmax;
    min_margin = std::min(min_margin, up - lmax);
  }
  return {violations == 0, fmt("%d violations over 100 signed Laplacians (min margin %.3g)", violations, min_margin)};
}

// ------------------------------------------------------------ 4..5 schedule

template <typename F>
double gauss_legendre_2d(F f, double a, double b, double c, double d, int panels) {
  static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                               0.9061798459386640};
  static const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                               0.2369268850561891};
  const double hx = (b - a) / panels, hy = (d - c) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i)
    for (int j = 0; j < panels; ++j) {
      const double mx = a + (i + 0.5) * hx, my = c + (j + 0.5) * hy;
      for (int p = 0; p < 5; ++p)
        for (int q = 0; q < 5; ++q) total += wg[p] * wg[q] * f(mx + 0.5 * hx * xg[p], my + 0.5 * hy * xg[q]);
    }
  return total * 0.25 * hx * hy;
}

Outcome gaussian_mass() {
  const double w = 3.0, h = 2.0;
  double worst = 0.0;
  for (double eta : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double m = gauss_legendre_2d([&](double x, double y) { return rho_gaussian(eta, x, y, w, h); }, -w / 2,
                                       w / 2, -h / 2, h / 2, 80);
    worst = std::max(worst, std::abs(m / (w * h) - 1.0));
  }
  return {worst <= 1e-3, fmt("max relative mass error %.2e over eta in {0.1,0.5,1,2,10}", worst)};
}

Outcome schedule_sanity() {
  const ScheduleSpec s;
  const double T = s.horizon;
  int bad = 0;
  double eta = eta_schedule(0, T, s), sigma = sigma_schedule(0, T, s.sigma_factor), k = k_schedule(0, T, s.k_factor);
  for (int i = 1; i <= 1000; ++i) {
    const double t = T * i / 1000.0;
    const double e = eta_schedule(t, T, s), sg = sigma_schedule(t, T, s.sigma_factor), kk = k_schedule(t, T, s.k_factor);
    bad += (e > eta) + (sg < sigma) + (kk > k);
    eta = e, sigma = sg, k = kk;
  }
  const bool k_mid = k_schedule(T / 2, T, s.k_factor) == s.k_factor;
  const bool w_mid = smoothstep_weight(0.5 * (s.alpha0 + s.alpha1), s.alpha0, s.alpha1) == 0.5;
  return {bad == 0 && k_mid && w_mid,
          fmt("%d monotonicity violations at 1000 samples; k(T/2)==k_factor %s; smoothstep midpoint==0.5 %s", bad,
              k_mid ? "yes" : "no", w_mid ? "yes" : "no")};
}

// ------------------------------------------------------------ 6..7 eplace

Netlist random_net_cells(Rng& rng, int cells, int max_degree) {
  std::vector<Instance> inst;
  for (int i = 0; i < cells; ++i)
    inst.push_back(cell("c" + std::to_string(i), rng.uniform(0.5, 4), rng.uniform(0.5, 4), rng.uniform(5, 90),
                        rng.uniform(5, 90)));
  std::vector<Pin> pins;
  const int deg = 2 + static_cast<int>(rng.index(static_cast<std::size_t>(max_degree - 1)));
  for (int k = 0; k < deg; ++k) {
    const std::size_t c = rng.index(static_cast<std::size_t>(cells));
    pins.push_back({c, rng.uniform(0, inst[c].width), rng.uniform(0, inst[c].height)});
  }
  return Netlist(std::move(inst), {net("n", pins, rng.uniform(0.5, 2))}, {0, 0, 100, 100});
}

Outcome gradient_checks() {
  Rng rng(1006);
  double wa_worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Netlist nl = random_net_cells(rng, 12, 30);
    auto pos = nl.initial_positions();
    const double gamma = rng.uniform(0.5, 5.0);
    WirelengthEvaluator ev(nl);
    std::vector<Point> grad;
    ev.evaluate(pos, gamma, WirelengthModel::kWA, &grad);
    double gmax = 0.0;
    for (const Point& g : grad) gmax = std::max({gmax, std::abs(g.x), std::abs(g.y)});
    const double h = 1e-4;
    for (std::size_t i = 0; i < nl.size(); ++i)
      for (int axis = 0; axis < 2; ++axis) {
        double& c = axis ? pos[i].y : pos[i].x;
        const double c0 = c;
        c = c0 + h;
        const double fp = ev.evaluate(pos, gamma, WirelengthModel::kWA, nullptr);
        c = c0 - h;
        const double fm = ev.evaluate(pos, gamma, WirelengthModel::kWA, nullptr);
        c = c0;
        const double an = axis ? grad[i].y : grad[i].x;
        wa_worst = std::max(wa_worst, std::abs((fp - fm) / (2 * h) - an) / std::max(gmax, 1e-12));
      }
  }
  double dens_worst = 0.0;
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
        const double fd = (ep - em) / (2 * h);
        err = std::max(err, std::abs(fd - (axis ? grad[i].y : grad[i].x)));
        scale = std::max(scale, std::abs(fd));
      }
    dens_worst = std::max(dens_worst, err / scale);
  }
  return {wa_worst <= 1e-5 && dens_worst <= 5e-3,
          fmt("WA max rel err %.2e over 100 nets; density max rel err %.2e", wa_worst, dens_worst)};
}

std::vector<double> cosine_coeffs(const std::vector<double>& f, int nx, int ny) {
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

Outcome poisson_residual() {
  Rng rng(1007);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int nx = 8 + static_cast<int>(rng.index(17)), ny = 8 + static_cast<int>(rng.index(17));
    const double lx = rng.uniform(5, 200), ly = rng.uniform(5, 200), eps = rng.uniform(0.5, 2);
    const BinGrid g({0, 0, lx, ly}, nx, ny);
    std::vector<double> rho(static_cast<std::size_t>(nx * ny));
    double rmax = 0.0, mean = 0.0;
    for (double& r : rho) r = rng.uniform(0, 2), rmax = std::max(rmax, r), mean += r;
    mean /= static_cast<double>(rho.size());
    const PoissonSolution s = poisson_solve(g, rho, 0.9, eps);
    const auto a = cosine_coeffs(s.phi, nx, ny);
    double worst = 0.0;
    for (int j = 1; j + 1 < ny; ++j)
      for (int i = 1; i + 1 < nx; ++i) {
        double lap = 0.0;
        for (int v = 0; v < ny; ++v)
          for (int u = 0; u < nx; ++u) {
            const double wx = std::numbers::pi * u / lx, wy = std::numbers::pi * v / ly;
            lap -= (wx * wx + wy * wy) * a[static_cast<std::size_t>(v * nx + u)] *
                   std::cos(std::numbers::pi * u * (i + 0.5) / nx) * std::cos(std::numbers::pi * v * (j + 0.5) / ny);
          }
        const std::size_t b = static_cast<std::size_t>(j * nx + i);
        worst = std::max(worst, std::abs(lap + (rho[b] - mean) / eps));
      }
    worst_rel = std::max(worst_rel, worst / rmax);
  }
  double mode_err = 0.0;
  for (auto [nx, ny, lx, ly] : {std::tuple{16, 16, 10.0, 10.0}, {32, 8, 100.0, 7.0}, {9, 13, 3.0, 50.0}}) {
    const BinGrid g({0, 0, lx, ly}, nx, ny);
    const double eps = 1.7, w = std::numbers::pi / lx, amp = 1.0 / (eps * w * w);
    std::vector<double> rho(static_cast<std::size_t>(nx * ny));
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) rho[static_cast<std::size_t>(j * nx + i)] = 0.5 + std::cos(w * g.bin_w() * (i + 0.5));
    const PoissonSolution s = poisson_solve(g, rho, 0.5, eps);
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const double x = g.bin_w() * (i + 0.5);
        mode_err = std::max(mode_err, std::abs(s.phi[static_cast<std::size_t>(j * nx + i)] - amp * std::cos(w * x)) / amp);
      }
  }
  return {worst_rel <= 1e-6 && mode_err <= 1e-8,
          fmt("interior residual %.2e x |rho|inf over 20 grids; single-mode error %.2e", worst_rel, mode_err)};
}

// ------------------------------------------------------------ 8 refinement

int centers_inside_macros(const Netlist& nl, const std::vector<Point>& ll) {
  int n = 0;
  for (const Instance& m : nl.instances()) {
    if (m.kind != InstanceKind::kFixedMacro) continue;
    for (std::size_t i = 0; i < nl.size(); ++i) {
      if (nl.instance(i).fixed()) continue;
      const Point c = center_of(nl.instance(i), ll[i]);
      n += c.x > m.position.x && c.x < m.position.x + m.width && c.y > m.position.y && c.y < m.position.y + m.height;
    }
  }
  return n;
}

Outcome repulsion_efficacy() {
  int fewer = 0;
  std::ostringstream counts;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticSpec spec;
    spec.cells = 400;
    spec.macros = 1;
    spec.macro_size_min = spec.macro_size_max = 0.3;
    spec.macro_jitter = 0.0;
    spec.seed = seed;
    const DesignBundle d = generate_synthetic(spec);
    InitConfig ic;
    ic.seed = seed;
    const auto init = gsp_initialize(d.netlist, ic).positions;
    const RefineResult r = refine(signal_from_positions(d.netlist, init), d.netlist, HintConfig{});
    const int before = centers_inside_macros(d.netlist, init), after = centers_inside_macros(d.netlist, r.positions);
    fewer += after < before;
    counts << (seed > 1 ? " " : "") << before << "->" << after;
  }
  return {fewer >= 9, fmt("refinement reduced inside-macro count in %d/10 seeds (gsp->refined: %s)", fewer,
                          counts.str().c_str())};
}

// ------------------------------------------------------------ 9..11 end to end

struct DesignRuns {
  std::string name;
  std::vector<double> full, baseline, gaussian;
};

std::vector<DesignRuns>& e2e_runs(double* seconds) {
  static std::vector<DesignRuns> runs;
  static double secs = 0.0;
  if (runs.empty()) {
    const auto t0 = std::chrono::steady_clock::now();
    for (auto [cells, macros] : {std::pair{500, 4}, {1000, 6}, {2000, 8}, {3500, 12}, {5000, 16}}) {
      SyntheticSpec spec;
      spec.cells = cells;
      spec.macros = macros;
      spec.seed = 100 + static_cast<std::uint64_t>(cells);
      const DesignBundle d = generate_synthetic(spec);
      DesignRuns dr;
      dr.name = fmt("syn%d_m%d", cells, macros);
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RunConfig cfg;
        cfg.seed = seed;
        auto run = [&](const RunConfig& c, const FlowOptions& f) {
          const RunReport r = run_pipeline(d, c, f);
          if (!r.ok()) throw Error(dr.name + " " + f.name() + " failed in " + r.failed_stage + ": " + r.error);
          return r.hpwl;
        };
        dr.full.push_back(run(cfg, FlowOptions::full()));
        dr.baseline.push_back(run(cfg, FlowOptions::baseline()));
        RunConfig g = cfg;
        g.schedule_model = ScheduleModel::kGaussian;
        dr.gaussian.push_back(run(g, FlowOptions::full()));
      }
      runs.push_back(std::move(dr));
    }
    secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
  if (seconds) *seconds = secs;
  return runs;
}

Outcome end_to_end() {
  double secs = 0.0;
  const auto& runs = e2e_runs(&secs);
  int wins = 0;
  std::ostringstream detail;
  for (const auto& r : runs) {
    const double f = median(r.full), b = median(r.baseline);
    wins += f <= b;
    detail << " " << r.name << fmt(" %.6g/%.6g (%+.2f%%)", f, b, 100 * (f / b - 1));
  }
  return {wins >= 4 && secs < 900.0,
          fmt("full <= baseline median HPWL on %d/5 designs; suite %.0f s; full/baseline:", wins, secs) + detail.str()};
}

Outcome schedule_ablation() {
  const auto& runs = e2e_runs(nullptr);
  int wins = 0;
  std::ostringstream detail;
  for (const auto& r : runs) {
    const double e = median(r.full), g = median(r.gaussian);
    wins += e <= g;
    detail << " " << r.name << fmt(" %.6g/%.6g (%+.2f%%)", e, g, 100 * (e / g - 1));
  }
  return {wins >= 3, fmt("exp <= gaussian median HPWL on %d/5 designs; exp/gaussian:", wins) + detail.str()};
}

Outcome seed_stability() {
  const auto& runs = e2e_runs(nullptr);
  bool ok = true;
  std::ostringstream detail;
  for (const auto& r : runs) {
    std::vector<std::uint64_t> seeds(r.full.size());
    const double ra = summarize_hpwl(seeds, r.full).range_over_avg();
    ok &= ra <= 0.02;
    detail << " " << r.name << fmt(" %.2f%%", 100 * ra);
  }
  return {ok, "range/avg over 10 seeds:" + detail.str()};
}

// ------------------------------------------------------------ 12 tuner

Outcome tuner_sanity() {
  Rng rng(1012);
  bool exact = true;
  std::vector<std::vector<double>> pts(200);
  for (auto& p : pts) p = {std::floor(rng.uniform(0, 10)), std::floor(rng.uniform(0, 10)), std::floor(rng.uniform(0, 10))};
  const auto rank = pareto_rank(pts);
  // oracle: rank r = points dominated only by points of rank < r
  std::vector<int> oracle(pts.size(), -1);
  for (int r = 0;; ++r) {
    std::vector<std::size_t> layer;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (oracle[i] >= 0) continue;
      bool dom = false;
      for (std::size_t j = 0; j < pts.size() && !dom; ++j) {
        if (j == i || oracle[j] >= 0) continue;
        bool le = true, lt = false;
        for (int d = 0; d < 3; ++d) le &= pts[j][d] <= pts[i][d], lt |= pts[j][d] < pts[i][d];
        dom = le && lt;
      }
      if (!dom) layer.push_back(i);
    }
    if (layer.empty()) break;
    for (std::size_t i : layer) oracle[i] = r;
  }
  exact = rank == oracle;

  ParamSpace space;
  space.params = {ParamDesc::real("x", -10, 10)};
  auto eval = [](const Assignment& a) { return std::vector<double>{a[0] * a[0], (a[0] - 2) * (a[0] - 2)}; };
  auto front_of = [](const TunerResult& r) {
    std::vector<std::vector<double>> o;
    for (std::size_t i : r.front) o.push_back(r.trials[i].objectives);
    return o;
  };
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TunerOptions o;
    o.budget = 60;
    o.seed = seed;
    o.random_startup = 5;
    const double hm = hypervolume_2d(front_of(run_tuner(eval, space, o)), {5, 5});
    const double hr = hypervolume_2d(front_of(run_random_search(eval, space, 60, seed + 1000)), {5, 5});
    wins += hm >= hr;
  }
  return {exact && wins >= 8,
          fmt("pareto ranks %s brute force on 200 points; MOTPE hypervolume >= random in %d/10 seeds",
              exact ? "equal" : "DIFFER from", wins)};
}

// ------------------------------------------------------------ 13 parser

Outcome parser() {
  std::ostringstream detail;
  bool ok = true;
  const DesignBundle ex = parse_design(data_path("ispd_excerpt/ex.aux"));
  const bool counts = ex.netlist.size() == 8 && ex.netlist.movable_count() == 5 && ex.netlist.fixed_count() == 3 &&
                      ex.netlist.nets().size() == 3 && ex.netlist.pin_count() == 8;
  ok &= counts;
  detail << "excerpt counts " << (counts ? "exact" : "WRONG");

  int parsed = 0, located = 0, crashed = 0;
  Rng rng(1013);
  for (const auto& [dir, stem] : {std::pair<std::string, std::string>{"tiny", "tiny"}, {"ispd_excerpt", "ex"}}) {
    const fs::path work = fs::temp_directory_path() / ("gsplace_acceptance_fuzz_" + stem);
    for (const std::string ext : {".nodes", ".nets", ".pl", ".scl"}) {
      fs::remove_all(work);
      fs::create_directories(work);
      for (const auto& e : fs::directory_iterator(data_path(dir))) fs::copy_file(e.path(), work / e.path().filename());
      std::vector<std::string> base;
      {
        std::istringstream in(read_file(data_path(dir + "/" + stem + ext)));
        for (std::string l; std::getline(in, l);) base.push_back(l);
      }
      for (int v = 0; v < 60; ++v) {
        std::vector<std::string> lines = base;
        switch (v % 4) {
          case 0: lines.resize(rng.index(base.size() + 1)); break;
          case 1:
            for (std::size_t i = lines.size(); i > 1; --i) std::swap(lines[i - 1], lines[rng.index(i)]);
            break;
          case 2:
            if (!lines.empty()) lines.erase(lines.begin() + static_cast<long>(rng.index(lines.size())));
            break;
          default:
            if (!lines.empty()) {
              std::string& l = lines[rng.index(lines.size())];
              l = l.substr(0, rng.index(l.size() + 1));
            }
        }
        std::string text;
        for (const auto& l : lines) text += l + "\n";
        write_file(work / (stem + ext), text);
        try {
          parse_design(work / (stem + ".aux"));
          ++parsed;
        } catch (const Error&) {
          ++located;
        } catch (...) {
          ++crashed;
        }
      }
    }
    fs::remove_all(work);
  }
  ok &= crashed == 0;
  detail << fmt("; fuzz %d parsed / %d rejected / %d crashed", parsed, located, crashed);

  std::vector<Instance> inst;
  for (int i = 0; i < 100; ++i) inst.push_back(cell("c" + std::to_string(i), 1, 1));
  const Netlist nl(std::move(inst), {}, {0, 0, 1000, 1000});
  std::vector<Point> pos(nl.size());
  for (auto& p : pos) p = {rng.uniform(-500, 1500), rng.uniform(0, 1000)};
  const fs::path pl = fs::temp_directory_path() / "gsplace_acceptance_roundtrip.pl";
  write_pl(nl, pos, pl);
  const auto back = read_pl(nl, pl);
  fs::remove(pl);
  double worst = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i)
    worst = std::max({worst, std::abs(back[i].x - pos[i].x), std::abs(back[i].y - pos[i].y)});
  ok &= worst <= 5e-7;
  detail << fmt("; .pl round-trip max err %.2e", worst);

  if (const char* root = std::getenv("GSPLACE_ISPD2005_DIR")) {
    const fs::path aux = fs::path(root) / "adaptec1" / "adaptec1.aux";
    if (fs::exists(aux)) {
      const DesignBundle a = parse_design(aux);
      const bool exact = a.netlist.movable_count() == 211447 && a.netlist.fixed_count() == 543;
      ok &= exact;
      detail << fmt("; adaptec1 %zu movable / %zu fixed", a.netlist.movable_count(), a.netlist.fixed_count());
    }
  } else {
    detail << "; adaptec1 not supplied";
  }
  return {ok, detail.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"spectral oracle equivalence", spectral_oracle},
      {"smoothness monotonicity", smoothness_monotone},
      {"gershgorin soundness", gershgorin},
      {"gaussian charge mass", gaussian_mass},
      {"schedule sanity", schedule_sanity},
      {"gradient checks", gradient_checks},
      {"poisson residual", poisson_residual},
      {"repulsion efficacy", repulsion_efficacy},
      {"end-to-end comparative", end_to_end},
      {"schedule-model ablation", schedule_ablation},
      {"seed stability", seed_stability},
      {"tuner sanity", tuner_sanity},
      {"parser", parser},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
