// Acceptance suite: one PASS/FAIL line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "synthetic_field.hpp"
#include "vpme/diagnostics.hpp"
#include "vpme/poisson_field.hpp"
#include "vpme/scheme.hpp"

using namespace vpme;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

VectorXd sample(const SpatialGrid& grid, const std::function<double(double)>& f) {
  VectorXd out(grid.size());
  for (Eigen::Index j = 0; j < grid.size(); ++j) out(j) = f(grid.node(j));
  return out;
}

double unwrap_diff(double a, double b) {
  const double d = a - b;
  return std::abs(d - std::round(d));
}

// slice-wise potential bounds gathered over every solve in this suite
struct BoundsTally {
  double utilde = 0.0, dx = 0.0, dxx = 0.0;
  long slices = 0;
  void add(const BoundsReport& b) {
    utilde = std::max(utilde, b.utilde_max);
    dx = std::max(dx, b.dx_utilde_max);
    dxx = std::max(dxx, b.dxx_utilde_max);
    ++slices;
  }
  void add(const SchemeResult& r) {
    for (const auto& it : r.iterations) {
      utilde = std::max(utilde, it.utilde_max);
      dx = std::max(dx, it.dx_utilde_max);
      dxx = std::max(dxx, it.dxx_utilde_max);
      slices += r.field.time_grid().size();
    }
  }
};

RunConfig grid_config(double amplitude, double sigma, const ClassParameters& cls, RunMode mode) {
  RunConfig c;
  c.datum.amplitude = amplitude;
  c.datum.sigma = sigma;
  c.cls = cls;
  c.grid.nx = 128;
  c.grid.nv = 256;
  c.grid.nt = 100;
  c.mode = mode;
  return c;
}

}  // namespace

int main() {
  BoundsTally bounds;
  const double k2 = 4.0 * M_PI * M_PI;

  // 1. homogeneous state
  {
    const auto start = Clock::now();
    const SpatialGrid grid(256);
    double e_max = 0.0, u_err = 0.0;
    for (double m : {0.1, 1.0}) {
      const FieldSlice s = solve_slice(VectorXd::Constant(256, m), grid);
      e_max = std::max(e_max, s.total().lpNorm<Eigen::Infinity>());
      u_err = std::max(u_err, (s.utilde.array() - m / 12.0).abs().maxCoeff());
      bounds.add(verify_potential_bounds(s));
    }
    const double t = seconds_since(start);
    report(1, e_max <= 1e-10 && u_err <= 1e-10 && t < 1.0, "homogeneous state",
           fmt("max|E| = %.2e", e_max) + fmt(", max|Utilde - m/12| = %.2e", u_err) + fmt(", %.3f s", t));
  }

  // 2. first iterate against free transport
  {
    const auto start = Clock::now();
    const double c = 0.05, sigma = 1.0;
    const ClassParameters cls{2.0, 2.62, 0.1, 0.5, 0.4};
    const auto datum = make_gaussian_cosine_datum(c, sigma, cls);
    const TimeGrid time(cls.t0, cls.default_horizon(), 200);
    const SpatialGrid space(256);
    const auto rho = push_density(datum, FieldHistory::zero(time, space), datum.natural_vmax(), 512);
    const auto e1 = field_update(rho, space);
    double rho_err = 0.0, e_err = 0.0;
    for (Eigen::Index i = 0; i < time.size(); ++i) {
      const double t = time.node(i);
      const double damp = std::exp(-2.0 * M_PI * M_PI * sigma * sigma * t * t);
      for (Eigen::Index j = 0; j < space.size(); ++j) {
        const double x = space.node(j);
        rho_err = std::max(rho_err, std::abs(rho.rho()(i, j) - c * (1.0 + std::cos(2 * M_PI * x) * damp)));
        e_err = std::max(e_err, std::abs(e1.ebar()(i, j) - c / (2 * M_PI) * std::sin(2 * M_PI * x) * damp));
      }
    }
    for (Eigen::Index i = 0; i < time.size(); ++i) bounds.add(verify_potential_bounds(e1.slice(i)));
    const double t = seconds_since(start);
    report(2, rho_err <= 1e-6 && e_err <= 1e-6 && t < 30.0, "first-iterate oracle (Nx=256, Nv=512, Nt=200)",
           fmt("max rho error %.2e", rho_err) + fmt(", max Ebar error %.2e", e_err) + fmt(", %.2f s", t));
  }

  // 3. linearization of the nonlinear Poisson solve
  {
    const SpatialGrid grid(256);
    const double eps = 1e-4;
    const double amp = k2 / (1 + k2);
    const VectorXd ubar = sample(grid, [&](double x) { return eps * std::cos(2 * M_PI * x); });
    const auto sol = solve_nonlinear(ubar, grid);
    const VectorXd first = sample(grid, [&](double x) { return -eps * std::cos(2 * M_PI * x) / (1 + k2); });
    // the same expansion carried to O(eps^2): the mean shift -eps^2 A^2/4 and the cos(4 pi x) harmonic
    const VectorXd second = sample(grid, [&](double x) {
      return -eps * std::cos(2 * M_PI * x) / (1 + k2) - eps * eps * amp * amp / 4.0 -
             eps * eps * amp * amp * std::cos(4 * M_PI * x) / (4.0 * (1 + 4 * k2));
    });
    const double dev2 = (sol.utilde - second).lpNorm<Eigen::Infinity>();
    const double dev1 = (sol.utilde - first).lpNorm<Eigen::Infinity>();
    const VectorXd centered = sol.utilde.array() - sol.utilde.mean();
    const double dev1_osc = (centered - first).lpNorm<Eigen::Infinity>();
    bounds.add(verify_potential_bounds(FieldSlice{ubar, sol.utilde, VectorXd::Zero(256), sol.etilde}));
    report(3, dev2 <= 1e-9 && sol.residual <= 1e-10 && sol.iterations_to_tolerance <= 10,
           "nonlinear-Poisson linearization (eps = 1e-4)",
           fmt("deviation from the O(eps^2)-consistent expansion %.2e", dev2) +
               fmt(" (first-order term alone %.2e", dev1) + fmt(", mean-free part %.2e)", dev1_osc) +
               fmt(", residual %.2e", sol.residual) + " after " + std::to_string(sol.iterations_to_tolerance) +
               " Newton steps");
  }

  // 4. stability ratio
  {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const SpatialGrid grid(128);
    auto random_density = [&] {
      const double m = 0.05 + 0.95 * (0.5 + 0.5 * u(rng));
      double c[4], p[4];
      for (int k = 0; k < 4; ++k) {
        c[k] = 0.24 * (0.5 + 0.5 * u(rng));
        p[k] = M_PI * u(rng);
      }
      return sample(grid, [&](double x) {
        double s = 1.0;
        for (int k = 0; k < 4; ++k) s += c[k] * std::cos(2 * M_PI * (k + 1) * x + p[k]);
        return m * s;
      });
    };
    int violations = 0;
    double worst = 0.0;
    for (int pair = 0; pair < 100; ++pair) {
      const VectorXd u1 = solve_linear(random_density(), grid).ubar;
      const VectorXd u2 = solve_linear(random_density(), grid).ubar;
      const double r = stability_ratio(u1, u2, grid);
      worst = std::max(worst, r);
      if (!(r <= std::exp(6.0))) ++violations;
    }
    const VectorXd zero = VectorXd::Zero(128);
    const double lin = stability_ratio(zero, sample(grid, [](double x) { return 1e-6 * std::cos(2 * M_PI * x); }), grid);
    const double target = 2 * M_PI / (1 + k2);
    const double rel = std::abs(lin - target) / target;
    report(4, violations == 0 && rel <= 0.02, "stability ratio",
           std::to_string(violations) + " violations of e^6 in 100 pairs" + fmt(" (max ratio %.4f)", worst) +
               fmt(", linearized %.6f", lin) + fmt(" vs 2pi/(1+4pi^2) = %.6f", target) + fmt(" (%.2e rel)", rel));
  }

  // 6. contraction (theorem and exploratory), also feeding 5, 7, 8, 9
  const ClassParameters theorem_cls{std::ceil(theorem_regime_min_rate(0.01)), 2.62, 0.01, 0.5, 0.0};
  const double theorem_sigma = 12.0;
  const double theorem_c = 0.9 * max_admissible_amplitude(theorem_sigma, theorem_cls);
  const RunConfig theorem_cfg = grid_config(theorem_c, theorem_sigma, theorem_cls, RunMode::Theorem);
  const ClassParameters explore_cls{2.0, 2.62, 0.1, 0.5, 0.4};
  const RunConfig explore_cfg = grid_config(0.05, 1.0, explore_cls, RunMode::Exploratory);
  const auto explore_datum = build_datum(explore_cfg);

  const auto start6 = Clock::now();
  const SchemeResult theorem_run = run_iteration(build_datum(theorem_cfg), theorem_cfg);
  const SchemeResult explore_run = run_iteration(explore_datum, explore_cfg);
  const double t6 = seconds_since(start6);
  bounds.add(theorem_run);
  bounds.add(explore_run);
  {
    std::string ratios;
    for (const auto& it : explore_run.iterations)
      if (!std::isnan(it.ratio)) ratios += fmt(" %.3e", it.ratio);
    const double final_delta = explore_run.iterations.back().delta;
    const bool theorem_ok = theorem_run.converged && theorem_run.max_ratio() <= 0.5 &&
                            theorem_run.max_norm() <= 16 * theorem_cls.a1;
    const bool explore_ok = explore_run.converged && final_delta <= 1e-9 && explore_run.count() <= 30;
    report(6, theorem_ok && explore_ok && t6 < 600.0, "contraction (Nx=128, Nv=256, Nt=100)",
           "theorem regime a=" + fmt("%.0f", theorem_cls.a) + fmt(", c=%.3e", theorem_c) +
               ": max ratio " + fmt("%.2e", theorem_run.max_ratio()) + fmt(", max norm %.2e", theorem_run.max_norm()) +
               fmt(" <= 16 a1 = %.2f", 16 * theorem_cls.a1) + "; exploratory: ratios" + ratios + ", final delta " +
               fmt("%.2e", final_delta) + " after " + std::to_string(explore_run.count()) + " iterations" +
               fmt("; %.1f s", t6));
  }

  // 5. potential bounds on every slice of every solve above
  report(5, bounds.utilde <= 3.0 && bounds.dx <= 2.0 && bounds.dxx <= 3.0, "potential bounds",
         std::to_string(bounds.slices) + " slices: max|Utilde| " + fmt("%.3e", bounds.utilde) +
             fmt(", max|dx Utilde| %.3e", bounds.dx) + fmt(", max|dxx Utilde| %.3e", bounds.dxx));

  // 7. flow roundtrips and RK4 order
  {
    const FieldHistory& h = explore_run.field;
    const double t = h.start_time();
    double label_err = 0.0, point_err = 0.0;
    for (int i = 0; i < 32; ++i)
      for (int k = 0; k < 32; ++k) {
        const double x = (i + 0.5) / 32.0, v = -4.0 + 8.0 * k / 31.0;
        const PhaseLabel l = label_from_point(h, PhasePoint{t, x, v});
        const PhasePoint q = flow_from_label(h, l, t);
        point_err = std::max({point_err, unwrap_diff(q.x, x), std::abs(q.v - v)});
        const PhasePoint p = flow_from_label(h, PhaseLabel{x, v}, t);
        const PhaseLabel back = label_from_point(h, p);
        label_err = std::max({label_err, unwrap_diff(back.x, x), std::abs(back.v - v)});
      }
    const UniformDecayField f{2.0, 0.0, 3.0, 0.25};
    auto err = [&](int substeps) {
      const PhasePoint p = flow_from_label(f, PhaseLabel{0.3, 0.5}, 0.0, FlowOptions{substeps});
      return std::hypot(unwrap_diff(p.x, f.position(0.3, 0.5, 0.0)), p.v - f.velocity(0.5, 0.0));
    };
    const double ratio = err(1) / err(2);
    report(7, label_err <= 1e-6 && point_err <= 1e-6 && std::abs(ratio - 16.0) <= 3.0, "flow roundtrips and RK4 order",
           fmt("point->label->point %.2e", point_err) + fmt(", label->point->label %.2e", label_err) +
               " on 32x32 probes; error ratio under step halving " + fmt("%.3f", ratio));
  }

  // 8. conservation
  {
    double drift = 0.0, exp_mass = 0.0;
    for (const SchemeResult* r : {&theorem_run, &explore_run})
      for (const auto& it : r->iterations) {
        drift = std::max(drift, it.mass_drift);
        exp_mass = std::max(exp_mass, it.exp_mass_deviation);
      }
    report(8, drift <= 1e-6 && exp_mass <= 1e-8, "conservation",
           fmt("max per-slice mass drift %.2e", drift) + fmt(", max |int exp(U) - 1| %.2e", exp_mass));
  }

  // 9. damping diagnostics on the converged exploratory run
  {
    const auto fit = decay_fit(explore_run.field, explore_cls);
    const TimeGrid& time = explore_run.field.time_grid();
    const auto weak = weak_convergence_gap(explore_datum, explore_run.field, {time.horizon()}, default_test_set(),
                                           VelocityGrid::trapezoid(explore_run.vmax, explore_cfg.grid.nv),
                                           FlowOptions{explore_cfg.solver.ode_substeps});
    const double weak_gap = weak.max_gap_at(time.horizon());
    const auto inst = instability_report(MuParameters{0.05, 1.0}, explore_cls, explore_cfg);
    const double threshold = 0.5 * 0.05 * gaussian_density(0.0, 1.0);
    const double probe = inst.probe.back().gap;
    const bool ok = explore_run.converged && !fit.degenerate && fit.rate > 0.0 && fit.r_squared >= 0.99 &&
                    weak_gap < 1e-3 && probe > threshold;
    report(9, ok, "damping diagnostics",
           fmt("fitted rate %.3f", fit.rate) + fmt(", R^2 %.4f", fit.r_squared) + " over " +
               std::to_string(fit.times.size()) + " nodes" + fmt("; max weak gap at T %.2e", weak_gap) +
               fmt("; probe gap %.4e", probe) + fmt(" vs 0.5 c g(0) = %.4e", threshold));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
