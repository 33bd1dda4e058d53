#include "vpme/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <string>

#include "vpme/diagnostics.hpp"
#include "vpme/errors.hpp"
#include "vpme/parallel.hpp"

namespace vpme {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

VelocityGrid VelocityGrid::trapezoid(double vmax, Eigen::Index nv) {
  if (!(vmax > 0.0)) throw ParameterError("vmax must be positive");
  if (nv < 3) throw ParameterError("velocity grid needs at least 3 nodes");
  VelocityGrid g;
  g.nodes = VectorXd::LinSpaced(nv, -vmax, vmax);
  const double dv = 2.0 * vmax / static_cast<double>(nv - 1);
  g.weights = VectorXd::Constant(nv, dv);
  g.weights(0) = g.weights(nv - 1) = 0.5 * dv;
  return g;
}

DensityHistory::DensityHistory(TimeGrid time, SpatialGrid space, SliceMatrixXd rho)
    : time_(time), space_(space), rho_(std::move(rho)) {
  if (rho_.rows() != time_.size() || rho_.cols() != space_.size())
    throw ParameterError("density samples do not match the grids");
  mass_ = rho_.rowwise().sum() * space_.spacing();
}

double DensityHistory::max_mass_drift() const { return (mass_.array() - mass_(0)).abs().maxCoeff(); }

DensityHistory push_density(const AsymptoticDatum& datum, const FieldHistory& history, double vmax, Eigen::Index nv,
                            const FlowOptions& flow) {
  const VelocityGrid vgrid = VelocityGrid::trapezoid(vmax, nv);
  const TimeGrid& time = history.time_grid();
  const SpatialGrid& space = history.spatial_grid();
  SliceMatrixXd rho(time.size(), space.size());
  parallel_for(time.size(), [&](std::ptrdiff_t i) {
    const double t = time.node(i);
    for (Eigen::Index j = 0; j < space.size(); ++j) {
      const double x = space.node(j);
      double sum = 0.0;
      for (Eigen::Index k = 0; k < nv; ++k) {
        const PhaseLabel label = label_from_point(history, PhasePoint{t, x, vgrid.nodes(k)}, flow);
        sum += vgrid.weights(k) * datum.value_or_zero(label.x, label.v);
      }
      rho(i, j) = sum;
    }
  });
  return DensityHistory(time, space, std::move(rho));
}

FieldHistory field_update(const DensityHistory& density, const SpatialGrid& grid, const NewtonOptions& newton,
                          double impulse_floor, FieldUpdateStats* stats) {
  const TimeGrid& time = density.time_grid();
  std::vector<FieldSlice> slices(static_cast<std::size_t>(time.size()));
  std::vector<int> newton_steps(slices.size(), 0);
  parallel_for(time.size(), [&](std::ptrdiff_t i) {
    const auto idx = static_cast<std::size_t>(i);
    try {
      slices[idx] = solve_slice(density.rho().row(i).transpose(), grid, newton, &newton_steps[idx]);
    } catch (const SolverDivergence& e) {
      throw SolverDivergence(std::string(e.what()) + " (time slice " + std::to_string(i) + ")", e.residual());
    }
  });
  if (stats != nullptr) stats->max_newton_iterations = *std::max_element(newton_steps.begin(), newton_steps.end());
  return FieldHistory::from_slices(time, grid, slices, impulse_floor);
}

double weighted_norm(const TimeGrid& time, const SliceMatrixXd& values, double a, double t0) {
  if (values.rows() == 0 || values.cols() == 0) throw DegenerateError("weighted norm of an empty history");
  double best = 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    const double t = time.node(i);
    if (t < t0 - 1e-12) continue;
    const double sup = values.row(i).lpNorm<Eigen::Infinity>();
    if (sup == 0.0) continue;
    best = std::max(best, std::exp(a * t + std::log(sup)));
  }
  return best;
}

double SchemeResult::max_ratio() const {
  double best = 0.0;
  for (const auto& r : iterations)
    if (!std::isnan(r.ratio)) best = std::max(best, r.ratio);
  return best;
}

double SchemeResult::max_norm() const {
  double best = 0.0;
  for (const auto& r : iterations) best = std::max(best, r.norm);
  return best;
}

SchemeResult run_iteration(const AsymptoticDatum& datum, const RunConfig& config, const IterationObserver& observer) {
  const ClassParameters& cls = datum.class_parameters();
  validate_config(config);

  ValidationReport validation = validate_class_membership(datum);
  std::vector<std::string> warnings;
  if (!validation.theorem_ready()) {
    std::string why;
    if (!validation.member()) why += " datum outside the class;";
    if (!validation.t0_admissible) why += " t0 below the admissible start;";
    if (!validation.theorem_regime) why += " decay rate below the theorem regime;";
    if (config.mode == RunMode::Theorem) throw ParameterError("theorem mode requires a validated datum:" + why);
    warnings.push_back("exploratory run:" + why + " contraction is reported, not asserted");
  }

  const TimeGrid time(cls.t0, config.horizon(), config.grid.nt);
  const SpatialGrid space(config.grid.nx);
  const double vmax = config.vmax(datum);
  const double recurrence = static_cast<double>(config.grid.nv - 1) / (2.0 * vmax);
  if (recurrence <= time.horizon() - time.start())
    warnings.push_back("velocity grid recurrence time 1/dv = " + std::to_string(recurrence) +
                       " falls inside the horizon window; increase Nv or lower vmax");
  const FlowOptions flow{config.solver.ode_substeps};
  const NewtonOptions newton{config.solver.newton_tol, config.solver.newton_max_iterations};
  const double floor = config.solver.impulse_floor;

  FieldHistory current = FieldHistory::zero(time, space);
  std::optional<DensityHistory> last_density;
  std::vector<IterationRecord> records;
  bool converged = false;
  double tolerance = 0.0;

  for (int n = 1; n <= config.solver.max_iterations; ++n) {
    IterationRecord rec;
    rec.n = n;
    auto start = std::chrono::steady_clock::now();
    DensityHistory density = push_density(datum, current, vmax, config.grid.nv, flow);
    rec.push_seconds = seconds_since(start);

    start = std::chrono::steady_clock::now();
    FieldUpdateStats stats;
    FieldHistory next = field_update(density, space, newton, floor, &stats);
    rec.field_seconds = seconds_since(start);

    rec.norm = weighted_norm(next, cls.a, cls.t0);
    rec.delta = weighted_norm(time, next.total() - current.total(), cls.a, cls.t0);
    if (n == 1) tolerance = config.solver.fixed_point_tol * (1.0 + rec.norm);
    if (!records.empty()) rec.ratio = records.back().delta > 0.0 ? rec.delta / records.back().delta : 0.0;

    rec.mass_min = density.mass().minCoeff();
    rec.mass_max = density.mass().maxCoeff();
    rec.mass_drift = density.max_mass_drift();
    rec.rho_inf = density.rho().lpNorm<Eigen::Infinity>();
    rec.rho_l1 = density.rho().cwiseAbs().rowwise().sum().maxCoeff() * space.spacing();
    for (Eigen::Index i = 0; i < time.size(); ++i) {
      const FieldSlice slice = next.slice(i);
      const BoundsReport b = verify_potential_bounds(slice);
      rec.utilde_max = std::max(rec.utilde_max, b.utilde_max);
      rec.dx_utilde_max = std::max(rec.dx_utilde_max, b.dx_utilde_max);
      rec.dxx_utilde_max = std::max(rec.dxx_utilde_max, b.dxx_utilde_max);
      rec.exp_mass_deviation = std::max(rec.exp_mass_deviation, std::abs(exponential_mass(slice) - 1.0));
      rec.poisson_residual =
          std::max(rec.poisson_residual, poisson_residual(slice, density.rho().row(i).transpose()));
    }
    rec.lipschitz = lipschitz_estimate(next);
    rec.newton_iterations = stats.max_newton_iterations;

    records.push_back(rec);
    if (observer) observer(rec);
    current = std::move(next);
    last_density = std::move(density);
    if (rec.delta <= tolerance) {
      converged = true;
      break;
    }
  }

  return SchemeResult{std::move(records), converged, tolerance, vmax, validation, std::move(warnings),
                      std::move(current), std::move(*last_density)};
}

double reconstruct_f(const AsymptoticDatum& datum, const FieldHistory& history, const PhasePoint& point,
                     const FlowOptions& flow) {
  const PhaseLabel label = label_from_point(history, point, flow);
  return datum.value_or_zero(label.x, label.v);
}

}  // namespace vpme
