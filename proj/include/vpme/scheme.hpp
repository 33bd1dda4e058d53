#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vpme/asymptotic_data.hpp"
#include "vpme/characteristics.hpp"
#include "vpme/config.hpp"
#include "vpme/poisson_field.hpp"

namespace vpme {

/// Truncated velocity grid [-vmax, vmax] with trapezoid weights.
struct VelocityGrid {
  VectorXd nodes;
  VectorXd weights;

  static VelocityGrid trapezoid(double vmax, Eigen::Index nv);
};

/// rho(tau_i, x_j) and the per-slice mass sum_j h rho(tau_i, x_j).
class DensityHistory {
 public:
  DensityHistory(TimeGrid time, SpatialGrid space, SliceMatrixXd rho);

  const TimeGrid& time_grid() const { return time_; }
  const SpatialGrid& spatial_grid() const { return space_; }
  const SliceMatrixXd& rho() const { return rho_; }
  const VectorXd& mass() const { return mass_; }
  double max_mass_drift() const;  // max_i |mass_i - mass_0|

 private:
  TimeGrid time_;
  SpatialGrid space_;
  SliceMatrixXd rho_;
  VectorXd mass_;
};

/// rho(tau_i, x_j) = sum_k w_k f*(label_from_point(tau_i, x_j, v_k)).
DensityHistory push_density(const AsymptoticDatum& datum, const FieldHistory& history, double vmax, Eigen::Index nv,
                            const FlowOptions& flow = {});

struct FieldUpdateStats {
  int max_newton_iterations = 0;
};

/// Per-slice solve_linear + solve_nonlinear. Newton failures are rethrown with the slice index.
FieldHistory field_update(const DensityHistory& density, const SpatialGrid& grid, const NewtonOptions& newton = {},
                          double impulse_floor = 0.0, FieldUpdateStats* stats = nullptr);

/// max_i e^{a tau_i} max_j |F(tau_i, x_j)| over nodes tau_i >= t0; a lower bound of the continuous sup.
double weighted_norm(const TimeGrid& time, const SliceMatrixXd& values, double a, double t0);
inline double weighted_norm(const FieldHistory& history, double a, double t0) {
  return weighted_norm(history.time_grid(), history.total(), a, t0);
}

/// Monitors of one iterate E_n and the density rho_n that produced it.
struct IterationRecord {
  int n = 0;
  double norm = 0.0;   // ||E_n||_{a,t0}
  double delta = 0.0;  // ||E_n - E_{n-1}||_{a,t0}
  double ratio = std::numeric_limits<double>::quiet_NaN();  // delta_n / delta_{n-1}
  double mass_min = 0.0;
  double mass_max = 0.0;
  double mass_drift = 0.0;
  double rho_inf = 0.0;
  double rho_l1 = 0.0;
  double utilde_max = 0.0;
  double dx_utilde_max = 0.0;
  double dxx_utilde_max = 0.0;
  double exp_mass_deviation = 0.0;  // max_i |int exp(U) dx - 1|
  double poisson_residual = 0.0;
  double lipschitz = 0.0;
  int newton_iterations = 0;  // max over slices
  double push_seconds = 0.0;
  double field_seconds = 0.0;
};

struct SchemeResult {
  std::vector<IterationRecord> iterations;
  bool converged = false;
  double tolerance = 0.0;
  double vmax = 0.0;
  ValidationReport validation;
  std::vector<std::string> warnings;
  FieldHistory field;
  DensityHistory density;

  int count() const { return static_cast<int>(iterations.size()); }
  double max_ratio() const;
  double max_norm() const;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Fixed-point iteration E_0 = 0 -> rho_1 -> E_1 -> ... until the delta norm meets the tolerance
/// or the iteration cap. Throws ParameterError in theorem mode when the datum fails validation.
SchemeResult run_iteration(const AsymptoticDatum& datum, const RunConfig& config,
                           const IterationObserver& observer = {});

/// f(t, x, v) = f*(phi_t^{-1}(x, v)).
double reconstruct_f(const AsymptoticDatum& datum, const FieldHistory& history, const PhasePoint& point,
                     const FlowOptions& flow = {});

}  // namespace vpme
