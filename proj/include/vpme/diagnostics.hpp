#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vpme/asymptotic_data.hpp"
#include "vpme/characteristics.hpp"
#include "vpme/config.hpp"
#include "vpme/scheme.hpp"

namespace vpme {

struct DecayReport {
  bool degenerate = true;  // fewer than 3 nodes above the floor; no fit
  double prefactor = 0.0;  // C in sup_x |E(t)| ~ C e^{-rate t}
  double rate = 0.0;
  double r_squared = 0.0;
  std::vector<double> times;     // fitted nodes
  std::vector<double> log_sup;   // log sup_x |E| at the fitted nodes
  std::vector<double> residuals; // log_sup - fitted line
  bool envelope_pass = false;    // sup_x |E(t)| <= 16 a1 e^{-a t} at every node
  double envelope_max_ratio = 0.0;
};

/// Least-squares line through (t, log sup_x |E(t)|) over nodes whose sup exceeds `floor`,
/// plus the 16 a1 e^{-a t} envelope check over all nodes.
DecayReport decay_fit(const FieldHistory& history, const ClassParameters& cls, double floor = 1e-14);

struct TestFunction {
  std::string id;
  std::function<double(double x, double v)> phi;
};

/// {1, cos 2 pi x, sin 2 pi x, cos 2 pi x e^{-v^2}, v e^{-v^2}}; the velocity cutoff comes from the grid.
std::vector<TestFunction> default_test_set();

struct WeakGap {
  std::string id;
  double t = 0.0;
  double gap = 0.0;  // |int int phi f(t) - int int phi h|
};

struct WeakConvergenceReport {
  std::vector<WeakGap> entries;

  /// Gaps of one test function in time order.
  std::vector<WeakGap> series(const std::string& id) const;
  /// Largest gap among entries at time t (nearest match).
  double max_gap_at(double t) const;
};

/// Phase-space trapezoid quadrature over the spatial grid of `history` and the velocity grid.
WeakConvergenceReport weak_convergence_gap(const AsymptoticDatum& datum, const FieldHistory& history,
                                           const std::vector<double>& times, const std::vector<TestFunction>& tests,
                                           const VelocityGrid& velocities, const FlowOptions& flow = {});

/// True when each gap is at most (1 + slack) times its predecessor, up to a noise floor of
/// max(floor, relative_floor * largest gap of that test function).
bool weak_gaps_nonincreasing(const WeakConvergenceReport& report, double slack = 0.05, double floor = 1e-12,
                             double relative_floor = 1e-8);

/// max_i max_j |E(tau_i, x_{j+1}) - E(tau_i, x_j)| / h, periodic wrap included.
double lipschitz_estimate(const FieldHistory& history);

struct MuParameters {
  double amplitude = 0.0;
  double sigma = 0.0;
};

struct ProbeGap {
  double t = 0.0;
  double gap = 0.0;  // sup_x |f(t, x, v*) - mu(v*)|
};

struct InstabilityReport {
  ValidationReport membership;
  bool converged = false;
  int iterations = 0;
  WeakConvergenceReport weak;
  std::vector<ProbeGap> probe;
  double probe_velocity = 0.0;
  double probe_reference = 0.0;  // c g_sigma(v*), the pointwise gap of the free-transport limit
  bool weak_gaps_decreasing = false;
  double final_weak_gap = 0.0;
  bool probe_bounded_below = false;  // probe gap at the final time > 0.5 c g_sigma(v*)
  std::string narrative;
};

/// Builds f* = mu(v)(1 + cos 2 pi x), runs the scheme and reports weak convergence to mu next to
/// the persistent pointwise gap. Throws ParameterError when mu(v) > a2 / (2 (1 + v^4)) somewhere.
InstabilityReport instability_report(const MuParameters& mu, const ClassParameters& cls, const RunConfig& config,
                                     const IterationObserver& observer = {});

/// Evenly spaced report times from t0 to the horizon (both included).
std::vector<double> report_times(const TimeGrid& time, int count);

}  // namespace vpme
