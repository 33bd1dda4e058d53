#pragma once

#include <vector>

#include "vpme/types.hpp"

namespace vpme {

/// Uniform periodic grid x_j = j / Nx on the torus [0,1).
class SpatialGrid {
 public:
  /// Nx must be even and at least 8.
  explicit SpatialGrid(Eigen::Index nx);

  Eigen::Index size() const { return nx_; }
  double spacing() const { return 1.0 / static_cast<double>(nx_); }
  double node(Eigen::Index j) const { return static_cast<double>(j) * spacing(); }
  VectorXd nodes() const;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  Eigen::Index nx_;
};

/// Potentials and fields of one time slice. E = Ebar + Etilde.
struct FieldSlice {
  VectorXd ubar;
  VectorXd utilde;
  VectorXd ebar;
  VectorXd etilde;

  VectorXd total() const { return ebar + etilde; }
};

struct KernelValue {
  double w;
  double w_prime;
};

/// Periodic kernel W(x) = (x^2 - |x|)/2 and W'(x) = x - 1/2 on [0,1). W'(0) = -1/2.
KernelValue kernel_eval(double x);

struct LinearSolution {
  VectorXd ubar;
  VectorXd ebar;
};

/// Ubar = W * rho (spectral; the zero mode of rho enters only through mean(Ubar) = -mean(rho)/12),
/// Ebar = -d/dx Ubar. Throws DomainError on a negative density node.
LinearSolution solve_linear(const VectorXd& rho, const SpatialGrid& grid);

struct NewtonOptions {
  double tolerance = 1e-10;  // max-norm residual
  int max_iterations = 50;
};

struct NonlinearSolution {
  VectorXd utilde;
  VectorXd etilde;
  int iterations = 0;               // Newton steps taken
  int iterations_to_tolerance = 0;  // steps until the residual first met the tolerance
  double residual = 0.0;
  std::vector<double> residual_history;  // residual before each step, then the final one
};

/// Damped Newton on the central-difference discretization of Utilde'' = exp(Ubar + Utilde) - 1,
/// starting from Utilde = 0. Etilde = -d/dx Utilde is recovered spectrally from the
/// discrete source exp(Ubar + Utilde) - 1. Throws SolverDivergence at the iteration cap.
NonlinearSolution solve_nonlinear(const VectorXd& ubar, const SpatialGrid& grid, const NewtonOptions& options = {});

/// Runs solve_linear then solve_nonlinear.
FieldSlice solve_slice(const VectorXd& rho, const SpatialGrid& grid, const NewtonOptions& options = {},
                       int* newton_iterations = nullptr);

struct BoundsReport {
  double utilde_max = 0.0;     // ||Utilde||_inf, bound 3
  double dx_utilde_max = 0.0;  // ||d/dx Utilde||_inf, bound 2
  double dxx_utilde_max = 0.0; // ||d2/dx2 Utilde||_inf, bound 3

  bool utilde_ok() const { return utilde_max <= 3.0; }
  bool dx_ok() const { return dx_utilde_max <= 2.0; }
  bool dxx_ok() const { return dxx_utilde_max <= 3.0; }
  bool pass() const { return utilde_ok() && dx_ok() && dxx_ok(); }
};

BoundsReport verify_potential_bounds(const FieldSlice& slice);

/// ||d/dx Utilde_1 - d/dx Utilde_2||_inf / ||Ubar_1 - Ubar_2||_inf. Throws DegenerateError for equal inputs.
double stability_ratio(const VectorXd& ubar1, const VectorXd& ubar2, const SpatialGrid& grid,
                       const NewtonOptions& options = {});

/// Trapezoid quadrature of exp(Ubar + Utilde) over the torus.
double exponential_mass(const FieldSlice& slice);

/// Max-norm of d/dx E + (exp(Ubar + Utilde) - 1) - (rho - mean(rho)).
double poisson_residual(const FieldSlice& slice, const VectorXd& rho);

}  // namespace vpme
