#include "vpme/poisson_field.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "vpme/errors.hpp"
#include "vpme/spectral.hpp"
#include "vpme/tridiagonal.hpp"

namespace vpme {

namespace {

VectorXd expm1_of(const VectorXd& u) { return u.unaryExpr([](double s) { return std::expm1(s); }); }

// r = D2 utilde - expm1(ubar + utilde), D2 the periodic 3-point Laplacian.
VectorXd nonlinear_residual(const VectorXd& ubar, const VectorXd& utilde, double inv_h2) {
  const Eigen::Index n = utilde.size();
  VectorXd r(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double prev = utilde((j + n - 1) % n);
    const double next = utilde((j + 1) % n);
    r(j) = (next - 2.0 * utilde(j) + prev) * inv_h2 - std::expm1(ubar(j) + utilde(j));
  }
  return r;
}

}  // namespace

SpatialGrid::SpatialGrid(Eigen::Index nx) : nx_(nx) {
  if (nx < 8 || nx % 2 != 0) throw ParameterError("spatial grid needs an even Nx >= 8, got " + std::to_string(nx));
}

VectorXd SpatialGrid::nodes() const {
  return VectorXd::LinSpaced(nx_, 0.0, static_cast<double>(nx_ - 1) * spacing());
}

KernelValue kernel_eval(double x) {
  const double r = wrap_unit(x);
  return {0.5 * (r * r - r), r - 0.5};
}

LinearSolution solve_linear(const VectorXd& rho, const SpatialGrid& grid) {
  if (rho.size() != grid.size()) throw ParameterError("density slice does not match the grid");
  for (Eigen::Index j = 0; j < rho.size(); ++j) {
    if (!(rho(j) >= 0.0)) throw DomainError("negative density at node " + std::to_string(j));
  }
  PeriodicSpectral<double> spectral(grid.size());
  // W'' = 1 - delta on the torus, so (W * rho)'' = mean(rho) - rho and mean(W * rho) = -mean(rho)/12.
  const double mean = rho.mean();
  LinearSolution out;
  out.ubar = (-spectral.inverse_laplacian(rho)).array() - mean / 12.0;
  out.ebar = -spectral.derivative(out.ubar);
  return out;
}

NonlinearSolution solve_nonlinear(const VectorXd& ubar, const SpatialGrid& grid, const NewtonOptions& options) {
  const Eigen::Index n = grid.size();
  if (ubar.size() != n) throw ParameterError("potential slice does not match the grid");
  if (!ubar.allFinite()) throw DomainError("potential slice has non-finite values");

  const double h = grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const VectorXd off = VectorXd::Constant(n, inv_h2);

  NonlinearSolution out;
  out.utilde = VectorXd::Zero(n);
  VectorXd r = nonlinear_residual(ubar, out.utilde, inv_h2);
  double res = r.lpNorm<Eigen::Infinity>();
  bool reached = res <= options.tolerance;

  while (true) {
    out.residual_history.push_back(res);
    if (res == 0.0) break;
    if (out.iterations >= options.max_iterations) {
      if (reached) break;
      throw SolverDivergence("nonlinear Poisson Newton iteration hit the cap of " +
                                 std::to_string(options.max_iterations) + " steps",
                             res);
    }

    VectorXd diag(n);
    for (Eigen::Index j = 0; j < n; ++j) diag(j) = -2.0 * inv_h2 - std::exp(ubar(j) + out.utilde(j));
    const VectorXd step = solve_cyclic_tridiagonal(off, diag, off, (-r).eval());

    double lambda = 1.0;
    bool accepted = false;
    VectorXd trial, trial_r;
    double trial_res = 0.0;
    for (int halving = 0; halving < 40; ++halving) {
      trial = out.utilde + lambda * step;
      trial_r = nonlinear_residual(ubar, trial, inv_h2);
      trial_res = trial_r.lpNorm<Eigen::Infinity>();
      if (trial_res < res) {
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      // Stagnation at rounding level is convergence once the tolerance has been met.
      if (reached) break;
      throw SolverDivergence("nonlinear Poisson line search failed to reduce the residual", res);
    }

    ++out.iterations;
    const double step_norm = lambda * step.lpNorm<Eigen::Infinity>();
    out.utilde = std::move(trial);
    r = std::move(trial_r);
    res = trial_res;
    if (!reached && res <= options.tolerance) {
      reached = true;
      out.iterations_to_tolerance = out.iterations;
    }
    // One step beyond the tolerance brings a quadratically convergent iterate to rounding level.
    const double scale = out.utilde.lpNorm<Eigen::Infinity>();
    if (reached && step_norm <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      out.residual_history.push_back(res);
      break;
    }
  }
  if (out.iterations_to_tolerance == 0) out.iterations_to_tolerance = out.iterations;
  out.residual = res;

  PeriodicSpectral<double> spectral(n);
  out.etilde = -spectral.antiderivative(expm1_of(ubar + out.utilde));
  return out;
}

FieldSlice solve_slice(const VectorXd& rho, const SpatialGrid& grid, const NewtonOptions& options,
                       int* newton_iterations) {
  LinearSolution lin = solve_linear(rho, grid);
  NonlinearSolution nl = solve_nonlinear(lin.ubar, grid, options);
  if (newton_iterations != nullptr) *newton_iterations = nl.iterations;
  return FieldSlice{std::move(lin.ubar), std::move(nl.utilde), std::move(lin.ebar), std::move(nl.etilde)};
}

BoundsReport verify_potential_bounds(const FieldSlice& slice) {
  BoundsReport r;
  r.utilde_max = slice.utilde.lpNorm<Eigen::Infinity>();
  r.dx_utilde_max = slice.etilde.lpNorm<Eigen::Infinity>();
  PeriodicSpectral<double> spectral(slice.etilde.size());
  r.dxx_utilde_max = spectral.derivative(slice.etilde).lpNorm<Eigen::Infinity>();
  return r;
}

double stability_ratio(const VectorXd& ubar1, const VectorXd& ubar2, const SpatialGrid& grid,
                       const NewtonOptions& options) {
  const double denom = (ubar1 - ubar2).lpNorm<Eigen::Infinity>();
  if (denom == 0.0) throw DegenerateError("stability ratio of identical potentials");
  const NonlinearSolution s1 = solve_nonlinear(ubar1, grid, options);
  const NonlinearSolution s2 = solve_nonlinear(ubar2, grid, options);
  return (s1.etilde - s2.etilde).lpNorm<Eigen::Infinity>() / denom;
}

double exponential_mass(const FieldSlice& slice) {
  return (slice.ubar + slice.utilde).array().exp().mean();
}

double poisson_residual(const FieldSlice& slice, const VectorXd& rho) {
  PeriodicSpectral<double> spectral(rho.size());
  const VectorXd dx_e = spectral.derivative(slice.total());
  const VectorXd source = expm1_of(slice.ubar + slice.utilde);
  return (dx_e + source - (rho.array() - rho.mean()).matrix()).lpNorm<Eigen::Infinity>();
}

}  // namespace vpme
