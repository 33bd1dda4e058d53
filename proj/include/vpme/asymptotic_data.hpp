#pragma once

#include <complex>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vpme/types.hpp"

namespace vpme {

/// Upper bound on sum_{k>=1} k^{-(1+alpha)} from a partial sum plus the integral tail.
double zeta_series_upper_bound(double alpha, long terms = 100000);

/// Smallest decay rate `a` with a^2 >= (200 a2 + 3)(e^6 + 1).
double theorem_regime_min_rate(double a2);

/// Parameters (a, a1, a2, alpha, t0) of the asymptotic-datum class.
struct ClassParameters {
  double a = 0.0;      // analyticity / decay rate [1/time]
  double a1 = 0.0;     // spectral-series bound
  double a2 = 0.0;     // velocity-tail amplitude
  double alpha = 0.0;  // spatial Hoelder exponent in (0,1)
  double t0 = 0.0;     // start time

  /// Throws ParameterError unless alpha in (0,1), a, a1, a2 > 0 and t0 >= 0.
  void check() const;

  double min_admissible_t0() const;
  bool t0_admissible() const;
  bool theorem_regime() const;
  /// Lower bound the series condition places on a1.
  double required_a1() const { return zeta_series_upper_bound(alpha); }
  bool series_condition() const { return required_a1() <= a1; }
  /// Horizon T with (16 a1 / a) exp(-a T) <= tolerance, never below t0.
  double default_horizon(double tolerance = 1e-10) const;
};

/// Unit-mass Gaussian of width sigma.
double gaussian_density(double v, double sigma);

enum class DatumFamily { GaussianCosine, TabulatedGrid };

std::string to_string(DatumFamily family);
DatumFamily datum_family_from_string(const std::string& name);

/// Samples f(x_i, v_j) on a uniform periodic x grid and an increasing v grid.
struct TabulatedGrid {
  VectorXd x;              // uniform nodes in [0,1)
  VectorXd v;              // strictly increasing
  Eigen::MatrixXd values;  // values(i, j) = f(x_i, v_j)
};

/// The scattering target f*(x, v) together with its class parameters.
/// Immutable; copies share tabulated storage.
class AsymptoticDatum {
 public:
  DatumFamily family() const { return family_; }
  const ClassParameters& class_parameters() const { return class_; }
  double amplitude() const { return amplitude_; }
  double sigma() const { return sigma_; }
  /// Spatial modes (k, coefficient) of the gaussian-cosine family.
  const std::vector<std::pair<int, double>>& modes() const { return modes_; }
  const TabulatedGrid* table() const { return table_.get(); }

  /// Pointwise value, x taken mod 1. Throws OutOfRangeError for tabulated data outside the v range.
  double operator()(double x, double v) const;
  /// Like operator(), but a tabulated datum is taken to vanish outside its velocity range.
  double value_or_zero(double x, double v) const;

  /// Velocity cutoff beyond which the datum carries negligible mass.
  double natural_vmax() const;
  /// Total mass int int f* dx dv.
  double mass() const;

  AsymptoticDatum with_class(const ClassParameters& cls) const;

 private:
  friend AsymptoticDatum make_gaussian_cosine_datum(double, double, const ClassParameters&);
  friend AsymptoticDatum make_tabulated_datum(TabulatedGrid, const ClassParameters&);

  DatumFamily family_ = DatumFamily::GaussianCosine;
  double amplitude_ = 0.0;
  double sigma_ = 0.0;
  std::vector<std::pair<int, double>> modes_;
  std::vector<std::pair<int, double>> cos_modes_;  // modes folded onto k >= 0
  std::shared_ptr<const TabulatedGrid> table_;
  ClassParameters class_;
};

/// f*(x,v) = c * g_sigma(v) * (1 + cos 2 pi x).
AsymptoticDatum make_gaussian_cosine_datum(double amplitude, double sigma, const ClassParameters& cls);
AsymptoticDatum make_tabulated_datum(TabulatedGrid grid, const ClassParameters& cls);
/// Reads a comma-separated grid with header `x,v,f`.
AsymptoticDatum load_tabulated_datum(const std::filesystem::path& path, const ClassParameters& cls);

inline double eval_f_star(const AsymptoticDatum& datum, double x, double v) { return datum(x, v); }

/// hat f*(k, eta) = int int f* exp(-2 pi i k x) exp(-i eta v) dx dv.
std::complex<double> fourier_f_star(const AsymptoticDatum& datum, int k, double eta);

/// h(v) = int_T f*(x, v) dx.
double h_limit(const AsymptoticDatum& datum, double v);

struct ValidationReport {
  bool nonnegative = false;
  bool tail_bound = false;        // |f*| (1 + v^4) <= a2
  bool fourier_envelope = false;  // |hat f*| <= e^-6 (1+|k|^alpha)^-1 e^{-a|eta|}
  bool series_condition = false;  // sum k^{-(1+alpha)} <= a1
  bool t0_admissible = false;
  bool theorem_regime = false;

  double min_value = 0.0;
  double max_tail_ratio = 0.0;      // max |f*|(1+v^4) / a2
  double max_envelope_ratio = 0.0;  // max |hat f*| / envelope
  double required_a1 = 0.0;
  double min_t0 = 0.0;
  double theorem_min_rate = 0.0;
  int lattice_k_max = 0;
  double lattice_eta_max = 0.0;
  int lattice_eta_points = 0;

  bool member() const { return nonnegative && tail_bound && fourier_envelope && series_condition; }
  bool theorem_ready() const { return member() && t0_admissible && theorem_regime; }
};

/// Checks f* against the class on a sampling lattice, with closed-form
/// suprema for the gaussian-cosine family. Never throws on violations.
ValidationReport validate_class_membership(const AsymptoticDatum& datum);

/// Largest gaussian-cosine amplitude at width sigma that satisfies both the
/// Fourier envelope and the tail bound of `cls` (closed form).
double max_admissible_amplitude(double sigma, const ClassParameters& cls);

}  // namespace vpme
