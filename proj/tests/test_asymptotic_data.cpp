#include <doctest.h>

#include <cmath>
#include <fstream>

#include "support.hpp"
#include "vpme/asymptotic_data.hpp"
#include "vpme/errors.hpp"

using namespace vpme;

TEST_CASE("gaussian-cosine datum: values, mass, limit") {
  const ClassParameters cls = testing::exploratory_class();
  const auto d = make_gaussian_cosine_datum(1.0, 1.0, cls);
  CHECK(d.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eval_f_star(d, 0.0, 0.3) == doctest::Approx(2.0 * testing::unit_gaussian(0.3, 1.0)).epsilon(1e-14));

  const auto e = make_gaussian_cosine_datum(0.05, 1.5, cls);
  const double g0 = testing::unit_gaussian(0.0, 1.5);
  CHECK(eval_f_star(e, 0.25, 0.0) == doctest::Approx(0.05 * g0).epsilon(1e-12));
  CHECK(eval_f_star(e, 1.25, 0.0) == doctest::Approx(eval_f_star(e, 0.25, 0.0)).epsilon(1e-14));
  CHECK(eval_f_star(e, -0.75, 0.0) == doctest::Approx(eval_f_star(e, 0.25, 0.0)).epsilon(1e-14));
  for (double x = 0.0; x < 1.0; x += 0.0625)
    for (double v = -6.0; v <= 6.0; v += 0.5) CHECK(eval_f_star(e, x, v) >= 0.0);

  for (double v : {-2.0, 0.0, 0.7, 3.0})
    CHECK(h_limit(e, v) == doctest::Approx(0.05 * testing::unit_gaussian(v, 1.5)).epsilon(1e-13));
  const double h_mass = testing::simpson([&](double v) { return h_limit(e, v); }, -15.0, 15.0, 2000);
  CHECK(h_mass == doctest::Approx(e.mass()).epsilon(1e-10));
}

TEST_CASE("fourier transform matches direct phase-space quadrature") {
  const auto d = make_gaussian_cosine_datum(0.3, 0.8, testing::exploratory_class());
  for (int k : {-2, -1, 0, 1, 2}) {
    for (double eta : {0.0, 0.5, 1.7}) {
      // independent oracle: trapezoid in x (exact for trigonometric polynomials), Simpson in v
      const int nx = 16;
      std::complex<double> oracle{0.0, 0.0};
      for (int i = 0; i < nx; ++i) {
        const double x = static_cast<double>(i) / nx;
        const double re = testing::simpson([&](double v) { return eval_f_star(d, x, v) * std::cos(eta * v); }, -10, 10, 4000);
        const double im = testing::simpson([&](double v) { return -eval_f_star(d, x, v) * std::sin(eta * v); }, -10, 10, 4000);
        oracle += std::complex<double>(re, im) * std::polar(1.0, -2.0 * M_PI * k * x) / static_cast<double>(nx);
      }
      const auto got = fourier_f_star(d, k, eta);
      CHECK(std::abs(got - oracle) < 1e-10);
      if (std::abs(k) >= 2) CHECK(std::abs(got) == 0.0);
    }
  }
  CHECK(std::real(fourier_f_star(d, 1, 1.2)) == doctest::Approx(0.15 * std::exp(-0.5 * 0.64 * 1.44)).epsilon(1e-14));
  CHECK(std::real(fourier_f_star(d, 0, 1.2)) == doctest::Approx(0.3 * std::exp(-0.5 * 0.64 * 1.44)).epsilon(1e-14));
}

TEST_CASE("series and rate conditions") {
  // oracle: partial sum to 2e6 plus the Euler-Maclaurin tail  2/sqrt(N) - 1/(2 N^1.5)
  double partial = 0.0;
  const long n = 2000000;
  for (long k = n; k >= 1; --k) partial += std::pow(static_cast<double>(k), -1.5);
  const double zeta = partial + 2.0 / std::sqrt(static_cast<double>(n)) - 0.5 * std::pow(static_cast<double>(n), -1.5);
  const double bound = zeta_series_upper_bound(0.5);
  CHECK(bound >= zeta);
  CHECK(bound - zeta < 1e-6);
  CHECK(zeta == doctest::Approx(2.612).epsilon(1e-3));

  CHECK(theorem_regime_min_rate(0.05) == doctest::Approx(std::sqrt(13.0 * (std::exp(6.0) + 1.0))).epsilon(1e-14));
  CHECK(theorem_regime_min_rate(0.05) == doctest::Approx(72.509).epsilon(1e-5));
  CHECK(testing::theorem_class().theorem_regime());
  CHECK_FALSE(testing::exploratory_class().theorem_regime());

  const ClassParameters cls = testing::exploratory_class();
  CHECK(cls.min_admissible_t0() == doctest::Approx(std::log(8.0 * 2.62 * 0.1) / 2.0).epsilon(1e-14));
  CHECK(cls.t0_admissible());
  CHECK(cls.default_horizon() == doctest::Approx(std::log(16.0 * 2.62 / (2.0 * 1e-10)) / 2.0).epsilon(1e-14));
}

TEST_CASE("class membership report") {
  const ClassParameters cls = testing::theorem_class();
  const double cmax = max_admissible_amplitude(12.0, cls);
  const auto ok = validate_class_membership(make_gaussian_cosine_datum(0.9 * cmax, 12.0, cls));
  CHECK(ok.member());
  CHECK(ok.theorem_ready());
  CHECK(ok.max_tail_ratio <= 1.0);
  CHECK(ok.max_envelope_ratio <= 1.0);

  const auto over = validate_class_membership(make_gaussian_cosine_datum(1.1 * cmax, 12.0, cls));
  CHECK_FALSE(over.member());

  // |hat f*(1,0)| = c/2 exceeds the k = 1 envelope e^-6 / 2
  const auto loud = validate_class_membership(make_gaussian_cosine_datum(2.0 * std::exp(-6.0), 40.0, cls));
  CHECK_FALSE(loud.fourier_envelope);

  ClassParameters thin = cls;
  thin.a1 = 2.0;
  const auto series = validate_class_membership(make_gaussian_cosine_datum(0.9 * cmax, 12.0, thin));
  CHECK_FALSE(series.series_condition);
  CHECK(series.required_a1 == doctest::Approx(2.6124).epsilon(1e-4));
}

TEST_CASE("parameter errors") {
  const ClassParameters cls = testing::exploratory_class();
  CHECK_THROWS_AS(make_gaussian_cosine_datum(-1.0, 1.0, cls), ParameterError);
  CHECK_THROWS_AS(make_gaussian_cosine_datum(1.0, 0.0, cls), ParameterError);
  ClassParameters bad = cls;
  bad.alpha = 1.5;
  CHECK_THROWS_AS(make_gaussian_cosine_datum(1.0, 1.0, bad), ParameterError);
  CHECK_THROWS_AS(datum_family_from_string("maxwellian"), ParameterError);
}

TEST_CASE("tabulated datum round trip through a grid file") {
  const ClassParameters cls = testing::exploratory_class();
  const auto reference = make_gaussian_cosine_datum(0.05, 1.0, cls);
  const auto dir = testing::scratch_dir("tabulated");
  const auto file = dir / "grid.csv";
  {
    std::ofstream out(file);
    out << "x,v,f\n";
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j <= 160; ++j) {
        const double x = i / 32.0, v = -8.0 + 0.1 * j;
        out.precision(17);
        out << x << ',' << v << ',' << eval_f_star(reference, x, v) << '\n';
      }
  }
  const auto d = load_tabulated_datum(file, cls);
  CHECK(d.family() == DatumFamily::TabulatedGrid);
  CHECK(d(0.25, 0.0) == doctest::Approx(eval_f_star(reference, 0.25, 0.0)).epsilon(1e-12));
  CHECK(d(1.25, 0.0) == doctest::Approx(d(0.25, 0.0)).epsilon(1e-14));
  CHECK(d.natural_vmax() == doctest::Approx(8.0));
  CHECK_THROWS_AS(d(0.1, 9.0), OutOfRangeError);
  CHECK(d.value_or_zero(0.1, 9.0) == 0.0);
  CHECK(d.mass() == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(h_limit(d, 0.5) == doctest::Approx(h_limit(reference, 0.5)).epsilon(1e-10));

  const auto report = validate_class_membership(d);
  CHECK(report.nonnegative);

  {
    std::ofstream out(dir / "bad.csv");
    out << "x,v,value\n0,0,1\n";
  }
  CHECK_THROWS_AS(load_tabulated_datum(dir / "bad.csv", cls), ParseError);
  CHECK_THROWS_AS(load_tabulated_datum(dir / "missing.csv", cls), IoError);
}
