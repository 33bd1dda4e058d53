#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vpme/diagnostics.hpp"
#include "vpme/errors.hpp"

using namespace vpme;

namespace {

FieldHistory synthetic(double rate, double amplitude, double t0, double horizon, Eigen::Index nt, Eigen::Index nx) {
  const TimeGrid time(t0, horizon, nt);
  const SpatialGrid space(nx);
  SliceMatrixXd e(nt, nx);
  for (Eigen::Index i = 0; i < nt; ++i)
    for (Eigen::Index j = 0; j < nx; ++j)
      e(i, j) = amplitude * std::exp(-rate * time.node(i)) * std::sin(2 * M_PI * space.node(j));
  return FieldHistory::from_fields(time, space, e, SliceMatrixXd::Zero(nt, nx));
}

}  // namespace

TEST_CASE("decay fit on synthetic exponentials") {
  const ClassParameters cls = testing::exploratory_class();
  // two e-foldings over 12 nodes; nx = 16 puts a node at the sine's peak
  const auto h = synthetic(2.0, 0.5, 0.0, 1.0, 12, 16);
  const auto r = decay_fit(h, cls);
  REQUIRE_FALSE(r.degenerate);
  CHECK(r.rate == doctest::Approx(2.0).epsilon(0.01));
  CHECK(r.prefactor == doctest::Approx(0.5).epsilon(0.01));
  CHECK(r.r_squared == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.times.size() == 12);
  CHECK(r.envelope_pass);

  const auto loud = decay_fit(synthetic(2.0, 100.0, 0.0, 1.0, 12, 16), cls);
  CHECK_FALSE(loud.envelope_pass);
  CHECK(loud.envelope_max_ratio > 1.0);

  const auto zero = decay_fit(FieldHistory::zero(TimeGrid(0.0, 1.0, 5), SpatialGrid(8)), cls);
  CHECK(zero.degenerate);
  CHECK(zero.times.empty());
}

TEST_CASE("weak gaps under free transport") {
  const double c = 0.05, sigma = 1.0;
  const auto datum = make_gaussian_cosine_datum(c, sigma, testing::exploratory_class());
  const auto zero = FieldHistory::zero(TimeGrid(0.0, 1.0, 11), SpatialGrid(32));
  const auto vgrid = VelocityGrid::trapezoid(datum.natural_vmax(), 256);
  const std::vector<double> times{0.0, 0.1, 0.2, 0.3, 0.5};
  const auto rep = weak_convergence_gap(datum, zero, times, default_test_set(), vgrid);

  for (const auto& g : rep.series("one")) CHECK(g.gap < 1e-8);
  for (const auto& g : rep.series("sin2pix")) CHECK(g.gap < 1e-12);
  // int cos(2 pi x) e^{-v^2} f*(x - v t, v) = (c/2) int e^{-v^2} g(v) cos(2 pi v t) dv
  for (const auto& g : rep.series("cos2pix_gauss")) {
    const double oracle = 0.5 * c * testing::simpson([&](double v) {
      return std::exp(-v * v) * testing::unit_gaussian(v, sigma) * std::cos(2 * M_PI * v * g.t);
    }, -12.0, 12.0, 4000);
    CHECK(g.gap == doctest::Approx(std::abs(oracle)).epsilon(1e-9));
  }
  for (const auto& g : rep.series("cos2pix"))
    CHECK(g.gap == doctest::Approx(0.5 * c * std::exp(-2 * M_PI * M_PI * sigma * sigma * g.t * g.t)).epsilon(1e-9));
  CHECK(weak_gaps_nonincreasing(rep));
  CHECK(rep.max_gap_at(0.0) == doctest::Approx(0.5 * c).epsilon(1e-9));
}

TEST_CASE("weak gap monotonicity check") {
  WeakConvergenceReport rep;
  rep.entries = {{"a", 0.0, 1.0}, {"a", 1.0, 0.5}, {"a", 2.0, 0.52}};
  CHECK(weak_gaps_nonincreasing(rep));
  rep.entries.push_back({"a", 3.0, 0.8});
  CHECK_FALSE(weak_gaps_nonincreasing(rep));

  // rebounds far below the series peak count as quadrature noise
  WeakConvergenceReport noisy;
  noisy.entries = {{"b", 0.0, 5e-3}, {"b", 1.0, 3e-16}, {"b", 2.0, 5e-12}};
  CHECK(weak_gaps_nonincreasing(noisy));
  CHECK_FALSE(weak_gaps_nonincreasing(noisy, 0.05, 1e-12, 0.0));
}

TEST_CASE("lipschitz estimate") {
  const auto h = synthetic(0.0, 0.3, 0.0, 1.0, 3, 512);
  CHECK(lipschitz_estimate(h) == doctest::Approx(2 * M_PI * 0.3).epsilon(1e-4));
  const TimeGrid time(0.0, 1.0, 3);
  const auto flat = FieldHistory::from_fields(time, SpatialGrid(8), SliceMatrixXd::Constant(3, 8, 0.7),
                                              SliceMatrixXd::Zero(3, 8));
  CHECK(lipschitz_estimate(flat) == 0.0);
}

TEST_CASE("report times snap to nodes") {
  const TimeGrid time(0.4, 2.4, 11);
  const auto t = report_times(time, 5);
  REQUIRE(t.size() == 5);
  CHECK(t.front() == 0.4);
  CHECK(t.back() == 2.4);
  for (double s : t) {
    const double k = (s - 0.4) / time.step();
    CHECK(std::abs(k - std::round(k)) < 1e-9);
  }
}

TEST_CASE("instability report") {
  const ClassParameters cls = testing::exploratory_class();
  auto cfg = testing::small_config(cls, 0.05, 1.0, 96, 3.0);
  CHECK_THROWS_AS(instability_report(MuParameters{1.0, 1.0}, cls, cfg), ParameterError);

  const auto datum = make_gaussian_cosine_datum(0.05, 1.0, cls);
  for (double v : {0.0, 1.0, 2.5}) CHECK(h_limit(datum, v) == doctest::Approx(0.05 * testing::unit_gaussian(v, 1.0)));

  const auto r = instability_report(MuParameters{0.05, 1.0}, cls, cfg);
  CHECK(r.converged);
  CHECK(r.weak_gaps_decreasing);
  CHECK(r.final_weak_gap < 1e-3);
  CHECK(r.probe_bounded_below);
  const double g0 = 0.05 * testing::unit_gaussian(0.0, 1.0);
  CHECK(r.probe_reference == doctest::Approx(g0));
  // at v = 0 the cosine is frozen: the gap is c g(0) up to the weak self-consistent field
  for (const auto& p : r.probe) CHECK(p.gap == doctest::Approx(g0).epsilon(1e-2));
  CHECK_FALSE(r.narrative.empty());
}
