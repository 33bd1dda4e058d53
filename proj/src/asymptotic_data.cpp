#include "vpme/asymptotic_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vpme/errors.hpp"

namespace vpme {

namespace {

constexpr double kEnvelopeLogPrefactor = -6.0;  // log of e^-6
constexpr int kLatticeKMax = 64;
constexpr int kLatticeEtaPoints = 257;
constexpr double kLatticeEtaCutoff = 1e-14;  // e^{-a eta} below this ends the lattice

// max over v of g_sigma(v) (1 + v^4); stationary points solve v^4 - 4 sigma^2 v^2 + 1 = 0.
double max_weighted_gaussian(double sigma) {
  double best = gaussian_density(0.0, sigma);
  const double disc = 4.0 * sigma * sigma * sigma * sigma - 1.0;
  if (disc >= 0.0) {
    for (double sign : {-1.0, 1.0}) {
      const double s = 2.0 * sigma * sigma + sign * std::sqrt(disc);
      if (s <= 0.0) continue;
      const double v = std::sqrt(s);
      best = std::max(best, gaussian_density(v, sigma) * (1.0 + s * s));
    }
  }
  return best;
}

double envelope(const ClassParameters& cls, int k, double eta) {
  return std::exp(kEnvelopeLogPrefactor - cls.a * std::abs(eta)) /
         (1.0 + std::pow(std::abs(static_cast<double>(k)), cls.alpha));
}

// Extrema over x of sum_k coef_k cos(2 pi k x) (cosine form of the mode list).
std::pair<double, double> spatial_factor_range(const std::vector<std::pair<int, double>>& cos_modes) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  constexpr int samples = 4096;
  for (int i = 0; i < samples; ++i) {
    const double x = static_cast<double>(i) / samples;
    double s = 0.0;
    for (const auto& [k, c] : cos_modes) s += c * std::cos(kTwoPi * k * x);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return {lo, hi};
}

std::vector<std::pair<int, double>> cosine_form(const std::vector<std::pair<int, double>>& modes) {
  std::vector<std::pair<int, double>> out;
  for (const auto& [k, c] : modes) {
    const int m = std::abs(k);
    auto it = std::find_if(out.begin(), out.end(), [m](const auto& p) { return p.first == m; });
    if (it == out.end()) {
      out.emplace_back(m, c);
    } else {
      it->second += c;
    }
  }
  return out;
}

double trapezoid_weight(Eigen::Index j, Eigen::Index n, const VectorXd& v) {
  if (n == 1) return 0.0;
  double w = 0.0;
  if (j > 0) w += 0.5 * (v(j) - v(j - 1));
  if (j + 1 < n) w += 0.5 * (v(j + 1) - v(j));
  return w;
}

}  // namespace

double zeta_series_upper_bound(double alpha, long terms) {
  if (!(alpha > 0.0)) throw ParameterError("zeta bound needs alpha > 0");
  const double s = 1.0 + alpha;
  double partial = 0.0;
  for (long k = terms; k >= 1; --k) partial += std::pow(static_cast<double>(k), -s);
  return partial + std::pow(static_cast<double>(terms), -alpha) / alpha;
}

double theorem_regime_min_rate(double a2) {
  return std::sqrt((200.0 * a2 + 3.0) * (std::exp(6.0) + 1.0));
}

void ClassParameters::check() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0,1)");
  if (!(a > 0.0)) throw ParameterError("a must be positive");
  if (!(a1 > 0.0)) throw ParameterError("a1 must be positive");
  if (!(a2 > 0.0)) throw ParameterError("a2 must be positive");
  if (!(t0 >= 0.0) || !std::isfinite(t0)) throw ParameterError("t0 must be finite and nonnegative");
}

double ClassParameters::min_admissible_t0() const {
  return std::max(0.0, std::log(8.0 * a1 * a2) / a);
}

bool ClassParameters::t0_admissible() const { return t0 >= min_admissible_t0(); }

bool ClassParameters::theorem_regime() const {
  return a * a >= (200.0 * a2 + 3.0) * (std::exp(6.0) + 1.0);
}

double ClassParameters::default_horizon(double tolerance) const {
  const double t = std::log(16.0 * a1 / (a * tolerance)) / a;
  return std::max(t, t0 + 1.0 / a);
}

double gaussian_density(double v, double sigma) {
  const double z = v / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(kTwoPi));
}

std::string to_string(DatumFamily family) {
  return family == DatumFamily::GaussianCosine ? "gaussian-cosine" : "tabulated-grid";
}

DatumFamily datum_family_from_string(const std::string& name) {
  if (name == "gaussian-cosine") return DatumFamily::GaussianCosine;
  if (name == "tabulated-grid") return DatumFamily::TabulatedGrid;
  throw ParameterError("unknown datum family '" + name + "'");
}

AsymptoticDatum make_gaussian_cosine_datum(double amplitude, double sigma, const ClassParameters& cls) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ParameterError("amplitude must be positive");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("sigma must be positive");
  cls.check();
  AsymptoticDatum d;
  d.family_ = DatumFamily::GaussianCosine;
  d.amplitude_ = amplitude;
  d.sigma_ = sigma;
  d.modes_ = {{-1, 0.5}, {0, 1.0}, {1, 0.5}};
  d.cos_modes_ = cosine_form(d.modes_);
  d.class_ = cls;
  return d;
}

AsymptoticDatum make_tabulated_datum(TabulatedGrid grid, const ClassParameters& cls) {
  cls.check();
  const Eigen::Index nx = grid.x.size();
  const Eigen::Index nv = grid.v.size();
  if (nx < 2 || nv < 2) throw ParameterError("tabulated datum needs at least 2 nodes in x and v");
  if (grid.values.rows() != nx || grid.values.cols() != nv)
    throw ParameterError("tabulated datum value matrix does not match its grid");
  for (Eigen::Index j = 1; j < nv; ++j)
    if (!(grid.v(j) > grid.v(j - 1))) throw ParameterError("tabulated v nodes must be strictly increasing");
  const double hx = 1.0 / static_cast<double>(nx);
  for (Eigen::Index i = 0; i < nx; ++i) {
    if (std::abs(grid.x(i) - grid.x(0) - static_cast<double>(i) * hx) > 1e-9)
      throw ParameterError("tabulated x nodes must be uniform with spacing 1/Nx");
  }
  AsymptoticDatum d;
  d.family_ = DatumFamily::TabulatedGrid;
  d.table_ = std::make_shared<const TabulatedGrid>(std::move(grid));
  d.class_ = cls;
  return d;
}

AsymptoticDatum load_tabulated_datum(const std::filesystem::path& path, const ClassParameters& cls) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tabulated datum '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ParseError("file", "empty tabulated datum file");
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "x,v,f") throw ParseError("file", "tabulated datum header must be 'x,v,f'");

  struct Row {
    double x, v, f;
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    Row r{};
    if (!(ss >> r.x >> r.v >> r.f))
      throw ParseError("file", "malformed row at line " + std::to_string(line_no));
    rows.push_back(r);
  }
  std::vector<double> xs, vs;
  for (const auto& r : rows) {
    xs.push_back(wrap_unit(r.x));
    vs.push_back(r.v);
  }
  auto uniq = [](std::vector<double>& a) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(), [](double p, double q) { return std::abs(p - q) < 1e-12; }),
            a.end());
  };
  uniq(xs);
  uniq(vs);
  if (xs.size() * vs.size() != rows.size())
    throw ParseError("file", "tabulated datum is not a full tensor grid");

  TabulatedGrid grid;
  grid.x = Eigen::Map<VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  grid.v = Eigen::Map<VectorXd>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  grid.values = Eigen::MatrixXd::Constant(grid.x.size(), grid.v.size(), std::numeric_limits<double>::quiet_NaN());
  auto index_of = [](const std::vector<double>& a, double value) {
    auto it = std::lower_bound(a.begin(), a.end(), value - 1e-12);
    return static_cast<Eigen::Index>(it - a.begin());
  };
  for (const auto& r : rows) grid.values(index_of(xs, wrap_unit(r.x)), index_of(vs, r.v)) = r.f;
  if (!grid.values.allFinite()) throw ParseError("file", "tabulated datum has duplicate or missing nodes");
  return make_tabulated_datum(std::move(grid), cls);
}

double AsymptoticDatum::operator()(double x, double v) const {
  if (family_ == DatumFamily::GaussianCosine) {
    const double xr = wrap_unit(x);
    double spatial = 0.0;
    for (const auto& [k, c] : cos_modes_) spatial += k == 0 ? c : c * std::cos(kTwoPi * k * xr);
    return amplitude_ * gaussian_density(v, sigma_) * spatial;
  }
  const TabulatedGrid& t = *table_;
  const Eigen::Index nv = t.v.size();
  if (!(v >= t.v(0) && v <= t.v(nv - 1)))
    throw OutOfRangeError("velocity " + std::to_string(v) + " outside tabulated datum range");
  const Eigen::Index nx = t.x.size();
  const double s = wrap_unit(x - t.x(0)) * static_cast<double>(nx);
  Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), nx - 1);
  const Eigen::Index ip = (i + 1) % nx;
  const double bx = s - static_cast<double>(i);
  auto upper = std::upper_bound(t.v.data(), t.v.data() + nv, v);
  Eigen::Index j = std::clamp<Eigen::Index>(upper - t.v.data() - 1, 0, nv - 2);
  const double bv = (v - t.v(j)) / (t.v(j + 1) - t.v(j));
  return (1 - bx) * ((1 - bv) * t.values(i, j) + bv * t.values(i, j + 1)) +
         bx * ((1 - bv) * t.values(ip, j) + bv * t.values(ip, j + 1));
}

double AsymptoticDatum::value_or_zero(double x, double v) const {
  if (family_ == DatumFamily::TabulatedGrid) {
    const VectorXd& vs = table_->v;
    if (!(v >= vs(0) && v <= vs(vs.size() - 1))) return 0.0;
  }
  return (*this)(x, v);
}

double AsymptoticDatum::natural_vmax() const {
  if (family_ == DatumFamily::GaussianCosine) return sigma_ * std::sqrt(2.0 * std::log(1e16));
  const VectorXd& vs = table_->v;
  return std::min(-vs(0), vs(vs.size() - 1));
}

double AsymptoticDatum::mass() const { return std::real(fourier_f_star(*this, 0, 0.0)); }

AsymptoticDatum AsymptoticDatum::with_class(const ClassParameters& cls) const {
  cls.check();
  AsymptoticDatum d = *this;
  d.class_ = cls;
  return d;
}

std::complex<double> fourier_f_star(const AsymptoticDatum& datum, int k, double eta) {
  if (datum.family() == DatumFamily::GaussianCosine) {
    double coef = 0.0;
    for (const auto& [m, c] : datum.modes())
      if (m == k) coef += c;
    if (coef == 0.0) return {0.0, 0.0};
    const double s = datum.sigma() * eta;
    return {datum.amplitude() * coef * std::exp(-0.5 * s * s), 0.0};
  }
  const TabulatedGrid& t = *datum.table();
  const Eigen::Index nx = t.x.size();
  const Eigen::Index nv = t.v.size();
  std::complex<double> total{0.0, 0.0};
  for (Eigen::Index j = 0; j < nv; ++j) {
    std::complex<double> col{0.0, 0.0};
    for (Eigen::Index i = 0; i < nx; ++i)
      col += t.values(i, j) * std::polar(1.0, -kTwoPi * k * t.x(i));
    total += trapezoid_weight(j, nv, t.v) * col * std::polar(1.0, -eta * t.v(j));
  }
  return total / static_cast<double>(nx);
}

double h_limit(const AsymptoticDatum& datum, double v) {
  if (datum.family() == DatumFamily::GaussianCosine) {
    double coef = 0.0;
    for (const auto& [m, c] : datum.modes())
      if (m == 0) coef += c;
    return datum.amplitude() * coef * gaussian_density(v, datum.sigma());
  }
  const TabulatedGrid& t = *datum.table();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < t.x.size(); ++i) sum += datum.value_or_zero(t.x(i), v);
  return sum / static_cast<double>(t.x.size());
}

double max_admissible_amplitude(double sigma, const ClassParameters& cls) {
  cls.check();
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  // Modes {0: 1, +-1: 1/2}: coef_k (1 + |k|^alpha) equals 1 for every mode present.
  const double envelope_cap = std::exp(kEnvelopeLogPrefactor - cls.a * cls.a / (2.0 * sigma * sigma));
  const double tail_cap = cls.a2 / (2.0 * max_weighted_gaussian(sigma));
  return std::min(envelope_cap, tail_cap);
}

ValidationReport validate_class_membership(const AsymptoticDatum& datum) {
  const ClassParameters& cls = datum.class_parameters();
  ValidationReport r;
  r.required_a1 = cls.required_a1();
  r.series_condition = r.required_a1 <= cls.a1;
  r.min_t0 = cls.min_admissible_t0();
  r.t0_admissible = cls.t0_admissible();
  r.theorem_min_rate = theorem_regime_min_rate(cls.a2);
  r.theorem_regime = cls.theorem_regime();

  r.lattice_k_max = kLatticeKMax;
  r.lattice_eta_max = -std::log(kLatticeEtaCutoff) / cls.a;
  r.lattice_eta_points = kLatticeEtaPoints;
  const double deta = r.lattice_eta_max / (kLatticeEtaPoints - 1);

  double max_env = 0.0;
  if (datum.family() == DatumFamily::GaussianCosine) {
    const auto cos_modes = cosine_form(datum.modes());
    const auto [lo, hi] = spatial_factor_range(cos_modes);
    const double c = datum.amplitude();
    const double sigma = datum.sigma();
    r.min_value = c * gaussian_density(0.0, sigma) * std::min(lo, 0.0);
    r.nonnegative = lo >= -1e-15;
    r.max_tail_ratio = c * hi * max_weighted_gaussian(sigma) / cls.a2;

    for (int k = -kLatticeKMax; k <= kLatticeKMax; ++k) {
      for (int e = 0; e < kLatticeEtaPoints; ++e) {
        const double eta = e * deta;
        const double ratio = std::abs(fourier_f_star(datum, k, eta)) / envelope(cls, k, eta);
        max_env = std::max(max_env, ratio);
      }
    }
    // Closed form: sup_eta exp(-sigma^2 eta^2 / 2 + a eta) = exp(a^2 / (2 sigma^2)).
    for (const auto& [k, coef] : datum.modes()) {
      if (coef == 0.0) continue;
      const double log_ratio = std::log(c * std::abs(coef)) +
                               std::log1p(std::pow(std::abs(static_cast<double>(k)), cls.alpha)) -
                               kEnvelopeLogPrefactor + cls.a * cls.a / (2.0 * sigma * sigma);
      max_env = std::max(max_env, std::exp(log_ratio));
    }
  } else {
    const TabulatedGrid& t = *datum.table();
    r.min_value = t.values.minCoeff();
    r.nonnegative = r.min_value >= 0.0;
    double tail = 0.0;
    for (Eigen::Index i = 0; i < t.x.size(); ++i)
      for (Eigen::Index j = 0; j < t.v.size(); ++j) {
        const double v = t.v(j);
        tail = std::max(tail, std::abs(t.values(i, j)) * (1.0 + v * v * v * v));
      }
    r.max_tail_ratio = tail / cls.a2;

    // Separable quadrature: x-DFT per k once, then the v sum per eta.
    const Eigen::Index nx = t.x.size();
    const Eigen::Index nv = t.v.size();
    for (int k = -kLatticeKMax; k <= kLatticeKMax; ++k) {
      std::vector<std::complex<double>> col(static_cast<std::size_t>(nv));
      for (Eigen::Index j = 0; j < nv; ++j) {
        std::complex<double> s{0.0, 0.0};
        for (Eigen::Index i = 0; i < nx; ++i) s += t.values(i, j) * std::polar(1.0, -kTwoPi * k * t.x(i));
        col[static_cast<std::size_t>(j)] = s * trapezoid_weight(j, nv, t.v) / static_cast<double>(nx);
      }
      for (int e = 0; e < kLatticeEtaPoints; ++e) {
        const double eta = e * deta;
        std::complex<double> s{0.0, 0.0};
        for (Eigen::Index j = 0; j < nv; ++j) s += col[static_cast<std::size_t>(j)] * std::polar(1.0, -eta * t.v(j));
        max_env = std::max(max_env, std::abs(s) / envelope(cls, k, eta));
      }
    }
  }
  r.tail_bound = r.max_tail_ratio <= 1.0;
  r.max_envelope_ratio = max_env;
  r.fourier_envelope = max_env <= 1.0;
  return r;
}

}  // namespace vpme
