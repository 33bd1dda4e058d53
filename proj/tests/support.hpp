#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "vpme/asymptotic_data.hpp"
#include "vpme/config.hpp"

namespace testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("vpme-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline vpme::ClassParameters exploratory_class() { return {2.0, 2.62, 0.1, 0.5, 0.4}; }

// a = ceil(sqrt((200 a2 + 3)(e^6 + 1))) with a2 = 0.01
inline vpme::ClassParameters theorem_class() { return {45.0, 2.62, 0.01, 0.5, 0.0}; }

// Coarse grids; Nv keeps the velocity recurrence time 1/dv beyond the horizon.
inline vpme::RunConfig small_config(const vpme::ClassParameters& cls, double amplitude, double sigma, int nv = 96,
                                    double horizon = 0.0) {
  vpme::RunConfig c;
  c.datum.amplitude = amplitude;
  c.datum.sigma = sigma;
  c.cls = cls;
  c.grid.nx = 32;
  c.grid.nv = nv;
  if (horizon > 0.0) c.grid.horizon = horizon;
  c.grid.nt = 24;
  c.mode = vpme::RunMode::Exploratory;
  return c;
}

// Composite Simpson on [lo, hi] with n (even) panels.
template <typename F>
double simpson(F&& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = f(lo) + f(hi);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

inline double unit_gaussian(double v, double sigma) {
  return std::exp(-0.5 * v * v / (sigma * sigma)) / (std::sqrt(2.0 * M_PI) * sigma);
}

}  // namespace testing
