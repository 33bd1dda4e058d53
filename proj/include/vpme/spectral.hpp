#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "vpme/types.hpp"

namespace vpme {

// Fourier-side operators for samples on a uniform grid of [0,1).
// Wavenumber k corresponds to exp(2*pi*i*k*x); the Nyquist mode of an even
// grid is dropped for odd-order operators.
template <typename Scalar>
class PeriodicSpectral {
 public:
  using Complex = std::complex<Scalar>;

  explicit PeriodicSpectral(Eigen::Index n) : n_(n) {}

  Eigen::Index size() const { return n_; }

  /// d/dx
  template <typename Derived>
  Vector<Scalar> derivative(const Eigen::MatrixBase<Derived>& values) {
    return apply(values, [](Eigen::Index k, bool nyquist) -> Complex {
      if (nyquist) return Complex(0);
      return Complex(0, Scalar(kTwoPi) * Scalar(k));
    });
  }

  /// Zero-mean u with u'' = source - mean(source).
  template <typename Derived>
  Vector<Scalar> inverse_laplacian(const Eigen::MatrixBase<Derived>& source) {
    return apply(source, [](Eigen::Index k, bool) -> Complex {
      if (k == 0) return Complex(0);
      const Scalar w = Scalar(kTwoPi) * Scalar(k);
      return Complex(-Scalar(1) / (w * w));
    });
  }

  /// Zero-mean w with w' = source - mean(source).
  template <typename Derived>
  Vector<Scalar> antiderivative(const Eigen::MatrixBase<Derived>& source) {
    return apply(source, [](Eigen::Index k, bool nyquist) -> Complex {
      if (k == 0 || nyquist) return Complex(0);
      return Complex(Scalar(1)) / Complex(0, Scalar(kTwoPi) * Scalar(k));
    });
  }

  /// Fourier coefficients c_k = (1/N) sum_j u_j exp(-2 pi i k x_j), index k mod N.
  template <typename Derived>
  std::vector<Complex> coefficients(const Eigen::MatrixBase<Derived>& values) {
    std::vector<Scalar> in(values.derived().data(), values.derived().data() + n_);
    std::vector<Complex> out;
    fft_.fwd(out, in);
    for (auto& c : out) c /= Scalar(n_);
    return out;
  }

 private:
  template <typename Derived, typename Symbol>
  Vector<Scalar> apply(const Eigen::MatrixBase<Derived>& values, Symbol symbol) {
    Vector<Scalar> tmp = values;
    std::vector<Scalar> in(tmp.data(), tmp.data() + n_);
    std::vector<Complex> spec;
    fft_.fwd(spec, in);
    for (Eigen::Index idx = 0; idx < n_; ++idx) {
      const Eigen::Index k = idx <= n_ / 2 ? idx : idx - n_;
      const bool nyquist = (n_ % 2 == 0) && idx == n_ / 2;
      spec[static_cast<std::size_t>(idx)] *= symbol(k, nyquist);
    }
    std::vector<Scalar> out;
    fft_.inv(out, spec);
    return Eigen::Map<Vector<Scalar>>(out.data(), n_);
  }

  Eigen::Index n_;
  Eigen::FFT<Scalar> fft_;
};

}  // namespace vpme
