#include "vpme/characteristics.hpp"

#include <algorithm>

#include "vpme/periodic_spline.hpp"

namespace vpme {

TimeGrid::TimeGrid(double t0, double horizon, Eigen::Index nodes) : t0_(t0), horizon_(horizon), nodes_(nodes) {
  if (nodes < 2) throw ParameterError("time grid needs at least 2 nodes");
  if (!(horizon > t0)) throw ParameterError("time grid horizon must exceed its start");
}

FieldHistory::FieldHistory(TimeGrid time, SpatialGrid space, SliceMatrixXd ubar, SliceMatrixXd utilde,
                           SliceMatrixXd ebar, SliceMatrixXd etilde, double impulse_floor)
    : time_(time),
      space_(space),
      ubar_(std::move(ubar)),
      utilde_(std::move(utilde)),
      ebar_(std::move(ebar)),
      etilde_(std::move(etilde)) {
  const Eigen::Index nt = time_.size();
  const Eigen::Index nx = space_.size();
  for (const SliceMatrixXd* m : {&ubar_, &utilde_, &ebar_, &etilde_}) {
    if (m->rows() != nt || m->cols() != nx) throw ParameterError("field history samples do not match the grids");
  }
  if (!(impulse_floor >= 0.0)) throw ParameterError("impulse floor must be nonnegative");
  total_ = ebar_ + etilde_;

  // quiet index: first node whose remaining impulse is within the floor
  const double dt = time_.step();
  double tail = 0.0;
  quiet_index_ = nt - 1;
  bool quiet_tail = false;
  for (Eigen::Index i = nt - 1; i >= 0; --i) {
    tail += dt * total_.row(i).lpNorm<Eigen::Infinity>();
    if (tail <= impulse_floor) {
      quiet_index_ = i;
      quiet_tail = true;
    } else {
      break;
    }
  }
  // the flows ignore the field past the quiet time, so the stored field does too
  if (quiet_tail && impulse_floor > 0.0) {
    for (Eigen::Index i = quiet_index_; i < nt; ++i) {
      ubar_.row(i).setConstant(ubar_.row(i).mean());
      utilde_.row(i).setConstant(utilde_.row(i).mean());
      ebar_.row(i).setZero();
      etilde_.row(i).setZero();
      total_.row(i).setZero();
    }
  }

  moments_.resize(nt, nx);
  for (Eigen::Index i = 0; i < nt; ++i) moments_.row(i) = periodic_spline_moments(total_.row(i).transpose()).transpose();
}

FieldHistory FieldHistory::zero(const TimeGrid& time, const SpatialGrid& space) {
  const SliceMatrixXd z = SliceMatrixXd::Zero(time.size(), space.size());
  return FieldHistory(time, space, z, z, z, z);
}

FieldHistory FieldHistory::from_slices(const TimeGrid& time, const SpatialGrid& space,
                                       const std::vector<FieldSlice>& slices, double impulse_floor) {
  if (static_cast<Eigen::Index>(slices.size()) != time.size())
    throw ParameterError("slice count does not match the time grid");
  SliceMatrixXd ub(time.size(), space.size()), ut(time.size(), space.size());
  SliceMatrixXd eb(time.size(), space.size()), et(time.size(), space.size());
  for (Eigen::Index i = 0; i < time.size(); ++i) {
    const FieldSlice& s = slices[static_cast<std::size_t>(i)];
    ub.row(i) = s.ubar.transpose();
    ut.row(i) = s.utilde.transpose();
    eb.row(i) = s.ebar.transpose();
    et.row(i) = s.etilde.transpose();
  }
  return FieldHistory(time, space, std::move(ub), std::move(ut), std::move(eb), std::move(et), impulse_floor);
}

FieldHistory FieldHistory::from_fields(const TimeGrid& time, const SpatialGrid& space, SliceMatrixXd ebar,
                                       SliceMatrixXd etilde, double impulse_floor) {
  const SliceMatrixXd z = SliceMatrixXd::Zero(time.size(), space.size());
  FieldHistory h(time, space, z, z, std::move(ebar), std::move(etilde), impulse_floor);
  h.has_potentials_ = false;
  return h;
}

double FieldHistory::operator()(double t, double x) const {
  const double t0 = time_.start();
  const double dt = time_.step();
  if (t < t0 - 1e-12 * dt) throw OutOfRangeError("field sampled before t0");
  if (t > time_.horizon()) return 0.0;
  const Eigen::Index last = time_.size() - 1;
  const double s = std::max(0.0, (t - t0) / dt);
  Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), last - 1);
  const double frac = std::min(1.0, s - static_cast<double>(i));
  const double lo = periodic_spline_eval(total_.row(i), moments_.row(i), x);
  if (frac == 0.0) return lo;
  const double hi = periodic_spline_eval(total_.row(i + 1), moments_.row(i + 1), x);
  return (1.0 - frac) * lo + frac * hi;
}

FieldSlice FieldHistory::slice(Eigen::Index i) const {
  return FieldSlice{ubar_.row(i).transpose(), utilde_.row(i).transpose(), ebar_.row(i).transpose(),
                    etilde_.row(i).transpose()};
}

}  // namespace vpme
