#include "meshsort/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "meshsort/errors.hpp"

namespace meshsort {
namespace {

constexpr double kMinScale = 1e-6;

struct References {
  double height;
  double area;
  double ratio;
};

References references(double area, double ratio) {
  const double a = std::max(std::abs(area), kMinScale);
  const double r = std::max(std::abs(ratio), kMinScale);
  return {std::sqrt(a / r), a, r};
}

Eigen::Vector4d slot_std(const References& ref, double weight) {
  return {weight * ref.height, weight * ref.height, weight * ref.area, weight * ref.ratio};
}

StateMatrix symmetrized(const StateMatrix& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

MotionModel::MotionModel(NoiseWeights weights) : weights_(weights) {
  if (!(weights.position > 0.0) || !(weights.velocity > 0.0)) {
    throw std::invalid_argument("noise weights must be positive");
  }
  transition_ = StateMatrix::Identity();
  for (int i = 0; i < 4; ++i) transition_(i, i + 4) = 1.0;
  observation_ = ObservationMatrix::Zero();
  for (int i = 0; i < 4; ++i) observation_(i, i) = 1.0;
}

StateMatrix MotionModel::process_noise(const StateVector& mean) const {
  const auto ref = references(mean[2], mean[3]);
  StateVector std;
  std << slot_std(ref, weights_.position), slot_std(ref, weights_.velocity);
  return std.array().square().matrix().asDiagonal();
}

Eigen::Matrix4d MotionModel::measurement_noise(const StateVector& mean) const {
  const auto ref = references(mean[2], mean[3]);
  return slot_std(ref, weights_.position).array().square().matrix().asDiagonal();
}

StateMatrix MotionModel::initial_covariance(const Measurement& z) const {
  const auto ref = references(z[2], z[3]);
  StateVector std;
  std << slot_std(ref, 2.0 * weights_.position), slot_std(ref, 20.0 * weights_.position);
  return std.array().square().matrix().asDiagonal();
}

KalmanTrackState initiate(const Measurement& z, const MotionModel& model) {
  KalmanTrackState s;
  s.mean.head<4>() = z;
  s.mean.tail<4>().setZero();
  s.covariance = model.initial_covariance(z);
  return s;
}

KalmanTrackState predict(const KalmanTrackState& s, const MotionModel& model) {
  const auto& f = model.transition();
  KalmanTrackState out;
  out.mean = f * s.mean;
  out.covariance = symmetrized(f * s.covariance * f.transpose() + model.process_noise(s.mean));
  return out;
}

GainMatrix kalman_gain(const KalmanTrackState& prior, const MotionModel& model,
                       double noise_scale) {
  const auto& h = model.observation();
  const Eigen::Matrix4d innovation_cov =
      h * prior.covariance * h.transpose() + noise_scale * model.measurement_noise(prior.mean);
  const Eigen::LLT<Eigen::Matrix4d> llt(innovation_cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("innovation covariance is not positive definite");
  }
  // K = P H^T S^-1, solved as S K^T = H P.
  const Eigen::Matrix<double, 4, 8> kt = llt.solve(h * prior.covariance);
  if (!kt.allFinite()) throw NumericalError("non-finite Kalman gain");
  return kt.transpose();
}

KalmanTrackState update(const KalmanTrackState& prior, const Measurement& z,
                        const MotionModel& model, double noise_scale) {
  const auto& h = model.observation();
  const GainMatrix k = kalman_gain(prior, model, noise_scale);
  KalmanTrackState out;
  out.mean = prior.mean + k * (z - h * prior.mean);
  out.covariance = symmetrized((StateMatrix::Identity() - k * h) * prior.covariance);
  return out;
}

Measurement project(const KalmanTrackState& s) { return s.mean.head<4>(); }

BoundingBox state_box(const KalmanTrackState& s) {
  Measurement z = s.mean.head<4>();
  z[2] = std::max(z[2], kMinScale);
  z[3] = std::max(z[3], kMinScale);
  return measurement_to_box(z);
}

VelocityBuffer::VelocityBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("velocity buffer capacity must be positive");
}

void VelocityBuffer::record(const KalmanTrackState& s) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back(s.velocity());
}

Velocity VelocityBuffer::average() const {
  Velocity sum = Velocity::Zero();
  for (const auto& v : entries_) sum += v;
  return entries_.empty() ? sum : Velocity(sum / static_cast<double>(entries_.size()));
}

std::optional<KalmanTrackState> rollback_velocity(const KalmanTrackState& s,
                                                  const VelocityBuffer& vb, RollbackMode mode,
                                                  bool zero_size_rate) {
  if (vb.empty()) return std::nullopt;
  KalmanTrackState out = s;
  out.mean.tail<4>() = mode == RollbackMode::Oldest ? vb.oldest() : vb.average();
  if (zero_size_rate) {
    out.mean[6] = 0.0;
    out.mean[7] = 0.0;
  }
  return out;
}

}  // namespace meshsort
