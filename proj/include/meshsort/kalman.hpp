#pragma once

#include <cstddef>
#include <deque>
#include <optional>

#include <Eigen/Core>

#include "meshsort/geometry.hpp"

namespace meshsort {

using StateVector = Eigen::Matrix<double, 8, 1>;
using StateMatrix = Eigen::Matrix<double, 8, 8>;
using ObservationMatrix = Eigen::Matrix<double, 4, 8>;
using GainMatrix = Eigen::Matrix<double, 8, 4>;
using Velocity = Eigen::Vector4d;

/// Mean [x_c, y_c, a, r, dx_c, dy_c, da, dr] and covariance of one track.
struct KalmanTrackState {
  StateVector mean = StateVector::Zero();
  StateMatrix covariance = StateMatrix::Identity();

  Measurement position() const { return mean.head<4>(); }
  Velocity velocity() const { return mean.tail<4>(); }
};

/// Standard deviations are proportional to a per-slot reference taken from
/// the current state: the box height for the center slots, the area itself
/// for the area slot and the ratio itself for the ratio slot.
struct NoiseWeights {
  double position = 1.0 / 20.0;
  double velocity = 1.0 / 160.0;
};

/// Constant-velocity model over the 8-dimensional box state.
class MotionModel {
 public:
  explicit MotionModel(NoiseWeights weights = {});

  const StateMatrix& transition() const { return transition_; }
  const ObservationMatrix& observation() const { return observation_; }
  const NoiseWeights& weights() const { return weights_; }

  StateMatrix process_noise(const StateVector& mean) const;
  Eigen::Matrix4d measurement_noise(const StateVector& mean) const;
  /// Diagonal. Position/size std is 2 * position weight times the slot
  /// reference; velocity std is ten times that.
  StateMatrix initial_covariance(const Measurement& z) const;

 private:
  NoiseWeights weights_;
  StateMatrix transition_;
  ObservationMatrix observation_;
};

KalmanTrackState initiate(const Measurement& z, const MotionModel& model);

KalmanTrackState predict(const KalmanTrackState& s, const MotionModel& model);

/// Gain P H^T (H P H^T + R)^-1 for the given prior. `noise_scale` multiplies R.
/// Throws NumericalError when the innovation covariance is not positive definite.
GainMatrix kalman_gain(const KalmanTrackState& prior, const MotionModel& model,
                       double noise_scale = 1.0);

KalmanTrackState update(const KalmanTrackState& prior, const Measurement& z,
                        const MotionModel& model, double noise_scale = 1.0);

/// H x: the measurement the state expects.
Measurement project(const KalmanTrackState& s);

/// Box of the state's position slots. Area and ratio are floored at a small
/// positive value so a diverged prediction still yields a usable box.
BoundingBox state_box(const KalmanTrackState& s);

enum class RollbackMode { Oldest, Mean };

/// Ring buffer of observation-backed velocities, newest at the back.
class VelocityBuffer {
 public:
  explicit VelocityBuffer(std::size_t capacity = 5);

  /// Appends the state's velocity, evicting the oldest entry at capacity.
  void record(const KalmanTrackState& s);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const Velocity& oldest() const { return entries_.front(); }
  const Velocity& newest() const { return entries_.back(); }
  Velocity average() const;
  const std::deque<Velocity>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::deque<Velocity> entries_;
};

/// Replaces the state's velocity with a buffered one. Position, size and
/// covariance are left alone. Returns std::nullopt (no history) when the
/// buffer is empty. With `zero_size_rate` the area and ratio rates are
/// cleared after the replacement.
std::optional<KalmanTrackState> rollback_velocity(const KalmanTrackState& s,
                                                  const VelocityBuffer& vb,
                                                  RollbackMode mode = RollbackMode::Oldest,
                                                  bool zero_size_rate = false);

}  // namespace meshsort
