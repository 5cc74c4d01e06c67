#include "leveralign/alignment.hpp"

#include <algorithm>
#include <cmath>

#include "leveralign/error.hpp"

namespace leveralign {

namespace {

constexpr double kEpochTolerance = 1e-9;

Vec3 componentwise_median(std::vector<Vec3> samples) {
  Vec3 out;
  const std::size_t n = samples.size();
  for (int axis = 0; axis < 3; ++axis) {
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = samples[i](axis);
    std::sort(c.begin(), c.end());
    out(axis) = (n % 2 == 1) ? c[n / 2] : 0.5 * (c[n / 2 - 1] + c[n / 2]);
  }
  return out;
}

}  // namespace

LeverArm::LeverArm(const Vec3& l_b) : l_b_(l_b) {
  if (!l_b.allFinite()) throw DomainError("lever arm must be finite");
  if (!(l_b.norm() < 100.0)) throw DomainError("lever arm of 100 m or more");
}

FrameVector<Frame::Nav> lever_arm_velocity(const FrameVector<Frame::Nav>& v_n,
                                           const Rotation<Frame::Nav, Frame::Body>& c_b_n,
                                           const FrameVector<Frame::Body>& omega_eb_b, const LeverArm& lever) {
  return v_n + c_b_n * cross(omega_eb_b, lever.l_b());
}

FrameVector<Frame::Nav> reference_point_velocity(const FrameVector<Frame::Nav>& v_gps_n,
                                                 const Rotation<Frame::Nav, Frame::Body>& c_b_n,
                                                 const FrameVector<Frame::Body>& omega_eb_b, const LeverArm& lever) {
  return v_gps_n - c_b_n * cross(omega_eb_b, lever.l_b());
}

AlignmentAccumulator::AlignmentAccumulator(LeverArm lever, AccumulatorOptions options)
    : lever_(std::move(lever)), options_(options) {
  if (!(options_.nominal_dt > 0.0)) throw DomainError("nominal IMU interval must be positive");
  if (!(options_.settle_time >= 0.0)) throw DomainError("settle time must be non-negative");
}

void AlignmentAccumulator::accumulate(std::span<const AlignmentStep> steps) {
  for (const AlignmentStep& s : steps) accumulate(s);
}

void AlignmentAccumulator::accumulate(const AlignmentStep& step) {
  const ImuSample& imu = step.imu;
  const FrameVector<Frame::Nav> omega_in = step.earth.omega_in_n();
  if (!step.truth) truth_complete_ = false;

  if (!started_) {
    started_ = true;
    t0_ = imu.t;
    chain_ = AttitudeChainState::start(imu.t);
    v_gps_0_ = step.v_gps_n;
    settle_rates_.push_back(imu.omega_ib_b.v);
    if (step.truth) {
      omega_eb_0_ = step.truth->omega_eb_b;
      omega_eb_t_ = step.truth->omega_eb_b;
      omega_ie_b0_ = step.truth->omega_ie_b;
      prev_lever_ = skew(step.truth->omega_eb_b);
    }
  } else {
    const double dt = imu.t - last_imu_.t;
    if (!(dt > 0.0)) throw TimeError("IMU time must be strictly increasing");
    if (dt > options_.gap_factor * options_.nominal_dt) throw TimeError("IMU data dropout");

    const GyroIncrement inc = trapezoid_increment(last_imu_, imu);
    chain_ = propagate_body_chain(chain_, std::span<const GyroIncrement>(&inc, 1),
                                  BodyChainOptions{options_.coning, kEpochTolerance * std::max(1.0, std::abs(imu.t))});
    chain_ = propagate_nav_chain(chain_, 0.5 * (last_omega_in_ + omega_in), dt);

    if (settling_) {
      if (imu.t - t0_ <= options_.settle_time + kEpochTolerance) {
        settle_rates_.push_back(imu.omega_ib_b.v);
      } else {
        settling_ = false;
        chain_.latch_initial_rate(FrameVector<Frame::Body>(componentwise_median(settle_rates_)));
      }
    }
  }

  const auto c_b = chain_.body_chain();
  const auto c_n = chain_.nav_chain();
  const FrameVector<Frame::Body0> fv = c_b * imu.f_b;
  const FrameVector<Frame::Nav0> cor = c_n * cross(step.earth.omega_ie_n, step.v_gps_n);
  const FrameVector<Frame::Nav0> g = c_n * step.earth.gravity_n;

  if (chain_.t > t0_) {
    const double half_dt = 0.5 * (imu.t - last_imu_.t);
    i_fv_ += half_dt * (prev_fv_ + fv);
    i_cor_ += half_dt * (prev_cor_ + cor);
    i_g_ += half_dt * (prev_g_ + g);
    if (step.truth && truth_complete_) {
      const Mat3 lever_integrand = c_b.matrix() * skew(step.truth->omega_eb_b);
      i_lever_ += half_dt * (prev_lever_ + lever_integrand);
      prev_lever_ = lever_integrand;
      omega_eb_t_ = step.truth->omega_eb_b;
    }
  }
  prev_fv_ = fv;
  prev_cor_ = cor;
  prev_g_ = g;
  last_imu_ = imu;
  last_v_gps_ = step.v_gps_n;
  last_omega_in_ = omega_in;
}

FrameVector<Frame::Body> AlignmentAccumulator::initial_rate() const {
  if (chain_.omega_latched) return chain_.omega_ib_b_0;
  if (settle_rates_.empty()) throw Error("no IMU samples accumulated");
  return FrameVector<Frame::Body>(componentwise_median(settle_rates_));
}

void AlignmentAccumulator::require_epoch(double t) const {
  if (!started_) throw Error("observation pair requested before any accumulation");
  if (std::abs(t - chain_.t) > kEpochTolerance * std::max(1.0, std::abs(t))) {
    throw TimeError("observation pair requested away from the accumulator epoch");
  }
}

FrameVector<Frame::Nav0> AlignmentAccumulator::alpha() const {
  return chain_.nav_chain() * last_v_gps_ - FrameVector<Frame::Nav0>(v_gps_0_.v) + i_cor_ - i_g_;
}

FrameVector<Frame::Body0> AlignmentAccumulator::lever_coefficient() const {
  const Mat3 coef = chain_.body_chain().matrix() * skew(last_imu_.omega_ib_b) - skew(initial_rate());
  return FrameVector<Frame::Body0>(Vec3(coef * lever_.l_b().v));
}

ObservationPair AlignmentAccumulator::emit_pair(double t, double weight) const {
  require_epoch(t);
  ObservationPair p{t, alpha(), i_fv_, weight};
  if (!lever_.is_zero()) p.beta += lever_coefficient();
  return p;
}

ObservationPair AlignmentAccumulator::emit_pair_exact(double t, double weight) const {
  require_epoch(t);
  if (!truth_complete_) throw Error("exact-form pair requires truth rates for every accumulated step");
  ObservationPair p{t, alpha(), i_fv_, weight};
  if (!lever_.is_zero()) {
    const Mat3 coef = chain_.body_chain().matrix() * skew(omega_eb_t_) - skew(omega_eb_0_) +
                      skew(omega_ie_b0_) * i_lever_;
    p.beta += FrameVector<Frame::Body0>(Vec3(coef * lever_.l_b().v));
  }
  return p;
}

std::optional<double> AlignmentAccumulator::approximation_ratio() const {
  if (!has_truth()) throw Error("approximation ratio requires truth rates");
  const double denom = (chain_.body_chain().matrix() * skew(omega_eb_t_)).norm();
  if (!(denom > 1e-300)) return std::nullopt;
  return (skew(omega_ie_b0_) * i_lever_).norm() / denom;
}

LeverTermGrowth AlignmentAccumulator::lever_term_growth() const {
  if (!started_) return {};
  return {i_fv_.norm(), lever_coefficient().norm()};
}

}  // namespace leveralign
