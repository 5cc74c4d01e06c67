/**
 * @file    leveralign/strapdown.hpp
 * @brief   Body and navigation attitude-chain integrators.
 *
 * The body chain C_{b(t)}^{b(0)} is driven by gyro angle increments and the
 * navigation chain C_{n(t)}^{n(0)} by the local-level frame rate w_in^n.
 * Both chains start at identity and are right-multiplied by incremental
 * rotations; quaternions are renormalized after every step.
 */

#ifndef LEVERALIGN_STRAPDOWN_HPP
#define LEVERALIGN_STRAPDOWN_HPP

#include <span>

#include "leveralign/attitude.hpp"
#include "leveralign/earth.hpp"

namespace leveralign {

struct ImuSample {
  double t = 0.0;
  FrameVector<Frame::Body> omega_ib_b;  // [rad/s]
  FrameVector<Frame::Body> f_b;         // [m/s^2]
};

struct GnssSample {
  double t = 0.0;
  GeodeticPosition p_gps;
  FrameVector<Frame::Nav> v_gps_n;  // [m/s]
};

/// Angle increment over [t0, t0 + dt].
struct GyroIncrement {
  double t0 = 0.0;
  double dt = 0.0;
  Vec3 dtheta = Vec3::Zero();  // [rad]
};

/// Trapezoidal rate-to-increment conversion between two consecutive samples.
GyroIncrement trapezoid_increment(const ImuSample& a, const ImuSample& b);

struct AttitudeChainState {
  double t = 0.0;      // body chain epoch
  double nav_t = 0.0;  // navigation chain epoch
  UnitQuaternion<Frame::Body0, Frame::Body> body;
  UnitQuaternion<Frame::Nav0, Frame::Nav> nav;
  FrameVector<Frame::Body> omega_ib_b_0;
  bool omega_latched = false;
  Vec3 last_increment = Vec3::Zero();  // previous body increment, for coning

  static AttitudeChainState start(double t0) {
    AttitudeChainState s;
    s.t = t0;
    s.nav_t = t0;
    return s;
  }

  Rotation<Frame::Body0, Frame::Body> body_chain() const { return body.to_rotation(); }
  Rotation<Frame::Nav0, Frame::Nav> nav_chain() const { return nav.to_rotation(); }

  /// Latches w_ib^b(0). Throws Error when already latched.
  void latch_initial_rate(const FrameVector<Frame::Body>& w);
};

struct BodyChainOptions {
  /// Two-sample coning correction dtheta_k + (dtheta_{k-1} x dtheta_k) / 12.
  bool coning = false;
  double time_tolerance = 1e-9;
};

/// Advances C_{b(t)}^{b(0)}. Throws TimeError when an increment does not
/// start at the current epoch and DomainError when |dtheta| >= pi.
AttitudeChainState propagate_body_chain(AttitudeChainState state, std::span<const GyroIncrement> increments,
                                        const BodyChainOptions& options = {});

/// Advances C_{n(t)}^{n(0)} by the rotation vector omega_in_n * dt.
/// Throws DomainError when dt <= 0.
AttitudeChainState propagate_nav_chain(AttitudeChainState state, const FrameVector<Frame::Nav>& omega_in_n,
                                       double dt);

struct DerivedRates {
  FrameVector<Frame::Nav> omega_in_n;
  FrameVector<Frame::Nav> omega_ie_n;
  FrameVector<Frame::Nav> omega_en_n;
  FrameVector<Frame::Body> omega_ib_b;
  FrameVector<Frame::Body> omega_eb_b;
  FrameVector<Frame::Body> omega_nb_b;
  FrameVector<Frame::Body> omega_ie_b;
};

/// w_ie^b = C_n^b w_ie^n, w_eb^b = w_ib^b - w_ie^b, w_nb^b = w_ib^b - C_n^b w_in^n.
DerivedRates derive_rates(const Rotation<Frame::Nav, Frame::Body>& c_b_n, const FrameVector<Frame::Body>& omega_ib_b,
                          const GeodeticPosition& pos, const FrameVector<Frame::Nav>& v_n);

}  // namespace leveralign

#endif  // LEVERALIGN_STRAPDOWN_HPP
