#include "leveralign/strapdown.hpp"

#include <cmath>
#include <numbers>

#include "leveralign/error.hpp"

namespace leveralign {

GyroIncrement trapezoid_increment(const ImuSample& a, const ImuSample& b) {
  const double dt = b.t - a.t;
  if (!(dt > 0.0)) throw TimeError("IMU samples must be strictly increasing in time");
  return {a.t, dt, 0.5 * dt * (a.omega_ib_b.v + b.omega_ib_b.v)};
}

void AttitudeChainState::latch_initial_rate(const FrameVector<Frame::Body>& w) {
  if (omega_latched) throw Error("initial angular rate already latched");
  omega_ib_b_0 = w;
  omega_latched = true;
}

AttitudeChainState propagate_body_chain(AttitudeChainState state, std::span<const GyroIncrement> increments,
                                        const BodyChainOptions& options) {
  for (const GyroIncrement& inc : increments) {
    if (std::abs(inc.t0 - state.t) > options.time_tolerance) {
      throw TimeError("gyro increment is not contiguous with the chain epoch");
    }
    if (!(inc.dt > 0.0)) throw TimeError("gyro increment has non-positive duration");
    if (!(inc.dtheta.norm() < std::numbers::pi)) throw DomainError("gyro increment of pi or more");
    Vec3 phi = inc.dtheta;
    if (options.coning) phi += state.last_increment.cross(inc.dtheta) / 12.0;
    state.body.rotate_by(phi);
    state.last_increment = inc.dtheta;
    state.t = inc.t0 + inc.dt;
  }
  return state;
}

AttitudeChainState propagate_nav_chain(AttitudeChainState state, const FrameVector<Frame::Nav>& omega_in_n,
                                       double dt) {
  if (!(dt > 0.0)) throw DomainError("navigation chain step requires dt > 0");
  state.nav.rotate_by(omega_in_n.v * dt);
  state.nav_t += dt;
  return state;
}

DerivedRates derive_rates(const Rotation<Frame::Nav, Frame::Body>& c_b_n, const FrameVector<Frame::Body>& omega_ib_b,
                          const GeodeticPosition& pos, const FrameVector<Frame::Nav>& v_n) {
  const auto c_n_b = c_b_n.transpose();
  DerivedRates r;
  r.omega_ie_n = earth_rate_n(pos.lat);
  r.omega_en_n = transport_rate(v_n, pos);
  r.omega_in_n = r.omega_ie_n + r.omega_en_n;
  r.omega_ib_b = omega_ib_b;
  r.omega_ie_b = c_n_b * r.omega_ie_n;
  r.omega_eb_b = omega_ib_b - r.omega_ie_b;
  r.omega_nb_b = omega_ib_b - c_n_b * r.omega_in_n;
  return r;
}

}  // namespace leveralign
