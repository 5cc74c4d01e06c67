#include "leveralign/simkit.hpp"

#include <cmath>
#include <numbers>

#include "leveralign/error.hpp"

namespace leveralign {

namespace {

// Shaping constant for the coordinated-turn bank angle.
constexpr double kBankGravity = 9.80665;

struct Kinematics {
  double speed, speed_rate;
  double heading, heading_rate, heading_accel;
};

Kinematics profile_kinematics(const TrajectoryProfile& p, double t) {
  Kinematics k{p.speed, 0.0, p.initial_heading, 0.0, 0.0};
  switch (p.kind) {
    case ProfileKind::StraightAccelerate:
      k.speed = p.speed + p.acceleration * t;
      k.speed_rate = p.acceleration;
      break;
    case ProfileKind::STurnWeave: {
      const double w = 2.0 * std::numbers::pi / p.weave_period;
      k.heading += p.turn_rate / w * (1.0 - std::cos(w * t));
      k.heading_rate = p.turn_rate * std::sin(w * t);
      k.heading_accel = p.turn_rate * w * std::cos(w * t);
      break;
    }
    case ProfileKind::ClimbingTurn: {
      // Turn-rate ramp r * (tau - sin(2 pi tau) / (2 pi)): the angular
      // acceleration starts and ends at zero.
      const double r = p.turn_rate;
      const double ts = t - p.maneuver_onset;
      if (ts < 0.0) break;
      if (ts < p.roll_in_time) {
        const double T = p.roll_in_time;
        const double tau = ts / T;
        const double w = 2.0 * std::numbers::pi * tau;
        k.heading += r * T * (0.5 * tau * tau + (std::cos(w) - 1.0) / (4.0 * std::numbers::pi * std::numbers::pi));
        k.heading_rate = r * (tau - std::sin(w) / (2.0 * std::numbers::pi));
        k.heading_accel = r * (1.0 - std::cos(w)) / T;
      } else {
        k.heading += r * (0.5 * p.roll_in_time + (ts - p.roll_in_time));
        k.heading_rate = r;
      }
      break;
    }
  }
  return k;
}

Vec3 velocity_at(const TrajectoryProfile& p, double t) {
  const Kinematics k = profile_kinematics(p, t);
  const double cg = std::cos(p.climb_angle);
  return k.speed * Vec3(cg * std::cos(k.heading), cg * std::sin(k.heading), -std::sin(p.climb_angle));
}

Vec3 position_rate(const GeodeticPosition& pos, const Vec3& v) {
  const CurvatureRadii r = curvature_radii(pos.lat);
  return {v.x() / (r.meridian + pos.height), v.y() / ((r.transverse + pos.height) * std::cos(pos.lat)), -v.z()};
}

GeodeticPosition advance(const GeodeticPosition& p, const Vec3& d, double h) {
  return {p.lat + h * d.x(), p.lon + h * d.y(), p.height + h * d.z()};
}

TruthState make_state(const TrajectoryProfile& p, double t, const GeodeticPosition& pos) {
  const Kinematics k = profile_kinematics(p, t);
  const double gamma = p.climb_angle;
  const double cg = std::cos(gamma), sg = std::sin(gamma);
  const double ch = std::cos(k.heading), sh = std::sin(k.heading);

  TruthState s;
  s.t = t;
  s.pos = pos;
  s.heading = k.heading;
  s.v_n = FrameVector<Frame::Nav>(k.speed * cg * ch, k.speed * cg * sh, -k.speed * sg);
  s.a_n = FrameVector<Frame::Nav>(Vec3(k.speed_rate * Vec3(cg * ch, cg * sh, -sg) +
                                       k.speed * cg * k.heading_rate * Vec3(-sh, ch, 0.0)));

  const double u = k.speed * k.heading_rate * cg / kBankGravity;
  const double u_rate = (k.speed_rate * k.heading_rate + k.speed * k.heading_accel) * cg / kBankGravity;
  const double roll = std::atan(u);
  const double roll_rate = u_rate / (1.0 + u * u);
  const double pitch = gamma;
  s.c_b_n = Rotation<Frame::Nav, Frame::Body>::from_matrix(matrix_from_euler({roll, pitch, k.heading}));

  const double cr = std::cos(roll), sr = std::sin(roll);
  s.omega_nb_b = FrameVector<Frame::Body>(roll_rate - k.heading_rate * std::sin(pitch),
                                          k.heading_rate * std::cos(pitch) * sr,
                                          k.heading_rate * std::cos(pitch) * cr);
  return s;
}

}  // namespace

void validate(const TrajectoryProfile& p) {
  auto bad = [](const char* what) { throw DomainError(what); };
  if (!(p.speed >= 0.0 && p.speed < 400.0)) bad("speed must lie in [0, 400) m/s");
  if (!(std::abs(p.turn_rate) < 0.5)) bad("turn rate must be below 0.5 rad/s");
  if (!(p.duration > 0.0)) bad("duration must be positive");
  if (!(std::abs(p.climb_angle) < 0.5)) bad("climb angle must be below 0.5 rad");
  if (p.kind == ProfileKind::StraightAccelerate) {
    const double end_speed = p.speed + p.acceleration * p.duration;
    if (!(end_speed >= 0.0 && end_speed < 400.0)) bad("accelerated speed leaves [0, 400) m/s");
  }
  if (p.kind == ProfileKind::ClimbingTurn && (!(p.maneuver_onset >= 0.0) || !(p.roll_in_time >= 0.0))) {
    bad("maneuver onset and roll-in time must be non-negative");
  }
  if (p.kind == ProfileKind::STurnWeave && !(p.weave_period > 0.0)) bad("weave period must be positive");
  validated(p.initial);
  if (std::abs(p.initial.lat) > 1.4) bad("initial latitude too close to a pole");
}

std::vector<TruthState> gen_trajectory(const TrajectoryProfile& profile, double dt) {
  validate(profile);
  if (!(dt >= 1e-3 && dt <= 0.1)) throw DomainError("truth interval must lie in [1e-3, 0.1] s");

  const auto n = static_cast<std::size_t>(std::llround(profile.duration / dt));
  std::vector<TruthState> out;
  out.reserve(n + 1);
  GeodeticPosition pos = validated(profile.initial);
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) * dt;
    out.push_back(make_state(profile, t, pos));
    // RK4 on the geodetic position with the analytic velocity.
    const Vec3 k1 = position_rate(pos, velocity_at(profile, t));
    const Vec3 k2 = position_rate(advance(pos, k1, 0.5 * dt), velocity_at(profile, t + 0.5 * dt));
    const Vec3 k3 = position_rate(advance(pos, k2, 0.5 * dt), velocity_at(profile, t + 0.5 * dt));
    const Vec3 k4 = position_rate(advance(pos, k3, dt), velocity_at(profile, t + dt));
    pos = advance(pos, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, dt);
  }
  return out;
}

std::vector<ImuSample> synthesize_imu(std::span<const TruthState> truth) {
  std::vector<ImuSample> out;
  out.reserve(truth.size());
  for (const TruthState& s : truth) {
    const EarthKinematics ek = earth_kinematics(s.pos, s.v_n);
    const auto c_n_b = s.c_b_n.transpose();
    const auto coriolis = cross(2.0 * ek.omega_ie_n + ek.omega_en_n, s.v_n);
    ImuSample imu;
    imu.t = s.t;
    imu.f_b = c_n_b * (s.a_n + coriolis - ek.gravity_n);
    imu.omega_ib_b = s.omega_nb_b + c_n_b * ek.omega_in_n();
    out.push_back(imu);
  }
  return out;
}

std::vector<DerivedRates> truth_rates(std::span<const TruthState> truth, std::span<const ImuSample> perfect_imu) {
  if (truth.size() != perfect_imu.size()) throw Error("truth and IMU streams differ in length");
  std::vector<DerivedRates> out;
  out.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.push_back(derive_rates(truth[i].c_b_n, perfect_imu[i].omega_ib_b, truth[i].pos, truth[i].v_n));
  }
  return out;
}

void validate(const SensorErrorModel& m) {
  if (!m.gyro_bias.allFinite() || !m.accel_bias.allFinite()) throw DomainError("sensor biases must be finite");
  if (!(m.gyro_arw >= 0.0) || !(m.accel_vrw >= 0.0) || !(m.gnss_vel_sigma >= 0.0) || !(m.gnss_pos_sigma >= 0.0)) {
    throw DomainError("noise densities must be non-negative");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t run_index, NoiseChannel channel) {
  return splitmix64(splitmix64(splitmix64(seed) ^ run_index) ^ static_cast<std::uint64_t>(channel));
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t run_index, NoiseChannel channel)
    : engine_(stream_key(seed, run_index, channel)), normal_(0.0, 1.0) {}

std::vector<GnssSample> synthesize_gnss(std::span<const TruthState> truth, std::span<const DerivedRates> rates,
                                        const LeverArm& lever, const SensorErrorModel& err, double gnss_dt,
                                        std::uint64_t run_index) {
  validate(err);
  if (truth.size() != rates.size()) throw Error("truth and rate streams differ in length");
  if (truth.empty()) return {};
  const double dt = truth.size() > 1 ? truth[1].t - truth[0].t : gnss_dt;
  const double ratio = gnss_dt / dt;
  const auto stride = static_cast<std::size_t>(std::llround(ratio));
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-6) {
    throw DomainError("GNSS interval must be an integer multiple of the truth interval");
  }

  NoiseStream vel_noise(err.seed, run_index, NoiseChannel::GnssVelocity);
  NoiseStream pos_noise(err.seed, run_index, NoiseChannel::GnssPosition);
  std::vector<GnssSample> out;
  out.reserve(truth.size() / stride + 1);
  for (std::size_t i = 0; i < truth.size(); i += stride) {
    const TruthState& s = truth[i];
    GnssSample g;
    g.t = s.t;
    g.v_gps_n = lever_arm_velocity(s.v_n, s.c_b_n, rates[i].omega_eb_b, lever);
    FrameVector<Frame::Nav> offset = s.c_b_n * lever.l_b();
    if (err.gnss_vel_sigma > 0.0) {
      const Vec3 n(vel_noise.next(), vel_noise.next(), vel_noise.next());
      g.v_gps_n += FrameVector<Frame::Nav>(Vec3(err.gnss_vel_sigma * n));
    }
    if (err.gnss_pos_sigma > 0.0) {
      const Vec3 n(pos_noise.next(), pos_noise.next(), pos_noise.next());
      offset += FrameVector<Frame::Nav>(Vec3(err.gnss_pos_sigma * n));
    }
    g.p_gps = offset_position(s.pos, offset);
    out.push_back(g);
  }
  return out;
}

std::vector<ImuSample> apply_imu_errors(std::span<const ImuSample> stream, const SensorErrorModel& err,
                                        std::uint64_t run_index) {
  validate(err);
  std::vector<ImuSample> out(stream.begin(), stream.end());
  if (stream.size() < 2) return out;
  const double dt = stream[1].t - stream[0].t;
  if (!(dt > 0.0)) throw TimeError("IMU samples must be strictly increasing in time");
  const double gyro_sigma = err.gyro_arw / std::sqrt(dt);
  const double accel_sigma = err.accel_vrw / std::sqrt(dt);

  NoiseStream gyro[3] = {{err.seed, run_index, NoiseChannel::GyroX},
                         {err.seed, run_index, NoiseChannel::GyroY},
                         {err.seed, run_index, NoiseChannel::GyroZ}};
  NoiseStream accel[3] = {{err.seed, run_index, NoiseChannel::AccelX},
                          {err.seed, run_index, NoiseChannel::AccelY},
                          {err.seed, run_index, NoiseChannel::AccelZ}};
  for (ImuSample& s : out) {
    for (int a = 0; a < 3; ++a) {
      s.omega_ib_b.v(a) += err.gyro_bias(a);
      s.f_b.v(a) += err.accel_bias(a);
      if (gyro_sigma > 0.0) s.omega_ib_b.v(a) += gyro_sigma * gyro[a].next();
      if (accel_sigma > 0.0) s.f_b.v(a) += accel_sigma * accel[a].next();
    }
  }
  return out;
}

}  // namespace leveralign
