/**
 * @file    leveralign/simkit.hpp
 * @brief   Truth trajectories and synthetic IMU / GNSS streams.
 *
 * Trajectories are analytic in speed, heading and flight-path angle; only
 * the geodetic position is integrated (RK4 on the analytic velocity). Bank
 * follows a coordinated turn. IMU outputs are the exact inverse of the NED
 * velocity and attitude dynamics, so a perfect strapdown integration
 * reproduces the truth up to its own discretization error.
 */

#ifndef LEVERALIGN_SIMKIT_HPP
#define LEVERALIGN_SIMKIT_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "leveralign/alignment.hpp"
#include "leveralign/attitude.hpp"
#include "leveralign/earth.hpp"
#include "leveralign/strapdown.hpp"

namespace leveralign {

enum class ProfileKind { StraightAccelerate, STurnWeave, ClimbingTurn };

struct TrajectoryProfile {
  ProfileKind kind = ProfileKind::ClimbingTurn;
  double speed = 100.0;         // initial airspeed [m/s]
  double turn_rate = 0.05;      // steady turn rate or weave amplitude [rad/s]
  double duration = 60.0;       // [s]
  GeodeticPosition initial{0.5235987755982988, 1.9896753472735356, 1000.0};
  double initial_heading = 0.0;  // [rad]
  double climb_angle = 0.02;     // flight-path angle [rad]
  double acceleration = 1.0;     // straight-accelerate only [m/s^2]
  double maneuver_onset = 2.0;   // climbing turn: straight lead-in [s]
  double roll_in_time = 12.0;    // climbing turn: turn-rate ramp [s]
  double weave_period = 30.0;    // s-turn only [s]
};

/// Throws DomainError for out-of-bounds parameters.
void validate(const TrajectoryProfile& profile);

struct TruthState {
  double t = 0.0;
  GeodeticPosition pos;
  FrameVector<Frame::Nav> v_n;
  FrameVector<Frame::Nav> a_n;  // time derivative of the NED velocity components
  Rotation<Frame::Nav, Frame::Body> c_b_n;
  FrameVector<Frame::Body> omega_nb_b;
  double heading = 0.0;
};

/// Samples the profile every `dt` over [0, duration]. dt must lie in [1e-3, 0.1].
std::vector<TruthState> gen_trajectory(const TrajectoryProfile& profile, double dt);

/// Error-free IMU stream: f^b = C_n^b (a^n + (2 w_ie^n + w_en^n) x v^n - g^n),
/// w_ib^b = w_nb^b + C_n^b w_in^n.
std::vector<ImuSample> synthesize_imu(std::span<const TruthState> truth);

/// Exact body rates for each truth state, given the matching perfect IMU stream.
std::vector<DerivedRates> truth_rates(std::span<const TruthState> truth, std::span<const ImuSample> perfect_imu);

struct SensorErrorModel {
  Vec3 gyro_bias = Vec3::Zero();   // [rad/s]
  double gyro_arw = 0.0;           // [rad/sqrt(s)]
  Vec3 accel_bias = Vec3::Zero();  // [m/s^2]
  double accel_vrw = 0.0;          // [m/s/sqrt(s)]
  double gnss_vel_sigma = 0.0;     // [m/s]
  double gnss_pos_sigma = 0.0;     // [m]
  std::uint64_t seed = 0;
};

void validate(const SensorErrorModel& model);

/// Noise channels; each (seed, run, channel) triple owns an independent stream.
enum class NoiseChannel : std::uint64_t { GyroX, GyroY, GyroZ, AccelX, AccelY, AccelZ, GnssVelocity, GnssPosition };

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t run_index, NoiseChannel channel);

/// Standard-normal generator keyed by (seed, run, channel).
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t run_index, NoiseChannel channel);
  double next() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

/// GNSS antenna stream: p_gps = p + R_c C_b^n l^b, v_gps^n = v^n + C_b^n (w_eb^b x l^b),
/// plus white noise, decimated to `gnss_dt` (an integer multiple of the truth interval).
std::vector<GnssSample> synthesize_gnss(std::span<const TruthState> truth, std::span<const DerivedRates> rates,
                                        const LeverArm& lever, const SensorErrorModel& err, double gnss_dt,
                                        std::uint64_t run_index = 0);

/// Constant bias plus white noise with per-sample sigma = density / sqrt(dt).
std::vector<ImuSample> apply_imu_errors(std::span<const ImuSample> stream, const SensorErrorModel& err,
                                        std::uint64_t run_index = 0);

}  // namespace leveralign

#endif  // LEVERALIGN_SIMKIT_HPP
