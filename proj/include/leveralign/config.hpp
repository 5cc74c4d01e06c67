/**
 * @file    leveralign/config.hpp
 * @brief   Experiment configuration: flat `key = value` text with array literals.
 *
 *   # comment
 *   profile = climbing_turn
 *   lever_arm_truth = [1, 1, 1]
 *
 * Unknown keys are rejected. Fields are stored in the units of their keys
 * (degrees, deg/h, micro-g, ...) so a dumped config parses back to the same
 * values; `trajectory()` and `sensor_model()` convert to SI.
 */

#ifndef LEVERALIGN_CONFIG_HPP
#define LEVERALIGN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "leveralign/alignment.hpp"
#include "leveralign/simkit.hpp"

namespace leveralign {

enum class CompensationMode { None, Eq9, Exact };

std::string_view to_string(CompensationMode mode);
std::string_view to_string(ProfileKind kind);
std::string_view to_string(PairWeighting weighting);

/// Throws ConfigError for an unknown name.
CompensationMode parse_mode(std::string_view name);

struct ExperimentConfig {
  // trajectory
  ProfileKind profile = ProfileKind::ClimbingTurn;
  double speed = 100.0;             // [m/s]
  double turn_rate = 0.05;          // [rad/s]
  double climb_angle = 0.02;        // [rad]
  double acceleration = 1.0;        // [m/s^2]
  double maneuver_onset = 2.0;      // [s]
  double roll_in_time = 12.0;       // [s]
  double weave_period = 30.0;       // [s]
  double initial_lat_deg = 30.0;
  double initial_lon_deg = 114.0;
  double initial_height = 1000.0;   // [m]
  double initial_heading_deg = 0.0;

  // sensors
  Vec3 gyro_bias_dph = Vec3::Constant(0.01);
  double gyro_arw_dpsh = 0.001;      // [deg/sqrt(h)]
  Vec3 accel_bias_ug = Vec3::Constant(50.0);
  double accel_vrw_ug_rthz = 10.0;   // [micro-g/sqrt(Hz)]
  double gnss_vel_sigma = 0.01;      // [m/s]
  double gnss_pos_sigma = 1.0;       // [m]

  // lever arm [m]; the assumed lever arm follows the truth unless set
  Vec3 lever_arm_truth = Vec3::Constant(1.0);
  std::optional<Vec3> lever_arm_assumed;

  // experiment
  CompensationMode mode = CompensationMode::Eq9;
  std::uint64_t run_count = 100;
  double horizon = 60.0;            // [s]
  double imu_dt = 0.01;             // [s]
  double gnss_dt = 1.0;             // [s]
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  unsigned threads = 1;
  PairWeighting weighting = PairWeighting::Uniform;
  std::uint64_t window = 0;         // solver pair window, 0 = all pairs
  bool coning = false;
  double settle_time = 0.1;         // [s]
  double remarks_horizon = 1000.0;  // [s]
  bool retain_runs = false;         // write per-run error CSVs from montecarlo

  Vec3 assumed_lever_arm() const { return lever_arm_assumed.value_or(lever_arm_truth); }
  TrajectoryProfile trajectory(double duration) const;
  SensorErrorModel sensor_model() const;
  AlignmentOptions alignment_options() const;
};

/// Throws ConfigError naming the key (and line, when parsing text) of the first problem.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one assignment with the same checks as a config line.
void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value, int line = 0);

/// Cross-field checks. Throws ConfigError.
void validate(const ExperimentConfig& config);

/// Every key with its effective value, in parseable form.
std::string dump_config(const ExperimentConfig& config);

}  // namespace leveralign

#endif  // LEVERALIGN_CONFIG_HPP
