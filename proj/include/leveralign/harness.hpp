/**
 * @file    leveralign/harness.hpp
 * @brief   Batch experiments: single runs, Monte Carlo mean-error curves,
 *          approximation diagnostics and stream export.
 *
 * Noise streams are keyed by (base_seed, run index, channel). The
 * compensation mode is deliberately not part of the key, so the compensated,
 * uncompensated and zero-lever curves of one Monte Carlo run see the same
 * sensor noise.
 *
 * Output CSVs use 17 significant digits. Error angles are written in degrees.
 */

#ifndef LEVERALIGN_HARNESS_HPP
#define LEVERALIGN_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "leveralign/alignment.hpp"
#include "leveralign/config.hpp"
#include "leveralign/simkit.hpp"

namespace leveralign {

/// Attitude error of one epoch [rad]; `valid` is false when the solver found
/// the geometry degenerate and the epoch is missing.
struct EpochError {
  double t = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;
  bool valid = false;
};

struct RunSeries {
  std::vector<EpochError> epochs;
  std::vector<ObservationPair> pairs;
};

/// What the simulation uses as the true lever arm and what the algorithm assumes.
struct Scenario {
  CompensationMode mode = CompensationMode::Eq9;
  Vec3 lever_truth = Vec3::Zero();
  Vec3 lever_assumed = Vec3::Zero();
};

Scenario configured_scenario(const ExperimentConfig& config);

/// Truth trajectory, error-free IMU stream and truth rates over the config
/// horizon, shared read-only by every run.
class Experiment {
 public:
  explicit Experiment(const ExperimentConfig& config);

  RunSeries run(std::uint64_t run_index, const Scenario& scenario) const;
  RunSeries run(std::uint64_t run_index) const { return run(run_index, configured_scenario(config_)); }

  const ExperimentConfig& config() const { return config_; }
  std::span<const TruthState> truth() const { return truth_; }
  std::span<const ImuSample> perfect_imu() const { return imu_; }
  std::span<const DerivedRates> rates() const { return rates_; }

 private:
  ExperimentConfig config_;
  std::vector<TruthState> truth_;
  std::vector<ImuSample> imu_;
  std::vector<DerivedRates> rates_;
};

RunSeries run_single(const ExperimentConfig& config, std::uint64_t run_index);

/// Epoch-wise mean errors [deg] over `n_runs` runs. Epochs missing in any run
/// are dropped. `runs_deg[r][k]` holds run r at epoch k when retained.
struct ErrorCurve {
  std::string label;
  std::vector<double> epochs;
  std::vector<Vec3> mean_deg;  // (pitch, roll, yaw)
  std::size_t n_runs = 0;
  std::vector<std::vector<Vec3>> runs_deg;
};

struct MonteCarloResult {
  ErrorCurve compensated;    // config lever arm, eq9 (or exact) compensation
  ErrorCurve uncompensated;  // config lever arm, no compensation
  ErrorCurve baseline;       // zero lever arm
};

/// Runs `run_count` runs of each scenario on `threads` workers. A failing run
/// aborts the experiment with an Error naming the lowest failing run index.
MonteCarloResult run_monte_carlo(const ExperimentConfig& config);

/// Mean of the per-run series, summed in run order. Throws Error when the
/// runs do not share an epoch grid.
ErrorCurve aggregate(std::string label, std::span<const RunSeries> runs, bool retain_runs);

struct RemarkRow {
  double t = 0.0;
  double approximation_ratio = 0.0;
  double force_integral_norm = 0.0;
  double lever_coefficient_norm = 0.0;
  double lever_to_force = 0.0;
  double beta_rel_diff = 0.0;  // |beta_exact - beta_approx| / |beta_exact|
};

/// Noise-free run over `remarks_horizon` with the true lever arm and truth
/// rates; one row per GNSS epoch, starting with an all-zero row at t = 0.
std::vector<RemarkRow> report_remarks(const ExperimentConfig& config);

// Writers. Each creates `dir` if needed.
void write_effective_config(const std::filesystem::path& dir, const ExperimentConfig& config);
void write_run_csv(const std::filesystem::path& path, std::span<const EpochError> epochs);
void write_pairs_csv(const std::filesystem::path& path, std::span<const ObservationPair> pairs);
void write_curve_csv(const std::filesystem::path& path, const ErrorCurve& curve);
void write_remarks_csv(const std::filesystem::path& path, std::span<const RemarkRow> rows);
void write_plot_script(const std::filesystem::path& path, std::span<const std::string> curve_files);

// Whole commands, writing into `config.output_dir`.

/// run_<mode>_<index>.csv and pairs_<mode>_<index>.csv. Throws
/// DegenerateGeometryError when no epoch produced a solution.
void command_run(const ExperimentConfig& config, std::uint64_t run_index);
/// mc_<label>.csv per curve and plot_mc.py.
void command_monte_carlo(const ExperimentConfig& config);
/// remarks.csv
void command_remarks(const ExperimentConfig& config);
/// truth.csv, imu.csv and gnss.csv of one run.
void command_export_streams(const ExperimentConfig& config, std::uint64_t run_index);

}  // namespace leveralign

#endif  // LEVERALIGN_HARNESS_HPP
