#include "leveralign/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <thread>

#include "leveralign/error.hpp"
#include "text.hpp"

namespace leveralign {

namespace fs = std::filesystem;

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

std::size_t stride_of(const ExperimentConfig& c) {
  return static_cast<std::size_t>(std::llround(c.gnss_dt / c.imu_dt));
}

std::ofstream open_out(const fs::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

void row(std::ofstream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << text::fmt(v);
    first = false;
  }
}

std::string index_tag(std::uint64_t run_index) { return std::to_string(run_index); }

}  // namespace

Scenario configured_scenario(const ExperimentConfig& config) {
  Scenario s;
  s.mode = config.mode;
  s.lever_truth = config.lever_arm_truth;
  s.lever_assumed = config.mode == CompensationMode::None ? Vec3::Zero() : config.assumed_lever_arm();
  return s;
}

Experiment::Experiment(const ExperimentConfig& config) : config_(config) {
  validate(config_);
  truth_ = gen_trajectory(config_.trajectory(config_.horizon), config_.imu_dt);
  imu_ = synthesize_imu(truth_);
  rates_ = truth_rates(truth_, imu_);
}

RunSeries Experiment::run(std::uint64_t run_index, const Scenario& scenario) const {
  const SensorErrorModel err = config_.sensor_model();
  const std::vector<ImuSample> imu = apply_imu_errors(imu_, err, run_index);
  const std::vector<GnssSample> gnss =
      synthesize_gnss(truth_, rates_, LeverArm(scenario.lever_truth), err, config_.gnss_dt, run_index);

  AlignmentOptions options = config_.alignment_options();
  options.exact_beta = scenario.mode == CompensationMode::Exact;
  const LeverArm assumed(scenario.mode == CompensationMode::None ? Vec3::Zero() : scenario.lever_assumed);
  const std::vector<AlignmentEpoch> epochs =
      run_alignment(imu, gnss, assumed, options, options.exact_beta ? std::span<const DerivedRates>(rates_)
                                                                    : std::span<const DerivedRates>());

  const Mat3 c0 = truth_.front().c_b_n.matrix();
  RunSeries out;
  out.epochs.reserve(epochs.size());
  out.pairs.reserve(epochs.size());
  for (const AlignmentEpoch& e : epochs) {
    EpochError ee;
    ee.t = e.pair.t;
    if (e.solution) {
      const AttitudeError a = attitude_error_angles(e.solution->c_b_n0.matrix(), c0);
      ee.pitch = a.pitch;
      ee.roll = a.roll;
      ee.yaw = a.yaw;
      ee.valid = true;
    }
    out.epochs.push_back(ee);
    out.pairs.push_back(e.pair);
  }
  return out;
}

RunSeries run_single(const ExperimentConfig& config, std::uint64_t run_index) {
  return Experiment(config).run(run_index);
}

ErrorCurve aggregate(std::string label, std::span<const RunSeries> runs, bool retain_runs) {
  ErrorCurve curve;
  curve.label = std::move(label);
  curve.n_runs = runs.size();
  if (runs.empty()) return curve;

  const std::size_t n_epochs = runs.front().epochs.size();
  for (const RunSeries& r : runs) {
    if (r.epochs.size() != n_epochs) throw Error("runs do not share an epoch grid");
  }
  for (std::size_t k = 0; k < n_epochs; ++k) {
    const double t = runs.front().epochs[k].t;
    bool all_valid = true;
    for (const RunSeries& r : runs) {
      if (r.epochs[k].t != t) throw Error("runs do not share an epoch grid");
      all_valid = all_valid && r.epochs[k].valid;
    }
    if (!all_valid) continue;

    Vec3 sum = Vec3::Zero();
    std::vector<Vec3> per_run;
    if (retain_runs) per_run.reserve(runs.size());
    for (const RunSeries& r : runs) {
      const EpochError& e = r.epochs[k];
      const Vec3 deg(e.pitch * kRadToDeg, e.roll * kRadToDeg, e.yaw * kRadToDeg);
      sum += deg;
      if (retain_runs) per_run.push_back(deg);
    }
    curve.epochs.push_back(t);
    curve.mean_deg.push_back(sum / static_cast<double>(runs.size()));
    if (retain_runs) curve.runs_deg.push_back(std::move(per_run));
  }
  return curve;
}

MonteCarloResult run_monte_carlo(const ExperimentConfig& config) {
  const Experiment experiment(config);
  const CompensationMode comp = config.mode == CompensationMode::Exact ? CompensationMode::Exact
                                                                      : CompensationMode::Eq9;
  const std::array<Scenario, 3> scenarios{
      Scenario{comp, config.lever_arm_truth, config.assumed_lever_arm()},
      Scenario{CompensationMode::None, config.lever_arm_truth, Vec3::Zero()},
      Scenario{comp, Vec3::Zero(), Vec3::Zero()},
  };

  const auto n = static_cast<std::size_t>(config.run_count);
  std::vector<std::array<RunSeries, 3>> results(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        for (std::size_t s = 0; s < scenarios.size(); ++s) results[i][s] = experiment.run(i, scenarios[s]);
      } catch (...) {
        failures[i] = std::current_exception();
        stop.store(true);
      }
    }
  };

  const unsigned n_threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(n)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads);
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& e) {
      throw Error("Monte Carlo run " + std::to_string(i) + " failed: " + e.what());
    }
  }

  MonteCarloResult out;
  const std::array<std::string, 3> labels{std::string(to_string(comp)), "none", "baseline"};
  std::array<ErrorCurve*, 3> curves{&out.compensated, &out.uncompensated, &out.baseline};
  std::vector<RunSeries> column(n);
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    for (std::size_t i = 0; i < n; ++i) column[i] = std::move(results[i][s]);
    *curves[s] = aggregate(labels[s], column, config.retain_runs);
  }
  return out;
}

std::vector<RemarkRow> report_remarks(const ExperimentConfig& config) {
  validate(config);
  const std::vector<TruthState> truth = gen_trajectory(config.trajectory(config.remarks_horizon), config.imu_dt);
  const std::vector<ImuSample> imu = synthesize_imu(truth);
  const std::vector<DerivedRates> rates = truth_rates(truth, imu);
  const LeverArm lever(config.lever_arm_truth);

  AccumulatorOptions options = config.alignment_options().accumulator;
  AlignmentAccumulator acc(lever, options);
  const std::size_t stride = stride_of(config);
  std::vector<RemarkRow> rows;
  rows.push_back(RemarkRow{truth.front().t});

  for (std::size_t i = 0; i < truth.size(); ++i) {
    const TruthState& s = truth[i];
    const AlignmentStep step{imu[i], lever_arm_velocity(s.v_n, s.c_b_n, rates[i].omega_eb_b, lever),
                             earth_kinematics(s.pos, s.v_n), &rates[i]};
    acc.accumulate(step);
    if (i == 0 || i % stride != 0) continue;

    const ObservationPair approx = acc.emit_pair(s.t);
    const ObservationPair exact = acc.emit_pair_exact(s.t);
    const LeverTermGrowth growth = acc.lever_term_growth();
    RemarkRow r;
    r.t = s.t;
    r.approximation_ratio = acc.approximation_ratio().value_or(std::nan(""));
    r.force_integral_norm = growth.force_integral;
    r.lever_coefficient_norm = growth.lever_coefficient;
    r.lever_to_force = growth.force_integral > 0.0 ? growth.lever_coefficient / growth.force_integral : 0.0;
    const double ref = exact.beta.norm();
    r.beta_rel_diff = ref > 0.0 ? (exact.beta - approx.beta).norm() / ref : 0.0;
    rows.push_back(r);
  }
  return rows;
}

void write_effective_config(const fs::path& dir, const ExperimentConfig& config) {
  const fs::path path = dir / "effective_config.txt";
  std::ofstream out = open_out(path);
  out << dump_config(config);
  close_out(out, path);
}

void write_run_csv(const fs::path& path, std::span<const EpochError> epochs) {
  std::ofstream out = open_out(path);
  out << "epoch,pitch_err_deg,roll_err_deg,yaw_err_deg,valid\n";
  for (const EpochError& e : epochs) {
    if (e.valid) {
      row(out, {e.t, e.pitch * kRadToDeg, e.roll * kRadToDeg, e.yaw * kRadToDeg});
      out << ",1\n";
    } else {
      out << text::fmt(e.t) << ",nan,nan,nan,0\n";
    }
  }
  close_out(out, path);
}

void write_pairs_csv(const fs::path& path, std::span<const ObservationPair> pairs) {
  std::ofstream out = open_out(path);
  out << "t,alpha_x,alpha_y,alpha_z,beta_x,beta_y,beta_z,weight\n";
  for (const ObservationPair& p : pairs) {
    row(out, {p.t, p.alpha.v.x(), p.alpha.v.y(), p.alpha.v.z(), p.beta.v.x(), p.beta.v.y(), p.beta.v.z(), p.weight});
    out << '\n';
  }
  close_out(out, path);
}

void write_curve_csv(const fs::path& path, const ErrorCurve& curve) {
  std::ofstream out = open_out(path);
  out << "epoch,pitch_err_deg,roll_err_deg,yaw_err_deg,n_runs\n";
  for (std::size_t k = 0; k < curve.epochs.size(); ++k) {
    const Vec3& m = curve.mean_deg[k];
    row(out, {curve.epochs[k], m.x(), m.y(), m.z()});
    out << ',' << curve.n_runs << '\n';
  }
  close_out(out, path);
}

void write_remarks_csv(const fs::path& path, std::span<const RemarkRow> rows) {
  std::ofstream out = open_out(path);
  out << "t,approximation_ratio,force_integral_norm,lever_coefficient_norm,lever_to_force,beta_rel_diff\n";
  for (const RemarkRow& r : rows) {
    row(out, {r.t, r.approximation_ratio, r.force_integral_norm, r.lever_coefficient_norm, r.lever_to_force,
              r.beta_rel_diff});
    out << '\n';
  }
  close_out(out, path);
}

void write_plot_script(const fs::path& path, std::span<const std::string> curve_files) {
  std::ofstream out = open_out(path);
  out << "# Overlay of Monte Carlo mean attitude errors. Usage: python3 plot_mc.py\n"
         "import csv\n"
         "import os\n"
         "import matplotlib.pyplot as plt\n\n"
         "here = os.path.dirname(os.path.abspath(__file__))\n"
         "files = [";
  for (std::size_t i = 0; i < curve_files.size(); ++i) out << (i ? ", " : "") << '"' << curve_files[i] << '"';
  out << "]\n"
         "fig, axes = plt.subplots(3, 1, sharex=True, figsize=(7, 8))\n"
         "for name in files:\n"
         "    with open(os.path.join(here, name)) as f:\n"
         "        rows = list(csv.DictReader(f))\n"
         "    t = [float(r['epoch']) for r in rows]\n"
         "    label = name[len('mc_'):-len('.csv')]\n"
         "    for ax, col in zip(axes, ['pitch_err_deg', 'roll_err_deg', 'yaw_err_deg']):\n"
         "        ax.plot(t, [float(r[col]) for r in rows], label=label)\n"
         "        ax.set_ylabel(col)\n"
         "axes[0].legend()\n"
         "axes[-1].set_xlabel('time [s]')\n"
         "fig.tight_layout()\n"
         "fig.savefig(os.path.join(here, 'mc_mean_errors.png'), dpi=150)\n";
  close_out(out, path);
}

void command_run(const ExperimentConfig& config, std::uint64_t run_index) {
  const RunSeries series = run_single(config, run_index);
  const fs::path dir = config.output_dir;
  write_effective_config(dir, config);
  const std::string tag = std::string(to_string(config.mode)) + "_" + index_tag(run_index);
  write_run_csv(dir / ("run_" + tag + ".csv"), series.epochs);
  write_pairs_csv(dir / ("pairs_" + tag + ".csv"), series.pairs);
  const bool any_valid = std::any_of(series.epochs.begin(), series.epochs.end(), [](const EpochError& e) { return e.valid; });
  if (!any_valid) {
    throw DegenerateGeometryError("no epoch produced an attitude solution; the trajectory never excites a second axis",
                                  Vec3::Zero());
  }
}

void command_monte_carlo(const ExperimentConfig& config) {
  const MonteCarloResult mc = run_monte_carlo(config);
  const fs::path dir = config.output_dir;
  write_effective_config(dir, config);
  std::vector<std::string> files;
  for (const ErrorCurve* c : {&mc.compensated, &mc.uncompensated, &mc.baseline}) {
    files.push_back("mc_" + c->label + ".csv");
    write_curve_csv(dir / files.back(), *c);
    if (!config.retain_runs) continue;
    for (std::size_t r = 0; r < c->n_runs; ++r) {
      const fs::path path = dir / "runs" / ("mc_" + c->label + "_run" + index_tag(r) + ".csv");
      std::ofstream out = open_out(path);
      out << "epoch,pitch_err_deg,roll_err_deg,yaw_err_deg\n";
      for (std::size_t k = 0; k < c->epochs.size(); ++k) {
        const Vec3& e = c->runs_deg[k][r];
        row(out, {c->epochs[k], e.x(), e.y(), e.z()});
        out << '\n';
      }
      close_out(out, path);
    }
  }
  write_plot_script(dir / "plot_mc.py", files);
}

void command_remarks(const ExperimentConfig& config) {
  const std::vector<RemarkRow> rows = report_remarks(config);
  const fs::path dir = config.output_dir;
  write_effective_config(dir, config);
  write_remarks_csv(dir / "remarks.csv", rows);
}

void command_export_streams(const ExperimentConfig& config, std::uint64_t run_index) {
  const Experiment experiment(config);
  const SensorErrorModel err = config.sensor_model();
  const std::vector<ImuSample> imu = apply_imu_errors(experiment.perfect_imu(), err, run_index);
  const std::vector<GnssSample> gnss = synthesize_gnss(experiment.truth(), experiment.rates(),
                                                       LeverArm(config.lever_arm_truth), err, config.gnss_dt, run_index);
  const fs::path dir = config.output_dir;
  write_effective_config(dir, config);

  {
    const fs::path path = dir / "truth.csv";
    std::ofstream out = open_out(path);
    out << "t,lat,lon,height,v_n,v_e,v_d,roll,pitch,yaw,omega_nb_x,omega_nb_y,omega_nb_z\n";
    for (const TruthState& s : experiment.truth()) {
      const EulerAngles e = euler_from_matrix(s.c_b_n.matrix());
      row(out, {s.t, s.pos.lat, s.pos.lon, s.pos.height, s.v_n.v.x(), s.v_n.v.y(), s.v_n.v.z(), e.roll, e.pitch,
                e.yaw, s.omega_nb_b.v.x(), s.omega_nb_b.v.y(), s.omega_nb_b.v.z()});
      out << '\n';
    }
    close_out(out, path);
  }
  {
    const fs::path path = dir / "imu.csv";
    std::ofstream out = open_out(path);
    out << "t,omega_ib_x,omega_ib_y,omega_ib_z,f_x,f_y,f_z\n";
    for (const ImuSample& s : imu) {
      row(out, {s.t, s.omega_ib_b.v.x(), s.omega_ib_b.v.y(), s.omega_ib_b.v.z(), s.f_b.v.x(), s.f_b.v.y(),
                s.f_b.v.z()});
      out << '\n';
    }
    close_out(out, path);
  }
  {
    const fs::path path = dir / "gnss.csv";
    std::ofstream out = open_out(path);
    out << "t,lat,lon,height,v_n,v_e,v_d\n";
    for (const GnssSample& s : gnss) {
      row(out, {s.t, s.p_gps.lat, s.p_gps.lon, s.p_gps.height, s.v_gps_n.v.x(), s.v_gps_n.v.y(), s.v_gps_n.v.z()});
      out << '\n';
    }
    close_out(out, path);
  }
}

}  // namespace leveralign
