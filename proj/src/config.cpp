#include "leveralign/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "leveralign/error.hpp"
#include "text.hpp"

namespace leveralign {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kMicroG = 9.80665e-6;  // [m/s^2]

// Value parse failure; the caller attaches key and line.
struct BadValue {
  std::string what;
};

double to_double(std::string_view s) {
  s = text::trim(s);
  double x = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) throw BadValue{"expected a number"};
  if (!std::isfinite(x)) throw BadValue{"value must be finite"};
  return x;
}

std::uint64_t to_u64(std::string_view s) {
  s = text::trim(s);
  std::uint64_t x = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) throw BadValue{"expected a non-negative integer"};
  return x;
}

Vec3 to_vec3(std::string_view s) {
  s = text::trim(s);
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') throw BadValue{"expected an array [x, y, z]"};
  s = s.substr(1, s.size() - 2);
  Vec3 v;
  int n = 0;
  while (true) {
    const auto comma = s.find(',');
    if (n == 3) throw BadValue{"expected exactly three elements"};
    v(n++) = to_double(s.substr(0, comma));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (n != 3) throw BadValue{"expected exactly three elements"};
  return v;
}

bool to_bool(std::string_view s) {
  s = text::trim(s);
  if (s == "true") return true;
  if (s == "false") return false;
  throw BadValue{"expected true or false"};
}

std::string to_str(std::string_view s) {
  s = text::trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  if (s.empty()) throw BadValue{"expected a non-empty string"};
  return std::string(s);
}

std::string vec_str(const Vec3& v) { return "[" + text::fmt_short(v.x()) + ", " + text::fmt_short(v.y()) + ", " + text::fmt_short(v.z()) + "]"; }

void require(bool ok, const char* what) {
  if (!ok) throw BadValue{what};
}

ProfileKind to_profile(std::string_view s) {
  s = text::trim(s);
  if (s == "straight_accelerate") return ProfileKind::StraightAccelerate;
  if (s == "s_turn_weave") return ProfileKind::STurnWeave;
  if (s == "climbing_turn") return ProfileKind::ClimbingTurn;
  throw BadValue{"expected straight_accelerate, s_turn_weave or climbing_turn"};
}

PairWeighting to_weighting(std::string_view s) {
  s = text::trim(s);
  if (s == "uniform") return PairWeighting::Uniform;
  if (s == "ramp") return PairWeighting::Ramp;
  throw BadValue{"expected uniform or ramp"};
}

struct Key {
  const char* name;
  const char* doc;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

Key real(const char* name, const char* doc, double ExperimentConfig::*field, std::function<bool(double)> ok,
         const char* bound) {
  return {name, doc,
          [=](ExperimentConfig& c, std::string_view v) {
            const double x = to_double(v);
            require(ok(x), bound);
            c.*field = x;
          },
          [=](const ExperimentConfig& c) { return text::fmt_short(c.*field); }};
}

Key vec(const char* name, const char* doc, Vec3 ExperimentConfig::*field, std::function<bool(const Vec3&)> ok,
        const char* bound) {
  return {name, doc,
          [=](ExperimentConfig& c, std::string_view v) {
            const Vec3 x = to_vec3(v);
            require(ok(x), bound);
            c.*field = x;
          },
          [=](const ExperimentConfig& c) { return vec_str(c.*field); }};
}

Key count(const char* name, const char* doc, std::uint64_t ExperimentConfig::*field, std::uint64_t lo,
          std::uint64_t hi, const char* bound) {
  return {name, doc,
          [=](ExperimentConfig& c, std::string_view v) {
            const std::uint64_t x = to_u64(v);
            require(x >= lo && x <= hi, bound);
            c.*field = x;
          },
          [=](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    auto any = [](double) { return true; };
    auto nonneg = [](double x) { return x >= 0.0; };
    auto positive = [](double x) { return x > 0.0; };
    auto finite3 = [](const Vec3&) { return true; };
    auto lever = [](const Vec3& v) { return v.norm() < 100.0; };
    std::vector<Key> t;
    t.push_back({"profile", "straight_accelerate | s_turn_weave | climbing_turn",
                 [](ExperimentConfig& c, std::string_view v) { c.profile = to_profile(v); },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.profile)); }});
    t.push_back(real("speed", "initial speed [m/s]", &ExperimentConfig::speed,
                     [](double x) { return x >= 0.0 && x < 400.0; }, "must lie in [0, 400)"));
    t.push_back(real("turn_rate", "steady turn rate, or weave amplitude [rad/s]", &ExperimentConfig::turn_rate,
                     [](double x) { return std::abs(x) < 0.5; }, "magnitude must be below 0.5"));
    t.push_back(real("climb_angle", "flight-path angle [rad]", &ExperimentConfig::climb_angle,
                     [](double x) { return std::abs(x) < 0.5; }, "magnitude must be below 0.5"));
    t.push_back(real("acceleration", "straight_accelerate only [m/s^2]", &ExperimentConfig::acceleration, any, ""));
    t.push_back(real("maneuver_onset", "climbing_turn: straight lead-in [s]", &ExperimentConfig::maneuver_onset,
                     nonneg, "must be >= 0"));
    t.push_back(real("roll_in_time", "climbing_turn: turn-rate ramp [s]", &ExperimentConfig::roll_in_time, nonneg,
                     "must be >= 0"));
    t.push_back(real("weave_period", "s_turn_weave only [s]", &ExperimentConfig::weave_period, positive,
                     "must be > 0"));
    t.push_back(real("initial_lat_deg", "[deg]", &ExperimentConfig::initial_lat_deg,
                     [](double x) { return std::abs(x) <= 80.0; }, "magnitude must not exceed 80"));
    t.push_back(real("initial_lon_deg", "[deg]", &ExperimentConfig::initial_lon_deg,
                     [](double x) { return std::abs(x) <= 360.0; }, "magnitude must not exceed 360"));
    t.push_back(real("initial_height", "ellipsoidal height [m]", &ExperimentConfig::initial_height,
                     [](double x) { return x > -1e4 && x < 1e5; }, "must lie in (-1e4, 1e5)"));
    t.push_back(real("initial_heading_deg", "[deg]", &ExperimentConfig::initial_heading_deg, any, ""));
    t.push_back(vec("gyro_bias_dph", "constant gyro bias per axis [deg/h]", &ExperimentConfig::gyro_bias_dph,
                    finite3, ""));
    t.push_back(real("gyro_arw_dpsh", "angle random walk [deg/sqrt(h)]", &ExperimentConfig::gyro_arw_dpsh, nonneg,
                     "must be >= 0"));
    t.push_back(vec("accel_bias_ug", "constant accelerometer bias per axis [micro-g]",
                    &ExperimentConfig::accel_bias_ug, finite3, ""));
    t.push_back(real("accel_vrw_ug_rthz", "velocity random walk [micro-g/sqrt(Hz)]",
                     &ExperimentConfig::accel_vrw_ug_rthz, nonneg, "must be >= 0"));
    t.push_back(real("gnss_vel_sigma", "white GNSS velocity noise per axis [m/s]", &ExperimentConfig::gnss_vel_sigma,
                     nonneg, "must be >= 0"));
    t.push_back(real("gnss_pos_sigma", "white GNSS position noise per axis [m]", &ExperimentConfig::gnss_pos_sigma,
                     nonneg, "must be >= 0"));
    t.push_back(vec("lever_arm_truth", "IMU to antenna, body frame [m]", &ExperimentConfig::lever_arm_truth, lever,
                    "norm must be below 100 m"));
    t.push_back({"lever_arm_assumed", "lever arm used by the algorithm [m]; defaults to lever_arm_truth",
                 [lever](ExperimentConfig& c, std::string_view v) {
                   const Vec3 x = to_vec3(v);
                   require(lever(x), "norm must be below 100 m");
                   c.lever_arm_assumed = x;
                 },
                 [](const ExperimentConfig& c) { return vec_str(c.assumed_lever_arm()); }});
    t.push_back({"mode", "none | eq9 | exact",
                 [](ExperimentConfig& c, std::string_view v) {
                   v = text::trim(v);
                   if (v == "none") c.mode = CompensationMode::None;
                   else if (v == "eq9") c.mode = CompensationMode::Eq9;
                   else if (v == "exact") c.mode = CompensationMode::Exact;
                   else throw BadValue{"expected none, eq9 or exact"};
                 },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.mode)); }});
    t.push_back(count("run_count", "Monte Carlo runs", &ExperimentConfig::run_count, 1, 1000000,
                      "must lie in [1, 1000000]"));
    t.push_back(real("horizon", "alignment horizon [s]", &ExperimentConfig::horizon,
                     [](double x) { return x > 0.0 && x <= 1e5; }, "must lie in (0, 1e5]"));
    t.push_back(real("imu_dt", "IMU interval [s]", &ExperimentConfig::imu_dt,
                     [](double x) { return x >= 1e-3 && x <= 0.1; }, "must lie in [0.001, 0.1]"));
    t.push_back(real("gnss_dt", "GNSS interval, a multiple of imu_dt [s]", &ExperimentConfig::gnss_dt, positive,
                     "must be > 0"));
    t.push_back(count("base_seed", "noise seed", &ExperimentConfig::base_seed, 0, UINT64_MAX, ""));
    t.push_back({"output_dir", "output directory",
                 [](ExperimentConfig& c, std::string_view v) { c.output_dir = to_str(v); },
                 [](const ExperimentConfig& c) { return c.output_dir; }});
    t.push_back({"threads", "Monte Carlo worker threads",
                 [](ExperimentConfig& c, std::string_view v) {
                   const std::uint64_t x = to_u64(v);
                   require(x >= 1 && x <= 256, "must lie in [1, 256]");
                   c.threads = static_cast<unsigned>(x);
                 },
                 [](const ExperimentConfig& c) { return std::to_string(c.threads); }});
    t.push_back({"weighting", "uniform | ramp (weight = t - t0)",
                 [](ExperimentConfig& c, std::string_view v) { c.weighting = to_weighting(v); },
                 [](const ExperimentConfig& c) { return std::string(to_string(c.weighting)); }});
    t.push_back(count("window", "most recent pairs used by the solver, 0 = all", &ExperimentConfig::window, 0,
                      UINT64_MAX, ""));
    t.push_back({"coning", "two-sample coning correction of gyro increments",
                 [](ExperimentConfig& c, std::string_view v) { c.coning = to_bool(v); },
                 [](const ExperimentConfig& c) { return std::string(c.coning ? "true" : "false"); }});
    t.push_back(real("settle_time", "window for the initial body rate median [s]", &ExperimentConfig::settle_time,
                     nonneg, "must be >= 0"));
    t.push_back(real("remarks_horizon", "duration of the remarks diagnostic run [s]",
                     &ExperimentConfig::remarks_horizon, [](double x) { return x > 0.0 && x <= 1e5; },
                     "must lie in (0, 1e5]"));
    t.push_back({"retain_runs", "also write per-run error CSVs from montecarlo",
                 [](ExperimentConfig& c, std::string_view v) { c.retain_runs = to_bool(v); },
                 [](const ExperimentConfig& c) { return std::string(c.retain_runs ? "true" : "false"); }});
    return t;
  }();
  return table;
}

const Key* find_key(std::string_view name) {
  for (const Key& k : keys()) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(CompensationMode mode) {
  switch (mode) {
    case CompensationMode::None: return "none";
    case CompensationMode::Eq9: return "eq9";
    case CompensationMode::Exact: return "exact";
  }
  return "?";
}

std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::StraightAccelerate: return "straight_accelerate";
    case ProfileKind::STurnWeave: return "s_turn_weave";
    case ProfileKind::ClimbingTurn: return "climbing_turn";
  }
  return "?";
}

std::string_view to_string(PairWeighting weighting) {
  return weighting == PairWeighting::Ramp ? "ramp" : "uniform";
}

CompensationMode parse_mode(std::string_view name) {
  ExperimentConfig c;
  set_config_value(c, "mode", name);
  return c.mode;
}

TrajectoryProfile ExperimentConfig::trajectory(double duration) const {
  TrajectoryProfile p;
  p.kind = profile;
  p.speed = speed;
  p.turn_rate = turn_rate;
  p.duration = duration;
  p.initial = {initial_lat_deg * kDeg, initial_lon_deg * kDeg, initial_height};
  p.initial_heading = initial_heading_deg * kDeg;
  p.climb_angle = climb_angle;
  p.acceleration = acceleration;
  p.maneuver_onset = maneuver_onset;
  p.roll_in_time = roll_in_time;
  p.weave_period = weave_period;
  return p;
}

SensorErrorModel ExperimentConfig::sensor_model() const {
  SensorErrorModel m;
  m.gyro_bias = gyro_bias_dph * (kDeg / 3600.0);
  m.gyro_arw = gyro_arw_dpsh * kDeg / 60.0;
  m.accel_bias = accel_bias_ug * kMicroG;
  m.accel_vrw = accel_vrw_ug_rthz * kMicroG;
  m.gnss_vel_sigma = gnss_vel_sigma;
  m.gnss_pos_sigma = gnss_pos_sigma;
  m.seed = base_seed;
  return m;
}

AlignmentOptions ExperimentConfig::alignment_options() const {
  AlignmentOptions o;
  o.accumulator.nominal_dt = imu_dt;
  o.accumulator.settle_time = settle_time;
  o.accumulator.coning = coning;
  o.weighting = weighting;
  o.window = static_cast<std::size_t>(window);
  o.exact_beta = mode == CompensationMode::Exact;
  return o;
}

void set_config_value(ExperimentConfig& config, std::string_view key, std::string_view value, int line) {
  const std::string name(text::trim(key));
  const Key* k = find_key(name);
  const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : std::string();
  if (k == nullptr) throw ConfigError(where + "unknown key '" + name + "'", name, line);
  try {
    k->set(config, value);
  } catch (const BadValue& e) {
    throw ConfigError(where + "invalid value for '" + name + "': " + e.what, name, line);
  }
}

void validate(const ExperimentConfig& c) {
  const double ratio = c.gnss_dt / c.imu_dt;
  if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("gnss_dt must be an integer multiple of imu_dt", "gnss_dt");
  }
  if (c.gnss_dt > c.horizon) throw ConfigError("horizon must cover at least one GNSS interval", "horizon");
  if (c.settle_time >= c.horizon) throw ConfigError("settle_time must be shorter than the horizon", "settle_time");
  for (double duration : {c.horizon, c.remarks_horizon}) {
    try {
      validate(c.trajectory(duration));
    } catch (const DomainError& e) {
      throw ConfigError(std::string("invalid trajectory: ") + e.what(), "profile");
    }
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", {}, line_no);
    }
    const std::string key(text::trim(line.substr(0, eq)));
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'", key, line_no);
    }
    set_config_value(config, key, line.substr(eq + 1), line_no);
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const ExperimentConfig& config) {
  std::string out = "# effective configuration\n";
  for (const Key& k : keys()) {
    out += k.name;
    out += " = ";
    out += k.get(config);
    out += "  # ";
    out += k.doc;
    out += '\n';
  }
  return out;
}

}  // namespace leveralign
