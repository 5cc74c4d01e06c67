#include <algorithm>
#include <cmath>

#include "leveralign/alignment.hpp"
#include "leveralign/error.hpp"

namespace leveralign {

GnssSample interpolate_gnss(std::span<const GnssSample> gnss, double t) {
  if (gnss.empty()) throw Error("empty GNSS stream");
  if (t <= gnss.front().t) return {t, gnss.front().p_gps, gnss.front().v_gps_n};
  if (t >= gnss.back().t) return {t, gnss.back().p_gps, gnss.back().v_gps_n};
  const auto hi = std::upper_bound(gnss.begin(), gnss.end(), t,
                                   [](double value, const GnssSample& s) { return value < s.t; });
  const GnssSample& b = *hi;
  const GnssSample& a = *(hi - 1);
  const double u = (t - a.t) / (b.t - a.t);
  GnssSample out;
  out.t = t;
  out.p_gps.lat = a.p_gps.lat + u * (b.p_gps.lat - a.p_gps.lat);
  out.p_gps.lon = a.p_gps.lon + u * (b.p_gps.lon - a.p_gps.lon);
  out.p_gps.height = a.p_gps.height + u * (b.p_gps.height - a.p_gps.height);
  out.v_gps_n = a.v_gps_n + u * (b.v_gps_n - a.v_gps_n);
  return out;
}

std::vector<AlignmentEpoch> run_alignment(std::span<const ImuSample> imu, std::span<const GnssSample> gnss,
                                          const LeverArm& lever, const AlignmentOptions& options,
                                          std::span<const DerivedRates> truth_rates) {
  if (!truth_rates.empty() && truth_rates.size() != imu.size()) {
    throw Error("truth rate stream does not match the IMU stream");
  }
  if (options.exact_beta && truth_rates.empty()) throw Error("exact-form alignment requires truth rates");
  if (imu.empty()) return {};

  AlignmentAccumulator acc(lever, options.accumulator);
  std::vector<ObservationPair> pairs;
  std::vector<AlignmentEpoch> epochs;
  std::size_t next_gnss = 0;
  const double t0 = imu.front().t;

  for (std::size_t i = 0; i < imu.size(); ++i) {
    const double t = imu[i].t;
    const GnssSample g = interpolate_gnss(gnss, t);
    AlignmentStep step{imu[i], g.v_gps_n, earth_kinematics(g.p_gps, g.v_gps_n),
                       truth_rates.empty() ? nullptr : &truth_rates[i]};
    acc.accumulate(step);

    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    while (next_gnss < gnss.size() && gnss[next_gnss].t < t - tol) ++next_gnss;
    if (next_gnss >= gnss.size() || std::abs(gnss[next_gnss].t - t) > tol || t <= t0 + tol) continue;
    ++next_gnss;

    const double w = options.weighting == PairWeighting::Ramp ? t - t0 : 1.0;
    AlignmentEpoch epoch;
    epoch.pair = options.exact_beta ? acc.emit_pair_exact(t, w) : acc.emit_pair(t, w);
    pairs.push_back(epoch.pair);

    std::span<const ObservationPair> used(pairs);
    if (options.window > 0 && used.size() > options.window) used = used.last(options.window);
    try {
      epoch.solution = solve_attitude(used);
    } catch (const DegenerateGeometryError& e) {
      epoch.failure = e.what();
    }
    epochs.push_back(std::move(epoch));
  }
  return epochs;
}

}  // namespace leveralign
