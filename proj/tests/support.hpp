// Independent oracles and random helpers for the unit tests. Nothing here
// calls into the library.

#ifndef LEVERALIGN_TESTS_SUPPORT_HPP
#define LEVERALIGN_TESTS_SUPPORT_HPP

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <random>
#include <vector>

namespace oracle {

using V = Eigen::Vector3d;
using M = Eigen::Matrix3d;

inline V cross(const V& a, const V& b) {
  return V(a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(), a.x() * b.y() - a.y() * b.x());
}

inline M rot_x(double a) {
  M r;
  r << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return r;
}
inline M rot_y(double a) {
  M r;
  r << std::cos(a), 0, std::sin(a), 0, 1, 0, -std::sin(a), 0, std::cos(a);
  return r;
}
inline M rot_z(double a) {
  M r;
  r << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return r;
}

/// DCM of the unit quaternion (w, x, y, z), Hamilton convention, active rotation.
inline M quat_dcm(double w, double x, double y, double z) {
  M r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
       2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
       2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

/// Rotation by `angle` about the unit `axis`, via the quaternion oracle.
inline M axis_angle(const V& axis, double angle) {
  const V u = axis.normalized();
  const double s = std::sin(angle / 2);
  return quat_dcm(std::cos(angle / 2), s * u.x(), s * u.y(), s * u.z());
}

inline double max_abs(const M& m) { return m.cwiseAbs().maxCoeff(); }

/// Rotation angle of R, accurate for small and large angles.
inline double rotation_angle(const M& r) {
  const V vee(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  return std::atan2(0.5 * vee.norm(), 0.5 * (r.trace() - 1.0));
}

/// Angle between two rotations.
inline double angle_between(const M& a, const M& b) { return rotation_angle(a * b.transpose()); }

}  // namespace oracle

namespace testrng {

inline std::mt19937_64& engine() {
  static std::mt19937_64 e(20240917);
  return e;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine()); }

inline Eigen::Vector3d vec(double scale = 1.0) {
  return Eigen::Vector3d(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
}

inline Eigen::Vector3d unit() {
  std::normal_distribution<double> n;
  return Eigen::Vector3d(n(engine()), n(engine()), n(engine())).normalized();
}

/// Uniformly distributed rotation (normalized Gaussian quaternion).
inline Eigen::Matrix3d rotation() {
  std::normal_distribution<double> n;
  Eigen::Vector4d q(n(engine()), n(engine()), n(engine()), n(engine()));
  q.normalize();
  return oracle::quat_dcm(q(0), q(1), q(2), q(3));
}

/// Piecewise-constant body rates on [0, duration]: hold times are whole
/// multiples of `grid` in [min_hold, max_hold], rates uniform in +-amplitude.
struct RateSegment {
  double t0;
  double t1;
  Eigen::Vector3d omega;
};

inline std::vector<RateSegment> piecewise_rates(std::mt19937_64& rng, double duration, double grid, double min_hold,
                                                double max_hold, double amplitude) {
  std::uniform_int_distribution<long> hold(std::lround(min_hold / grid), std::lround(max_hold / grid));
  std::uniform_real_distribution<double> rate(-amplitude, amplitude);
  std::vector<RateSegment> out;
  long k = 0;
  const long end = std::lround(duration / grid);
  while (k < end) {
    const long next = std::min(end, k + hold(rng));
    out.push_back({k * grid, next * grid, Eigen::Vector3d(rate(rng), rate(rng), rate(rng))});
    k = next;
  }
  return out;
}

}  // namespace testrng

#endif  // LEVERALIGN_TESTS_SUPPORT_HPP
