#include "leveralign/attitude.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "leveralign/error.hpp"

namespace leveralign {

Mat3 skew(const Vec3& v) {
  Mat3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

double orthonormality_defect(const Mat3& r) {
  return (r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff();
}

Mat3 rotvec_to_matrix(const Vec3& phi) {
  const double angle = phi.norm();
  if (!(angle < std::numbers::pi)) {
    throw DomainError("rotation vector magnitude must be below pi");
  }
  const Mat3 s = skew(phi);
  const double a2 = angle * angle;
  double a, b;
  if (angle < 1e-4) {
    a = 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
    b = 0.5 - a2 / 24.0 + a2 * a2 / 720.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / a2;
  }
  return Mat3::Identity() + a * s + b * s * s;
}

Eigen::Quaterniond rotvec_to_quaternion(const Vec3& phi) {
  const double angle = phi.norm();
  const double half2 = 0.25 * angle * angle;
  double c, k;  // cos(angle/2), sin(angle/2)/angle
  if (angle < 1e-4) {
    c = 1.0 - half2 / 2.0 + half2 * half2 / 24.0;
    k = 0.5 * (1.0 - half2 / 6.0 + half2 * half2 / 120.0);
  } else {
    c = std::cos(0.5 * angle);
    k = std::sin(0.5 * angle) / angle;
  }
  return Eigen::Quaterniond(c, k * phi.x(), k * phi.y(), k * phi.z()).normalized();
}

Mat3 matrix_from_euler(const EulerAngles& e) {
  return (Eigen::AngleAxisd(e.yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(e.pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(e.roll, Vec3::UnitX()))
      .toRotationMatrix();
}

EulerAngles euler_from_matrix(const Mat3& c) {
  EulerAngles e;
  e.pitch = std::asin(std::clamp(-c(2, 0), -1.0, 1.0));
  e.roll = std::atan2(c(2, 1), c(2, 2));
  e.yaw = std::atan2(c(1, 0), c(0, 0));
  return e;
}

AttitudeError attitude_error_angles(const Mat3& est, const Mat3& truth) {
  const Mat3 d = est * truth.transpose();
  AttitudeError err;
  if (std::abs(d(2, 0)) >= 1.0 - 1e-12) {
    err.gimbal_lock = true;
    err.pitch = d(2, 0) < 0.0 ? std::numbers::pi / 2 : -std::numbers::pi / 2;
    err.roll = 0.0;
    err.yaw = std::atan2(-d(0, 1), d(1, 1));
    return err;
  }
  const EulerAngles e = euler_from_matrix(d);
  err.pitch = e.pitch;
  err.roll = e.roll;
  err.yaw = e.yaw;
  return err;
}

}  // namespace leveralign
