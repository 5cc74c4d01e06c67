#include "leveralign/earth.hpp"

#include <cmath>
#include <numbers>

#include "leveralign/error.hpp"

namespace leveralign {

namespace {

constexpr double kPoleGuard = 1e-6;

void require_non_polar(double lat) {
  if (std::abs(lat) > std::numbers::pi / 2 - kPoleGuard) {
    throw DomainError("latitude too close to a pole for the local-level frame");
  }
}

}  // namespace

GeodeticPosition validated(GeodeticPosition pos) {
  if (!std::isfinite(pos.lat) || !std::isfinite(pos.lon) || !std::isfinite(pos.height)) {
    throw DomainError("non-finite geodetic position");
  }
  if (std::abs(pos.lat) > std::numbers::pi / 2) throw DomainError("latitude outside [-pi/2, pi/2]");
  if (!(pos.height > -1e4)) throw DomainError("height below -1e4 m");
  pos.lon = std::remainder(pos.lon, 2.0 * std::numbers::pi);
  if (pos.lon <= -std::numbers::pi) pos.lon += 2.0 * std::numbers::pi;
  return pos;
}

CurvatureRadii curvature_radii(double lat) {
  const double s = std::sin(lat);
  const double w2 = 1.0 - wgs84::kEcc2 * s * s;
  const double w = std::sqrt(w2);
  return {wgs84::kSemiMajor * (1.0 - wgs84::kEcc2) / (w2 * w), wgs84::kSemiMajor / w};
}

FrameVector<Frame::Nav> earth_rate_n(double lat) {
  return {wgs84::kEarthRate * std::cos(lat), 0.0, -wgs84::kEarthRate * std::sin(lat)};
}

FrameVector<Frame::Nav> gravity_n(const GeodeticPosition& pos) {
  using namespace wgs84;
  const double s2 = std::sin(pos.lat) * std::sin(pos.lat);
  const double k = kSemiMinor * kGravityPole / (kSemiMajor * kGravityEquator) - 1.0;
  const double g0 = kGravityEquator * (1.0 + k * s2) / std::sqrt(1.0 - kEcc2 * s2);
  const double m = kEarthRate * kEarthRate * kSemiMajor * kSemiMajor * kSemiMinor / kGM;
  const double free_air = 2.0 / kSemiMajor * (1.0 + kFlattening + m - 2.0 * kFlattening * s2);
  return {0.0, 0.0, g0 * (1.0 - free_air * pos.height)};
}

FrameVector<Frame::Nav> transport_rate(const FrameVector<Frame::Nav>& v_n, const GeodeticPosition& pos) {
  require_non_polar(pos.lat);
  const CurvatureRadii r = curvature_radii(pos.lat);
  const double re = r.transverse + pos.height;
  const double rn = r.meridian + pos.height;
  return {v_n.y() / re, -v_n.x() / rn, -v_n.y() * std::tan(pos.lat) / re};
}

Mat3 position_matrix(const GeodeticPosition& pos) {
  require_non_polar(pos.lat);
  const CurvatureRadii r = curvature_radii(pos.lat);
  Mat3 rc = Mat3::Zero();
  rc(0, 0) = 1.0 / (r.meridian + pos.height);
  rc(1, 1) = 1.0 / ((r.transverse + pos.height) * std::cos(pos.lat));
  rc(2, 2) = -1.0;
  return rc;
}

GeodeticPosition offset_position(const GeodeticPosition& pos, const FrameVector<Frame::Nav>& displacement_n) {
  const Vec3 d = position_matrix(pos) * displacement_n.v;
  return {pos.lat + d.x(), pos.lon + d.y(), pos.height + d.z()};
}

EarthKinematics earth_kinematics(const GeodeticPosition& pos, const FrameVector<Frame::Nav>& v_n) {
  EarthKinematics ek;
  const CurvatureRadii r = curvature_radii(pos.lat);
  ek.omega_ie_n = earth_rate_n(pos.lat);
  ek.omega_en_n = transport_rate(v_n, pos);
  ek.gravity_n = gravity_n(pos);
  ek.r_meridian = r.meridian;
  ek.r_transverse = r.transverse;
  ek.rc = position_matrix(pos);
  return ek;
}

}  // namespace leveralign
