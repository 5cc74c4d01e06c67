/**
 * @file    leveralign/earth.hpp
 * @brief   WGS-84 earth kinematics in the local-level NED frame.
 */

#ifndef LEVERALIGN_EARTH_HPP
#define LEVERALIGN_EARTH_HPP

#include "leveralign/attitude.hpp"

namespace leveralign {

namespace wgs84 {
inline constexpr double kSemiMajor = 6378137.0;              // a [m]
inline constexpr double kFlattening = 1.0 / 298.257223563;   // f
inline constexpr double kEcc2 = kFlattening * (2.0 - kFlattening);
inline constexpr double kSemiMinor = kSemiMajor * (1.0 - kFlattening);
inline constexpr double kEarthRate = 7.292115e-5;            // [rad/s]
inline constexpr double kGM = 3.986004418e14;                // [m^3/s^2]
inline constexpr double kGravityEquator = 9.7803253359;      // [m/s^2]
inline constexpr double kGravityPole = 9.8321849379;         // [m/s^2]
}  // namespace wgs84

/// Geodetic latitude/longitude [rad] and ellipsoidal height [m].
struct GeodeticPosition {
  double lat = 0.0;
  double lon = 0.0;
  double height = 0.0;
};

/// Throws DomainError unless |lat| <= pi/2 and height > -1e4 m; wraps lon into (-pi, pi].
GeodeticPosition validated(GeodeticPosition pos);

struct CurvatureRadii {
  double meridian = 0.0;    // R_N
  double transverse = 0.0;  // R_E
};

CurvatureRadii curvature_radii(double lat);

/// [W cos(lat), 0, -W sin(lat)].
FrameVector<Frame::Nav> earth_rate_n(double lat);

/// Somigliana normal gravity with a first-order free-air height term. Points down.
FrameVector<Frame::Nav> gravity_n(const GeodeticPosition& pos);

/// Throws DomainError within 1e-6 rad of a pole.
FrameVector<Frame::Nav> transport_rate(const FrameVector<Frame::Nav>& v_n, const GeodeticPosition& pos);

/// Maps an NED displacement [m] to (d lat [rad], d lon [rad], d height [m]).
/// Throws DomainError within 1e-6 rad of a pole.
Mat3 position_matrix(const GeodeticPosition& pos);

/// Adds an NED displacement to a geodetic position through `position_matrix`.
GeodeticPosition offset_position(const GeodeticPosition& pos, const FrameVector<Frame::Nav>& displacement_n);

struct EarthKinematics {
  FrameVector<Frame::Nav> omega_ie_n;
  FrameVector<Frame::Nav> omega_en_n;
  FrameVector<Frame::Nav> gravity_n;
  double r_meridian = 0.0;
  double r_transverse = 0.0;
  Mat3 rc = Mat3::Zero();

  FrameVector<Frame::Nav> omega_in_n() const { return omega_ie_n + omega_en_n; }
};

EarthKinematics earth_kinematics(const GeodeticPosition& pos, const FrameVector<Frame::Nav>& v_n);

}  // namespace leveralign

#endif  // LEVERALIGN_EARTH_HPP
