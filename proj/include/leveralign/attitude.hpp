/**
 * @file    leveralign/attitude.hpp
 * @brief   Frame-tagged vectors, rotation matrices and quaternions.
 *
 * Frames are compile-time tags, so combining a vector with a rotation that
 * expects a different source frame does not compile. The tags carry no
 * runtime cost. Conventions: the navigation frame is NED, the body frame is
 * forward-right-down. `Rotation<To, From>` maps coordinates resolved in
 * `From` into `To`, i.e. it is the DCM C_From^To.
 */

#ifndef LEVERALIGN_ATTITUDE_HPP
#define LEVERALIGN_ATTITUDE_HPP

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace leveralign {

/// b: body, n: local-level NED, b0 / n0: body and navigation frames frozen
/// (inertially) at the alignment start epoch, e: earth-fixed.
enum class Frame { Body, Nav, Body0, Nav0, Earth };

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

template <Frame F>
struct FrameVector {
  Vec3 v = Vec3::Zero();

  FrameVector() = default;
  explicit FrameVector(const Vec3& value) : v(value) {}
  FrameVector(double x, double y, double z) : v(x, y, z) {}

  static FrameVector zero() { return FrameVector{}; }

  double x() const { return v.x(); }
  double y() const { return v.y(); }
  double z() const { return v.z(); }
  double norm() const { return v.norm(); }
  bool is_finite() const { return v.allFinite(); }

  FrameVector& operator+=(const FrameVector& o) {
    v += o.v;
    return *this;
  }
  FrameVector& operator-=(const FrameVector& o) {
    v -= o.v;
    return *this;
  }
  friend FrameVector operator+(FrameVector a, const FrameVector& b) { return a += b; }
  friend FrameVector operator-(FrameVector a, const FrameVector& b) { return a -= b; }
  friend FrameVector operator-(const FrameVector& a) { return FrameVector(Vec3(-a.v)); }
  friend FrameVector operator*(double s, const FrameVector& a) { return FrameVector(Vec3(s * a.v)); }
  friend FrameVector operator*(const FrameVector& a, double s) { return FrameVector(Vec3(s * a.v)); }
  friend bool operator==(const FrameVector& a, const FrameVector& b) { return a.v == b.v; }
};

template <Frame F>
FrameVector<F> cross(const FrameVector<F>& a, const FrameVector<F>& b) {
  return FrameVector<F>(Vec3(a.v.cross(b.v)));
}

template <Frame F>
double dot(const FrameVector<F>& a, const FrameVector<F>& b) {
  return a.v.dot(b.v);
}

/// Cross-product matrix: skew(v) * w == v x w.
Mat3 skew(const Vec3& v);

template <Frame F>
Mat3 skew(const FrameVector<F>& v) {
  return skew(v.v);
}

/// Max-abs deviation of R * R^T from identity.
double orthonormality_defect(const Mat3& r);

/// Rodrigues formula. Throws DomainError for |phi| >= pi.
Mat3 rotvec_to_matrix(const Vec3& phi);

/// Unit quaternion for the rotation vector `phi` (any magnitude).
Eigen::Quaterniond rotvec_to_quaternion(const Vec3& phi);

template <Frame To, Frame From>
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Wraps `m` as-is; callers are expected to pass an orthonormal matrix.
  static Rotation from_matrix(const Mat3& m) { return Rotation(m); }
  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return m_; }
  Rotation<From, To> transpose() const { return Rotation<From, To>::from_matrix(m_.transpose()); }
  double defect() const { return orthonormality_defect(m_); }

  FrameVector<To> operator*(const FrameVector<From>& x) const { return FrameVector<To>(Vec3(m_ * x.v)); }

  template <Frame Src>
  Rotation<To, Src> operator*(const Rotation<From, Src>& rhs) const {
    return Rotation<To, Src>::from_matrix(m_ * rhs.matrix());
  }

 private:
  explicit Rotation(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

/// Rotation by the rotation vector `phi`. Throws DomainError when |phi| >= pi.
template <Frame To, Frame From>
Rotation<To, From> dcm_from_rotvec(const Vec3& phi) {
  return Rotation<To, From>::from_matrix(rotvec_to_matrix(phi));
}

template <Frame To, Frame From>
class UnitQuaternion {
 public:
  UnitQuaternion() : q_(Eigen::Quaterniond::Identity()) {}
  explicit UnitQuaternion(const Eigen::Quaterniond& q) : q_(q.normalized()) {}
  UnitQuaternion(double w, double x, double y, double z) : q_(Eigen::Quaterniond(w, x, y, z).normalized()) {}

  static UnitQuaternion from_rotation(const Rotation<To, From>& r) {
    return UnitQuaternion(Eigen::Quaterniond(r.matrix()));
  }

  const Eigen::Quaterniond& coeffs() const { return q_; }
  double w() const { return q_.w(); }
  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }

  Rotation<To, From> to_rotation() const { return Rotation<To, From>::from_matrix(q_.toRotationMatrix()); }
  UnitQuaternion<From, To> inverse() const { return UnitQuaternion<From, To>(q_.conjugate()); }

  template <Frame Src>
  UnitQuaternion<To, Src> operator*(const UnitQuaternion<From, Src>& rhs) const {
    return UnitQuaternion<To, Src>(q_ * rhs.coeffs());
  }

  /// Right-multiplies by the incremental rotation `phi` (resolved in `From`)
  /// and renormalizes.
  void rotate_by(const Vec3& phi) { q_ = (q_ * rotvec_to_quaternion(phi)).normalized(); }

 private:
  Eigen::Quaterniond q_;
};

/// C_b^n(t) = (C_{n(t)}^{n(0)})^T * C_b^n(0) * C_{b(t)}^{b(0)}.
inline Rotation<Frame::Nav, Frame::Body> compose_attitude(const Rotation<Frame::Nav0, Frame::Nav>& nav_chain,
                                                          const Rotation<Frame::Nav0, Frame::Body0>& initial,
                                                          const Rotation<Frame::Body0, Frame::Body>& body_chain) {
  return nav_chain.transpose() * initial * body_chain;
}

/// Yaw-pitch-roll (z-y-x) Euler angles of a body-to-level DCM, radians.
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

Mat3 matrix_from_euler(const EulerAngles& e);
EulerAngles euler_from_matrix(const Mat3& c);

struct AttitudeError {
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;
  /// Set when the error rotation is at |pitch| = pi/2; yaw then carries the
  /// combined yaw/roll angle and roll is zero.
  bool gimbal_lock = false;
};

/// Euler-angle decomposition of the error rotation est * truth^T.
AttitudeError attitude_error_angles(const Mat3& est, const Mat3& truth);

template <Frame To, Frame From>
AttitudeError attitude_error_angles(const Rotation<To, From>& est, const Rotation<To, From>& truth) {
  return attitude_error_angles(est.matrix(), truth.matrix());
}

}  // namespace leveralign

#endif  // LEVERALIGN_ATTITUDE_HPP
