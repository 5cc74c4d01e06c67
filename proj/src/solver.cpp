#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "leveralign/alignment.hpp"
#include "leveralign/error.hpp"

namespace leveralign {

namespace {

void check_weights(std::span<const ObservationPair> pairs) {
  double total = 0.0;
  for (const ObservationPair& p : pairs) {
    if (!(p.weight >= 0.0) || !std::isfinite(p.weight)) throw DomainError("pair weights must be finite and >= 0");
    if (!p.alpha.is_finite() || !p.beta.is_finite()) throw DomainError("non-finite observation pair");
    total += p.weight;
  }
  if (!(total > 0.0)) throw DomainError("pair weights are all zero");
}

// B = sum w alpha beta^T
Mat3 attitude_profile(std::span<const ObservationPair> pairs) {
  Mat3 b = Mat3::Zero();
  for (const ObservationPair& p : pairs) b += p.weight * p.alpha.v * p.beta.v.transpose();
  return b;
}

void check_geometry(std::span<const ObservationPair> pairs) {
  Mat3 gram = Mat3::Zero();
  for (const ObservationPair& p : pairs) gram += p.weight * p.beta.v * p.beta.v.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(gram);
  const Vec3 ev = es.eigenvalues();  // ascending
  const Vec3 axis = es.eigenvectors().col(2);
  if (pairs.size() < 2) {
    throw DegenerateGeometryError("a single observation pair leaves rotation about it unobservable", axis);
  }
  if (!(ev(2) > 0.0) || ev(1) < kDegenerateGramRatio * ev(2)) {
    throw DegenerateGeometryError("observation pairs are collinear; rotation about their axis is unobservable", axis);
  }
}

}  // namespace

AttitudeSolution solve_attitude(std::span<const ObservationPair> pairs) {
  check_weights(pairs);
  check_geometry(pairs);

  const Mat3 b = attitude_profile(pairs);
  const double sigma = b.trace();
  const Vec3 z(b(1, 2) - b(2, 1), b(2, 0) - b(0, 2), b(0, 1) - b(1, 0));
  Eigen::Matrix4d k;
  k.topLeftCorner<3, 3>() = b + b.transpose() - sigma * Mat3::Identity();
  k.topRightCorner<3, 1>() = z;
  k.bottomLeftCorner<1, 3>() = z.transpose();
  k(3, 3) = sigma;

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(k);
  const Eigen::Vector4d q = es.eigenvectors().col(3).normalized();
  const Vec3 qv = q.head<3>();
  const double q4 = q(3);
  // Attitude matrix of the optimal quaternion, mapping beta into alpha.
  const Mat3 c = (q4 * q4 - qv.squaredNorm()) * Mat3::Identity() + 2.0 * qv * qv.transpose() - 2.0 * q4 * skew(qv);

  AttitudeSolution sol;
  sol.c_b_n0 = Rotation<Frame::Nav0, Frame::Body0>::from_matrix(c);
  sol.largest_eigenvalue_gap = es.eigenvalues()(3) - es.eigenvalues()(2);
  sol.pair_count = pairs.size();
  return sol;
}

Rotation<Frame::Nav0, Frame::Body0> solve_attitude_svd(std::span<const ObservationPair> pairs) {
  check_weights(pairs);
  check_geometry(pairs);
  Eigen::JacobiSVD<Mat3> svd(attitude_profile(pairs), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& u = svd.matrixU();
  const Mat3& v = svd.matrixV();
  const Vec3 d(1.0, 1.0, u.determinant() * v.determinant());
  return Rotation<Frame::Nav0, Frame::Body0>::from_matrix(u * d.asDiagonal() * v.transpose());
}

double wahba_loss(std::span<const ObservationPair> pairs, const Mat3& c) {
  double loss = 0.0;
  for (const ObservationPair& p : pairs) loss += p.weight * (p.alpha.v - c * p.beta.v).squaredNorm();
  return loss;
}

}  // namespace leveralign
