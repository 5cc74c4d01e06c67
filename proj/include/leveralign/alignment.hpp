/**
 * @file    leveralign/alignment.hpp
 * @brief   Lever-arm compensated velocity-integration coarse alignment.
 *
 * The accumulator integrates, at IMU rate and by the trapezoidal rule,
 *
 *   I_fv    = int C_{b(t)}^{b(0)} f^b dt
 *   I_cor   = int C_{n(t)}^{n(0)} (w_ie^n x v_gps^n) dt
 *   I_g     = int C_{n(t)}^{n(0)} g^n dt
 *   I_lever = int C_{b(t)}^{b(0)} [w_eb^b x] dt        (only with truth rates)
 *
 * and emits observation pairs
 *
 *   alpha(t) = C_{n(t)}^{n(0)} v_gps^n(t) - v_gps^n(0) + I_cor - I_g
 *   beta(t)  = I_fv + (C_{b(t)}^{b(0)} [w_ib^b(t) x] - [w_ib^b(0) x]) l^b
 *
 * which satisfy alpha = C_b^n(0) beta up to quadrature error and terms of
 * order |w_ie| |l|. The constant C_b^n(0) is then the Wahba solution over
 * all accumulated pairs.
 */

#ifndef LEVERALIGN_ALIGNMENT_HPP
#define LEVERALIGN_ALIGNMENT_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "leveralign/attitude.hpp"
#include "leveralign/earth.hpp"
#include "leveralign/strapdown.hpp"

namespace leveralign {

/// Body-frame offset from the IMU reference point to the GNSS antenna.
class LeverArm {
 public:
  LeverArm() = default;
  /// Throws DomainError for non-finite components or a norm of 100 m or more.
  explicit LeverArm(const Vec3& l_b);

  const FrameVector<Frame::Body>& l_b() const { return l_b_; }
  bool is_zero() const { return l_b_.v.isZero(0.0); }

 private:
  FrameVector<Frame::Body> l_b_;
};

/// v_gps^n = v^n + C_b^n (w_eb^b x l^b).
FrameVector<Frame::Nav> lever_arm_velocity(const FrameVector<Frame::Nav>& v_n,
                                           const Rotation<Frame::Nav, Frame::Body>& c_b_n,
                                           const FrameVector<Frame::Body>& omega_eb_b, const LeverArm& lever);

/// Inverse of `lever_arm_velocity`: recovers v^n from v_gps^n.
FrameVector<Frame::Nav> reference_point_velocity(const FrameVector<Frame::Nav>& v_gps_n,
                                                 const Rotation<Frame::Nav, Frame::Body>& c_b_n,
                                                 const FrameVector<Frame::Body>& omega_eb_b, const LeverArm& lever);

struct ObservationPair {
  double t = 0.0;
  FrameVector<Frame::Nav0> alpha;  // [m/s]
  FrameVector<Frame::Body0> beta;  // [m/s]
  double weight = 1.0;
};

/// One IMU-rate input: the IMU sample, the GNSS antenna velocity at the same
/// epoch and the earth kinematics used for the navigation-frame terms.
/// `truth` is optional and only feeds the exact-form oracle.
struct AlignmentStep {
  ImuSample imu;
  FrameVector<Frame::Nav> v_gps_n;
  EarthKinematics earth;
  const DerivedRates* truth = nullptr;
};

struct AccumulatorOptions {
  double nominal_dt = 0.01;
  /// A step longer than gap_factor * nominal_dt is a data dropout.
  double gap_factor = 2.0;
  /// w_ib^b(0) is the componentwise median of the samples in [t0, t0 + settle_time].
  double settle_time = 0.1;
  bool coning = false;
};

struct LeverTermGrowth {
  double force_integral = 0.0;     // |I_fv|
  double lever_coefficient = 0.0;  // |(C_{b(t)}^{b(0)} [w_ib^b x] - [w_ib^b(0) x]) l^b|
};

class AlignmentAccumulator {
 public:
  explicit AlignmentAccumulator(LeverArm lever, AccumulatorOptions options = {});

  /// Advances every running integral to `step.imu.t`. The first call fixes the
  /// start epoch. Throws TimeError on non-increasing time or a dropout.
  void accumulate(const AlignmentStep& step);
  void accumulate(std::span<const AlignmentStep> steps);

  bool started() const { return started_; }
  double start_time() const { return t0_; }
  double time() const { return chain_.t; }

  /// Pair at the current epoch `t`. Throws Error before any accumulation and
  /// TimeError when `t` is not the current epoch.
  ObservationPair emit_pair(double t, double weight = 1.0) const;

  /// Pair whose beta keeps the earth-rate terms dropped by `emit_pair`.
  /// Throws Error unless every accumulated step carried truth rates.
  ObservationPair emit_pair_exact(double t, double weight = 1.0) const;

  /// |[w_ie^{b(0)} x] I_lever|_F / |C_{b(t)}^{b(0)} [w_eb^b x]|_F, or nullopt
  /// when w_eb^b(t) vanishes. Requires truth rates.
  std::optional<double> approximation_ratio() const;

  LeverTermGrowth lever_term_growth() const;

  const LeverArm& lever() const { return lever_; }
  const AttitudeChainState& chain() const { return chain_; }
  FrameVector<Frame::Body0> force_integral() const { return i_fv_; }
  FrameVector<Frame::Nav0> coriolis_integral() const { return i_cor_; }
  FrameVector<Frame::Nav0> gravity_integral() const { return i_g_; }
  const Mat3& lever_integral_exact() const { return i_lever_; }
  FrameVector<Frame::Nav> initial_velocity() const { return v_gps_0_; }
  FrameVector<Frame::Body> initial_rate() const;
  bool has_truth() const { return started_ && truth_complete_; }

 private:
  void require_epoch(double t) const;
  FrameVector<Frame::Nav0> alpha() const;
  FrameVector<Frame::Body0> lever_coefficient() const;

  LeverArm lever_;
  AccumulatorOptions options_;
  bool started_ = false;
  double t0_ = 0.0;
  AttitudeChainState chain_;

  ImuSample last_imu_;
  FrameVector<Frame::Nav> last_v_gps_;
  FrameVector<Frame::Nav> last_omega_in_;
  FrameVector<Frame::Nav> v_gps_0_;
  std::vector<Vec3> settle_rates_;
  bool settling_ = true;

  FrameVector<Frame::Body0> i_fv_;
  FrameVector<Frame::Nav0> i_cor_;
  FrameVector<Frame::Nav0> i_g_;
  Mat3 i_lever_ = Mat3::Zero();
  FrameVector<Frame::Body0> prev_fv_;
  FrameVector<Frame::Nav0> prev_cor_;
  FrameVector<Frame::Nav0> prev_g_;
  Mat3 prev_lever_ = Mat3::Zero();

  bool truth_complete_ = true;
  FrameVector<Frame::Body> omega_eb_0_;
  FrameVector<Frame::Body> omega_eb_t_;
  FrameVector<Frame::Body> omega_ie_b0_;
};

struct AttitudeSolution {
  Rotation<Frame::Nav0, Frame::Body0> c_b_n0;
  double largest_eigenvalue_gap = 0.0;
  std::size_t pair_count = 0;
};

/// Relative threshold on the second-largest eigenvalue of sum w beta beta^T
/// below which the pair set is treated as collinear.
inline constexpr double kDegenerateGramRatio = 1e-6;

/// Davenport q-method solution of min sum w |alpha - C beta|^2.
/// Throws DomainError for invalid weights and DegenerateGeometryError when
/// fewer than two pairs are given or the betas are collinear.
AttitudeSolution solve_attitude(std::span<const ObservationPair> pairs);

/// SVD solution of the same problem; used as a cross-check.
Rotation<Frame::Nav0, Frame::Body0> solve_attitude_svd(std::span<const ObservationPair> pairs);

double wahba_loss(std::span<const ObservationPair> pairs, const Mat3& c);

enum class PairWeighting { Uniform, Ramp };

struct AlignmentOptions {
  AccumulatorOptions accumulator;
  PairWeighting weighting = PairWeighting::Uniform;
  /// Number of most recent pairs used by the solver; 0 keeps all history.
  std::size_t window = 0;
  /// Uses the exact-form beta; requires truth rates for every IMU sample.
  bool exact_beta = false;
};

struct AlignmentEpoch {
  ObservationPair pair;
  std::optional<AttitudeSolution> solution;  // empty when the geometry is degenerate
  std::string failure;
};

/// Linear interpolation of the GNSS stream at time t (clamped at the ends).
GnssSample interpolate_gnss(std::span<const GnssSample> gnss, double t);

/// Runs the alignment over an IMU stream, using GNSS-derived position and
/// velocity for the navigation-frame terms. One pair is emitted at each GNSS
/// epoch after the first IMU sample, and the attitude is re-solved from the
/// pairs so far. `truth_rates` must be empty or match `imu` one-to-one.
std::vector<AlignmentEpoch> run_alignment(std::span<const ImuSample> imu, std::span<const GnssSample> gnss,
                                          const LeverArm& lever, const AlignmentOptions& options,
                                          std::span<const DerivedRates> truth_rates = {});

}  // namespace leveralign

#endif  // LEVERALIGN_ALIGNMENT_HPP
