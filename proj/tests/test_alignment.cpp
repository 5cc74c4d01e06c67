#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "leveralign/alignment.hpp"
#include "leveralign/error.hpp"
#include "leveralign/simkit.hpp"
#include "support.hpp"

using namespace leveralign;
using std::numbers::pi;

namespace {

constexpr double omega = 7.292115e-5;

// Noise-free simulation with the antenna velocity at IMU rate and earth
// kinematics at the truth position.
struct Sim {
  std::vector<TruthState> truth;
  std::vector<ImuSample> imu;
  std::vector<DerivedRates> rates;
  LeverArm lever;

  Sim(const TrajectoryProfile& p, double dt, const Vec3& l) : lever(l) {
    truth = gen_trajectory(p, dt);
    imu = synthesize_imu(truth);
    rates = truth_rates(truth, imu);
  }

  AlignmentStep step(std::size_t i) const {
    const TruthState& s = truth[i];
    return {imu[i], lever_arm_velocity(s.v_n, s.c_b_n, rates[i].omega_eb_b, lever), earth_kinematics(s.pos, s.v_n),
            &rates[i]};
  }

  Mat3 c0() const { return truth.front().c_b_n.matrix(); }
};

double residual(const ObservationPair& p, const Mat3& c0) { return (p.alpha.v - c0 * p.beta.v).norm(); }

// Stationary step at the equator with an arbitrary body rate.
AlignmentStep still_step(double t, const Vec3& w_ib, const DerivedRates* truth = nullptr) {
  return {ImuSample{t, FrameVector<Frame::Body>(w_ib), FrameVector<Frame::Body>(0, 0, -9.78)}, FrameVector<Frame::Nav>(),
          earth_kinematics({0, 0, 0}, FrameVector<Frame::Nav>()), truth};
}

ObservationPair make_pair(const Mat3& c, const Vec3& beta, double w = 1.0) {
  return {0.0, FrameVector<Frame::Nav0>(Vec3(c * beta)), FrameVector<Frame::Body0>(beta), w};
}

}  // namespace

TEST_CASE("lever arm velocity") {
  const auto c = Rotation<Frame::Nav, Frame::Body>::identity();
  const FrameVector<Frame::Nav> v(10, -3, 0.5);

  SUBCASE("zero lever arm leaves the velocity") {
    CHECK(lever_arm_velocity(v, c, FrameVector<Frame::Body>(0.3, 0.1, 0.2), LeverArm()).v == v.v);
  }
  SUBCASE("rate parallel to the lever arm adds nothing") {
    const LeverArm l(Vec3(1, 2, 3));
    const Vec3 out = lever_arm_velocity(v, c, FrameVector<Frame::Body>(Vec3(1, 2, 3) * 0.05), l).v;
    CHECK((out - v.v).norm() < 1e-16);
  }
  SUBCASE("yaw rate over a unit-diagonal lever arm") {
    const Vec3 out =
        lever_arm_velocity(FrameVector<Frame::Nav>(), c, FrameVector<Frame::Body>(0, 0, 0.1), LeverArm(Vec3(1, 1, 1))).v;
    CHECK((out - Vec3(-0.1, 0.1, 0.0)).norm() < 1e-16);
  }
  SUBCASE("reference point velocity inverts it") {
    for (int i = 0; i < 200; ++i) {
      const auto cr = Rotation<Frame::Nav, Frame::Body>::from_matrix(testrng::rotation());
      const FrameVector<Frame::Body> w(testrng::vec(1.0));
      const LeverArm l(testrng::vec(20.0));
      const FrameVector<Frame::Nav> vi(testrng::vec(300.0));
      const Vec3 back = reference_point_velocity(lever_arm_velocity(vi, cr, w, l), cr, w, l).v;
      CHECK((back - vi.v).cwiseAbs().maxCoeff() < 1e-13);
      const Vec3 direct = vi.v + cr.matrix() * oracle::cross(w.v, l.l_b().v);
      CHECK((lever_arm_velocity(vi, cr, w, l).v - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("lever arm bounds") {
  CHECK(LeverArm().is_zero());
  CHECK_NOTHROW(LeverArm(Vec3(57, 57, 57)));
  CHECK_THROWS_AS(LeverArm(Vec3(100, 0, 0)), DomainError);
  CHECK_THROWS_AS(LeverArm(Vec3(0, std::nan(""), 0)), DomainError);
  CHECK_THROWS_AS(LeverArm(Vec3(0, 0, INFINITY)), DomainError);
}

TEST_CASE("accumulator bookkeeping") {
  AlignmentAccumulator acc(LeverArm(Vec3(1, 1, 1)));

  SUBCASE("pairs before accumulation are rejected") {
    CHECK_FALSE(acc.started());
    CHECK_THROWS_AS(acc.emit_pair(0.0), Error);
    CHECK(acc.lever_term_growth().force_integral == 0.0);
  }
  SUBCASE("empty slice changes nothing") {
    acc.accumulate(std::span<const AlignmentStep>());
    CHECK_FALSE(acc.started());
  }
  SUBCASE("first epoch pair is zero") {
    acc.accumulate(still_step(5.0, Vec3(0.01, 0.02, 0.03)));
    const ObservationPair p = acc.emit_pair(5.0);
    CHECK(p.alpha.v.isZero(0.0));
    CHECK(p.beta.v.isZero(0.0));
    CHECK(acc.start_time() == 5.0);
  }
  SUBCASE("wrong epoch and bad time steps") {
    acc.accumulate(still_step(0.0, Vec3::Zero()));
    acc.accumulate(still_step(0.01, Vec3::Zero()));
    CHECK_THROWS_AS(acc.emit_pair(0.02), TimeError);
    CHECK_NOTHROW(acc.emit_pair(0.01));
    CHECK_THROWS_AS(acc.accumulate(still_step(0.01, Vec3::Zero())), TimeError);
    CHECK_THROWS_AS(acc.accumulate(still_step(0.005, Vec3::Zero())), TimeError);
    CHECK_THROWS_AS(acc.accumulate(still_step(0.0301, Vec3::Zero())), TimeError);
    CHECK_NOTHROW(acc.accumulate(still_step(0.03, Vec3::Zero())));
  }
  SUBCASE("options are validated") {
    CHECK_THROWS_AS(AlignmentAccumulator(LeverArm(), {.nominal_dt = 0.0}), DomainError);
    CHECK_THROWS_AS(AlignmentAccumulator(LeverArm(), {.settle_time = -1.0}), DomainError);
  }
}

TEST_CASE("stationary gravity integral at the equator") {
  AlignmentAccumulator acc(LeverArm{});
  for (int i = 0; i <= 1000; ++i) acc.accumulate(still_step(i * 0.01, Vec3::Zero()));
  // The navigation chain turns about north at the earth rate, so gravity sweeps
  // an arc: |int g dt| = g * 2 sin(W t / 2) / W.
  const Vec3 g = acc.gravity_integral().v;
  CHECK(std::abs(g.norm() - 9.7803253359 * 2.0 * std::sin(omega * 5.0) / omega) < 1e-9);
  CHECK(std::abs(g.norm() - 9.7803253359 * 10.0) < 1e-5);
  CHECK(acc.coriolis_integral().v.isZero(0.0));
  CHECK(acc.force_integral().z() == doctest::Approx(-97.8).epsilon(1e-12));
}

TEST_CASE("initial rate is the median over the settle window") {
  AlignmentAccumulator acc(LeverArm(Vec3(1, 0, 0)), {.settle_time = 0.05});
  const double zs[] = {0.1, 0.5, 0.2, 9.0, 0.3, 0.4, 7.0, 8.0};
  for (int i = 0; i < 8; ++i) acc.accumulate(still_step(i * 0.01, Vec3(0, 0, zs[i])));
  // Samples at t <= 0.05: 0.1, 0.5, 0.2, 9.0, 0.3, 0.4 -> median 0.35.
  CHECK(acc.initial_rate().z() == doctest::Approx(0.35).epsilon(1e-15));
  CHECK(acc.chain().omega_latched);
}

TEST_CASE("zero lever arm reduces beta to the force integral bit for bit") {
  TrajectoryProfile p;
  p.duration = 30.0;
  const Sim sim(p, 0.01, Vec3::Zero());
  AlignmentAccumulator acc(sim.lever);
  for (std::size_t i = 0; i < sim.truth.size(); ++i) {
    acc.accumulate(sim.step(i));
    if (i % 100 != 0) continue;
    const double t = sim.truth[i].t;
    const ObservationPair a = acc.emit_pair(t);
    const ObservationPair e = acc.emit_pair_exact(t);
    const Vec3 fv = acc.force_integral().v;
    CHECK(std::memcmp(a.beta.v.data(), fv.data(), sizeof(double) * 3) == 0);
    CHECK(std::memcmp(e.beta.v.data(), fv.data(), sizeof(double) * 3) == 0);
  }
}

TEST_CASE("identity holds on the default maneuver") {
  TrajectoryProfile p;
  const Sim sim(p, 0.01, Vec3(1, 1, 1));
  AlignmentAccumulator acc(sim.lever);
  double worst = 0.0;
  for (std::size_t i = 0; i < sim.truth.size(); ++i) {
    acc.accumulate(sim.step(i));
    if (i % 100 == 0) worst = std::max(worst, residual(acc.emit_pair(sim.truth[i].t), sim.c0()));
  }
  CHECK(worst < 1e-4);
  // Without the lever-arm term the residual is the lever velocity itself.
  AlignmentAccumulator plain(LeverArm{});
  double uncompensated = 0.0;
  for (std::size_t i = 0; i < sim.truth.size(); ++i) {
    plain.accumulate(sim.step(i));
    if (i % 100 == 0) uncompensated = std::max(uncompensated, residual(plain.emit_pair(sim.truth[i].t), sim.c0()));
  }
  CHECK(uncompensated > 1e3 * worst);
}

TEST_CASE("exact form") {
  SUBCASE("requires truth rates for every step") {
    AlignmentAccumulator acc(LeverArm(Vec3(1, 1, 1)));
    acc.accumulate(still_step(0.0, Vec3::Zero()));
    CHECK_THROWS_AS(acc.emit_pair_exact(0.0), Error);
    CHECK_THROWS_AS(acc.approximation_ratio(), Error);
  }

  SUBCASE("matches the approximation without earth rate") {
    // Rates chosen so that w_ie^b = 0 and w_eb^b = w_ib^b.
    AlignmentAccumulator acc(LeverArm(Vec3(1, -2, 0.5)), {.settle_time = 0.0});
    std::vector<DerivedRates> r(500);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Vec3 w(0.1 * std::sin(0.01 * i), 0.05, 0.2 * std::cos(0.02 * i));
      r[i].omega_ib_b = FrameVector<Frame::Body>(w);
      r[i].omega_eb_b = FrameVector<Frame::Body>(w);
      acc.accumulate(still_step(i * 0.01, w, &r[i]));
    }
    const double t = 4.99;
    const ObservationPair a = acc.emit_pair(t), e = acc.emit_pair_exact(t);
    CHECK((a.beta.v - e.beta.v).norm() < 1e-14);
    CHECK(acc.approximation_ratio().value() == 0.0);
  }

  SUBCASE("vanishing body rate has no ratio") {
    AlignmentAccumulator acc(LeverArm(Vec3(1, 1, 1)));
    DerivedRates r;
    r.omega_ie_b = FrameVector<Frame::Body>(omega, 0, 0);
    acc.accumulate(still_step(0.0, Vec3::Zero(), &r));
    acc.accumulate(still_step(0.01, Vec3::Zero(), &r));
    CHECK_FALSE(acc.approximation_ratio().has_value());
  }

  SUBCASE("relative difference stays small after 600 s") {
    TrajectoryProfile p;
    p.duration = 600.0;
    const Sim sim(p, 0.01, Vec3(1, 1, 1));
    AlignmentAccumulator acc(sim.lever);
    for (std::size_t i = 0; i < sim.truth.size(); ++i) acc.accumulate(sim.step(i));
    const ObservationPair a = acc.emit_pair(600.0), e = acc.emit_pair_exact(600.0);
    CHECK((e.beta.v - a.beta.v).norm() / e.beta.v.norm() < 1e-2);
    CHECK(acc.approximation_ratio().value() < 0.1);
  }
}

TEST_CASE("sign of the earth-rate lever term") {
  // Slow steady turn, 50 m-scale lever arm and a fine step: quadrature error
  // is far below the size of the term, so only one sign can close the identity.
  TrajectoryProfile p;
  p.duration = 120.0;
  p.maneuver_onset = 0.0;
  p.roll_in_time = 0.0;
  p.climb_angle = 0.0;
  p.turn_rate = 0.05;
  const double dt = 0.005;
  const Sim sim(p, dt, Vec3(50, -25, 15));
  AlignmentAccumulator acc(sim.lever, {.nominal_dt = dt, .settle_time = 0.0});
  double approx = 0, exact = 0, flipped = 0, term = 0;
  for (std::size_t i = 0; i < sim.truth.size(); ++i) {
    acc.accumulate(sim.step(i));
    if (i == 0 || i % 200 != 0) continue;
    const double t = sim.truth[i].t;
    const ObservationPair a = acc.emit_pair(t), e = acc.emit_pair_exact(t);
    const Vec3 k = skew(sim.rates[0].omega_ie_b.v) * acc.lever_integral_exact() * sim.lever.l_b().v;
    ObservationPair f = e;
    f.beta.v -= 2.0 * k;
    approx = std::max(approx, residual(a, sim.c0()));
    exact = std::max(exact, residual(e, sim.c0()));
    flipped = std::max(flipped, residual(f, sim.c0()));
    term = std::max(term, k.norm());
  }
  CHECK(term > 1e-3);
  CHECK(exact < approx);
  CHECK(flipped > 100.0 * exact);
  CHECK(flipped > 100.0 * approx);
}

TEST_CASE("approximation ratio under a constant single-axis rate") {
  // C_{b(t)}^{b(0)} = Rz(wt), so int C [w x] dt has the closed form
  // (int Rz) [w x] and the ratio reduces to |[w_ie x] I|_F / (w sqrt 2).
  const double w = 0.01, dt = 0.01;
  const Vec3 ie = omega * Vec3(0.3, -0.5, 0.8).normalized();
  auto integral_rz = [&](double t) {
    Mat3 m = Mat3::Zero();
    m(0, 0) = m(1, 1) = std::sin(w * t) / w;
    m(0, 1) = (std::cos(w * t) - 1.0) / w;
    m(1, 0) = -m(0, 1);
    m(2, 2) = t;
    return m;
  };
  Mat3 sk;
  sk << 0, -w, 0, w, 0, 0, 0, 0, 0;

  DerivedRates r;
  r.omega_ib_b = FrameVector<Frame::Body>(0, 0, w);
  r.omega_eb_b = FrameVector<Frame::Body>(0, 0, w);
  r.omega_ie_b = FrameVector<Frame::Body>(ie);
  AlignmentAccumulator acc(LeverArm(Vec3(1, 1, 1)), {.settle_time = 0.0});
  Mat3 ie_skew;
  ie_skew << 0, -ie.z(), ie.y(), ie.z(), 0, -ie.x(), -ie.y(), ie.x(), 0;

  double prev = -1.0, worst = 0.0, peak = 0.0;
  bool monotone_first_half_turn = true;
  for (long i = 0; i <= 100000; ++i) {
    const double t = i * dt;
    acc.accumulate(still_step(t, r.omega_ib_b.v, &r));
    if (i == 0) CHECK(acc.approximation_ratio().value() == 0.0);
    if (i == 0 || i % 100 != 0) continue;
    const double ratio = acc.approximation_ratio().value();
    const double expected = (ie_skew * integral_rz(t) * sk).norm() / (w * std::sqrt(2.0));
    worst = std::max(worst, std::abs(ratio - expected));
    CHECK(ratio <= omega * t * (1 + 1e-9));
    if (w * t <= pi && ratio < prev) monotone_first_half_turn = false;
    prev = ratio;
    peak = std::max(peak, ratio);
  }
  CHECK(worst < 1e-9);
  CHECK(monotone_first_half_turn);
  CHECK(peak < 0.1);
  CHECK(acc.approximation_ratio().value() < 0.1);
}

TEST_CASE("lever term growth") {
  TrajectoryProfile p;
  p.duration = 100.0;
  const Sim sim(p, 0.01, Vec3(1, 1, 1));
  AlignmentAccumulator acc(sim.lever);
  acc.accumulate(sim.step(0));
  CHECK(acc.lever_term_growth().force_integral == 0.0);
  CHECK(acc.lever_term_growth().lever_coefficient == 0.0);
  double max_rate = 0.0;
  for (std::size_t i = 1; i < sim.truth.size(); ++i) {
    acc.accumulate(sim.step(i));
    max_rate = std::max(max_rate, sim.imu[i].omega_ib_b.norm());
  }
  const LeverTermGrowth g = acc.lever_term_growth();
  CHECK(g.lever_coefficient <= 2.0 * max_rate * std::sqrt(3.0));
  CHECK(g.force_integral > 10.0 * g.lever_coefficient);
  CHECK(g.force_integral == doctest::Approx(acc.force_integral().norm()));
}

TEST_CASE("solver recovers random attitudes") {
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat3 c = testrng::rotation();
    std::vector<ObservationPair> pairs;
    const int n = 3 + trial % 5;
    for (int k = 0; k < n; ++k) pairs.push_back(make_pair(c, testrng::vec(50.0), testrng::uniform(0.1, 2.0)));
    const AttitudeSolution s = solve_attitude(pairs);
    CHECK(oracle::angle_between(s.c_b_n0.matrix(), c) < 1e-9);
    CHECK(s.pair_count == static_cast<std::size_t>(n));
    CHECK(oracle::angle_between(solve_attitude_svd(pairs).matrix(), c) < 1e-9);
  }
}

TEST_CASE("solver degeneracy") {
  const Mat3 c = oracle::rot_z(0.7) * oracle::rot_x(0.2);

  SUBCASE("a single pair") {
    const std::vector<ObservationPair> one{make_pair(c, Vec3(3, 0, 4))};
    try {
      solve_attitude(one);
      FAIL("expected an unobservability error");
    } catch (const DegenerateGeometryError& e) {
      CHECK(std::abs(std::abs(e.axis().dot(Vec3(0.6, 0, 0.8))) - 1.0) < 1e-12);
    }
  }
  SUBCASE("collinear pairs") {
    const std::vector<ObservationPair> pairs{make_pair(c, Vec3(1, 2, 2)), make_pair(c, Vec3(-2, -4, -4)),
                                             make_pair(c, Vec3(0.5, 1, 1))};
    try {
      solve_attitude(pairs);
      FAIL("expected an unobservability error");
    } catch (const DegenerateGeometryError& e) {
      CHECK(std::abs(std::abs(e.axis().dot(Vec3(1, 2, 2) / 3.0)) - 1.0) < 1e-12);
    }
  }
  SUBCASE("coplanar pairs are solvable") {
    const std::vector<ObservationPair> pairs{make_pair(c, Vec3(1, 0, 0)), make_pair(c, Vec3(0, 1, 0)),
                                             make_pair(c, Vec3(1, 1, 0))};
    CHECK(oracle::angle_between(solve_attitude(pairs).c_b_n0.matrix(), c) < 1e-12);
  }
  SUBCASE("invalid weights") {
    std::vector<ObservationPair> pairs{make_pair(c, Vec3(1, 0, 0)), make_pair(c, Vec3(0, 1, 0))};
    pairs[0].weight = -1.0;
    CHECK_THROWS_AS(solve_attitude(pairs), DomainError);
    pairs[0].weight = std::nan("");
    CHECK_THROWS_AS(solve_attitude(pairs), DomainError);
    pairs[0].weight = pairs[1].weight = 0.0;
    CHECK_THROWS_AS(solve_attitude(pairs), DomainError);
  }
}

TEST_CASE("solver properties") {
  SUBCASE("invariant to a common weight scale") {
    const Mat3 c = testrng::rotation();
    std::vector<ObservationPair> pairs;
    for (int k = 0; k < 6; ++k) {
      ObservationPair p = make_pair(c, testrng::vec(10.0), testrng::uniform(0.5, 1.5));
      p.alpha.v += testrng::vec(0.3);
      pairs.push_back(p);
    }
    const Mat3 base = solve_attitude(pairs).c_b_n0.matrix();
    for (auto& p : pairs) p.weight *= 37.5;
    CHECK(oracle::angle_between(solve_attitude(pairs).c_b_n0.matrix(), base) < 1e-12);
  }

  SUBCASE("q-method, SVD and loss dominance agree on noisy pairs") {
    for (int trial = 0; trial < 1000; ++trial) {
      const Mat3 c = testrng::rotation();
      std::vector<ObservationPair> pairs;
      for (int k = 0; k < 5; ++k) {
        ObservationPair p = make_pair(c, testrng::vec(10.0), testrng::uniform(0.2, 3.0));
        p.alpha.v += testrng::vec(1.0);
        pairs.push_back(p);
      }
      const Mat3 q = solve_attitude(pairs).c_b_n0.matrix();
      CHECK(oracle::angle_between(q, solve_attitude_svd(pairs).matrix()) < 1e-9);
      const double best = wahba_loss(pairs, q);
      CHECK(best <= wahba_loss(pairs, testrng::rotation()) + 1e-9);
      CHECK(best <= wahba_loss(pairs, c) + 1e-9);
    }
  }
}

TEST_CASE("GNSS interpolation") {
  const std::vector<GnssSample> g{{0.0, {0.1, 0.2, 100.0}, FrameVector<Frame::Nav>(0, 0, 0)},
                                  {1.0, {0.3, 0.4, 200.0}, FrameVector<Frame::Nav>(10, -2, 4)}};
  const GnssSample mid = interpolate_gnss(g, 0.25);
  CHECK(mid.t == 0.25);
  CHECK(mid.p_gps.lat == doctest::Approx(0.15));
  CHECK(mid.p_gps.height == doctest::Approx(125.0));
  CHECK((mid.v_gps_n.v - Vec3(2.5, -0.5, 1.0)).norm() < 1e-15);
  CHECK(interpolate_gnss(g, -1.0).v_gps_n.v == g[0].v_gps_n.v);
  CHECK(interpolate_gnss(g, 5.0).p_gps.lat == 0.3);
  CHECK_THROWS_AS(interpolate_gnss(std::span<const GnssSample>(), 0.0), Error);
}

TEST_CASE("alignment over synthetic streams") {
  TrajectoryProfile p;
  p.duration = 60.0;
  const auto truth = gen_trajectory(p, 0.01);
  const auto imu = synthesize_imu(truth);
  const auto rates = truth_rates(truth, imu);
  const LeverArm lever(Vec3(1, 1, 1));
  const auto gnss = synthesize_gnss(truth, rates, lever, SensorErrorModel{}, 1.0);
  const Mat3 c0 = truth.front().c_b_n.matrix();

  SUBCASE("one epoch per GNSS sample after the start, final attitude close to truth") {
    const auto epochs = run_alignment(imu, gnss, lever, {});
    REQUIRE(epochs.size() == 60);
    CHECK(epochs.front().pair.t == doctest::Approx(1.0));
    CHECK_FALSE(epochs.front().solution.has_value());
    CHECK_FALSE(epochs.front().failure.empty());
    REQUIRE(epochs.back().solution.has_value());
    CHECK(oracle::angle_between(epochs.back().solution->c_b_n0.matrix(), c0) < 1e-4);
  }
  SUBCASE("window and ramp weighting") {
    AlignmentOptions o;
    o.window = 5;
    o.weighting = PairWeighting::Ramp;
    const auto epochs = run_alignment(imu, gnss, lever, o);
    CHECK(epochs.back().solution->pair_count == 5);
    CHECK(epochs.back().pair.weight == doctest::Approx(60.0));
  }
  SUBCASE("exact form needs matching truth rates") {
    AlignmentOptions o;
    o.exact_beta = true;
    CHECK_THROWS_AS(run_alignment(imu, gnss, lever, o), Error);
    CHECK_THROWS_AS(run_alignment(imu, gnss, lever, {}, std::span(rates).first(10)), Error);
    const auto epochs = run_alignment(imu, gnss, lever, o, rates);
    CHECK(oracle::angle_between(epochs.back().solution->c_b_n0.matrix(), c0) < 1e-4);
  }
  SUBCASE("empty IMU stream") { CHECK(run_alignment({}, gnss, lever, {}).empty()); }
}
