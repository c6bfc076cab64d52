#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "attman/errors.hpp"
#include "attman/geom.hpp"
#include "oracles.hpp"

using namespace attman;
using std::numbers::pi;

namespace {
const Mat3 kG = Vec3(0.9, 1.0, 1.1).asDiagonal();
}

TEST_CASE("hat") {
  CHECK(hat(Vec3::Zero()).isZero(0));
  Mat3 e1;
  e1 << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(hat(Vec3::UnitX()) == e1);
  const Vec3 v(1, 2, 3);
  CHECK((hat(v) * v).norm() == doctest::Approx(0.0));
  CHECK((hat(v) + hat(v).transpose()).isZero(0));
  const Vec3 y(-0.3, 0.7, 2.0);
  CHECK((hat(v) * y - v.cross(y)).norm() < 1e-15);
}

TEST_CASE("vee") {
  CHECK(vee(Mat3::Zero()).isZero(0));
  CHECK(vee(hat(Vec3(1, 2, 3))) == Vec3(1, 2, 3));
  CHECK(vee(hat(Vec3::UnitY())) == Vec3::UnitY());
  Mat3 bad = hat(Vec3(1, 2, 3));
  bad(0, 0) = 1e-3;
  CHECK_THROWS_AS(vee(bad), NotSkew);
  Mat3 almost = hat(Vec3(1, 2, 3));
  almost(0, 1) += 1e-10;
  CHECK((vee(almost) - Vec3(1, 2, 3)).norm() < 1e-10);
}

TEST_CASE("exp_rot") {
  CHECK(exp_rot(Vec3::Zero()).mat() == Mat3::Identity());
  const Mat3 flip = exp_rot(pi * Vec3::UnitZ()).mat();
  CHECK((flip - Vec3(-1, -1, 1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
  CHECK((exp_rot(pi / 2 * Vec3::UnitZ()) * Vec3::UnitX() - Vec3::UnitY()).norm() < 1e-15);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v(u(rng), u(rng), u(rng));
    const Rotation R = exp_rot(v);
    CHECK(R.orthogonality_defect() < 1e-14);
    CHECK(R.mat().determinant() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK((R * v - v).norm() < 1e-14 * std::max(1.0, v.norm()));
    CHECK((R.mat() - oracle::rodrigues(v)).norm() < 1e-14);
  }
  // Taylor branch agrees with the closed form across the switch.
  const Vec3 tiny(3e-9, -2e-9, 1e-9);
  CHECK((exp_rot(tiny).mat() - (Mat3::Identity() + hat(tiny))).norm() < 1e-17);
}

TEST_CASE("right_jacobian matches finite differences of exp_rot") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 v(u(rng), u(rng), u(rng));
    const Vec3 d(u(rng), u(rng), u(rng));
    const double e = 1e-6;
    const Mat3 dexp =
        (oracle::rodrigues(v + e * d) - oracle::rodrigues(v - e * d)) / (2 * e);
    const Mat3 pred = oracle::rodrigues(v) * hat(right_jacobian(v) * d);
    CHECK((dexp - pred).norm() < 1e-8);
  }
  CHECK((right_jacobian(Vec3::Zero()) - Mat3::Identity()).norm() < 1e-15);
}

TEST_CASE("tangent_project") {
  const UnitVector q = UnitVector::e3();
  CHECK(tangent_project(q, Vec3::UnitZ()).isZero(0));
  CHECK(tangent_project(q, Vec3::UnitX()) == Vec3::UnitX());
  CHECK(tangent_project(q, Vec3(1, 1, 1)) == Vec3(1, 1, 0));
  const UnitVector r(Vec3(1, -2, 0.5).normalized());
  const Vec3 p = tangent_project(r, Vec3(0.3, 0.1, -4));
  CHECK(std::abs(p.dot(r.vec())) < 1e-15);
  CHECK((tangent_project(r, p) - p).norm() < 1e-15);
}

TEST_CASE("psi_s2") {
  const UnitVector e3 = UnitVector::e3();
  CHECK(psi_s2(e3, e3) == 0.0);
  CHECK(psi_s2(-e3, e3) == 2.0);
  CHECK(psi_s2(UnitVector::e1(), e3) == doctest::Approx(1.0));
}

TEST_CASE("psi_so3") {
  const Rotation I = Rotation::identity();
  CHECK(psi_so3(I, I, kG) == 0.0);
  CHECK(psi_so3(exp_rot(pi * Vec3::UnitX()), I, kG) == doctest::Approx(2.1).epsilon(1e-14));
  CHECK(psi_so3(exp_rot(pi * Vec3::UnitZ()), I, kG) == doctest::Approx(1.9).epsilon(1e-14));
  CHECK_THROWS_AS(psi_so3(I, I, Mat3::Identity() * -1.0), BadGains);
  Mat3 off = kG;
  off(0, 1) = 0.1;
  CHECK_THROWS_AS(psi_so3(I, I, off), BadGains);
  // Small rotations keep full relative precision.
  const double th = 1e-7;
  CHECK(psi_so3(exp_rot(th * Vec3::UnitZ()), I, kG) ==
        doctest::Approx(0.5 * 1.9 * th * th).epsilon(1e-8));
}

TEST_CASE("attitude_error_vector") {
  const Rotation I = Rotation::identity();
  CHECK(attitude_error_vector(I, I, kG).isZero(0));
  for (int i = 0; i < 3; ++i) {
    CHECK(attitude_error_vector(exp_rot(pi * Vec3::Unit(i)), I, kG).norm() < 1e-15);
  }
  const Vec3 e = attitude_error_vector(exp_rot(0.1 * Vec3::UnitZ()), I, kG);
  CHECK((e - Vec3(0, 0, 0.95 * std::sin(0.1))).norm() < 1e-15);
  CHECK(e.z() == doctest::Approx(0.094841).epsilon(1e-5));
  CHECK_THROWS_AS(attitude_error_vector(I, I, Mat3::Zero()), BadGains);
}

TEST_CASE("dist_ts2") {
  const TangentStateS2 a(UnitVector(Vec3(1, 1, 0).normalized()), Vec3(0, 0, 0.3));
  CHECK(dist_ts2(a, a) == 0.0);
  const TangentStateS2 up(UnitVector::e3(), Vec3::Zero());
  const TangentStateS2 down(-UnitVector::e3(), Vec3::Zero());
  CHECK(dist_ts2(down, up) == doctest::Approx(std::sqrt(2.0)));
  CHECK(dist_ts2(TangentStateS2(UnitVector::e3(), 0.5 * Vec3::UnitX()), up) == doctest::Approx(0.5));
  CHECK(dist_ts2(a, up) == doctest::Approx(dist_ts2(up, a)));
}

TEST_CASE("dist_tso3") {
  const TangentStateSO3 a(exp_rot(Vec3(0.1, 0.2, 0.3)), Vec3(1, 0, 0));
  CHECK(dist_tso3(a, a, kG) == 0.0);
  const TangentStateSO3 I;
  CHECK(dist_tso3(TangentStateSO3(exp_rot(pi * Vec3::UnitX()), Vec3::Zero()), I, kG) ==
        doctest::Approx(std::sqrt(2.1)));
  CHECK(dist_tso3(TangentStateSO3(Rotation::identity(), Vec3::UnitY()), I, kG) == doctest::Approx(1.0));
  CHECK_THROWS_AS(dist_tso3(a, I, Mat3::Identity() * 0.0), BadGains);
}

TEST_CASE("UnitVector validation") {
  CHECK(UnitVector(Vec3(0, 0, 1 + 5e-12)).vec().norm() == doctest::Approx(1.0).epsilon(1e-16));
  CHECK_THROWS_AS(UnitVector(Vec3(0, 0, 1.1)), InvalidState);
  CHECK_THROWS_AS(UnitVector(Vec3(0, 0, NAN)), InvalidState);
  CHECK((-UnitVector::e1()).vec() == -Vec3::UnitX());
}

TEST_CASE("Rotation validation") {
  Mat3 m = exp_rot(Vec3(0.3, -0.2, 1.0)).mat();
  m(0, 0) += 5e-10;
  CHECK(Rotation(m).orthogonality_defect() < 1e-14);
  m(0, 0) += 1e-3;
  CHECK_THROWS_AS(Rotation{m}, InvalidState);
  CHECK_THROWS_AS(Rotation(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()), InvalidState);
  const Rotation a = exp_rot(Vec3(0.1, 0, 0)), b = exp_rot(Vec3(0, 0.2, 0));
  CHECK(((a * b).mat() - a.mat() * b.mat()).norm() < 1e-16);
  CHECK((a.transpose().mat() - a.mat().transpose()).norm() == 0.0);
}

TEST_CASE("TangentStateS2 tangency") {
  const UnitVector q = UnitVector::e3();
  const TangentStateS2 s(q, Vec3(0.2, 0.0, 5e-10));
  CHECK(std::abs(s.q.vec().dot(s.omega)) < 1e-16);
  CHECK_THROWS_AS(TangentStateS2(q, Vec3(0.2, 0.0, 1e-3)), InvalidState);
}
