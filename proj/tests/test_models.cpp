#include <doctest.h>

#include <numbers>

#include "attman/errors.hpp"
#include "attman/models.hpp"

using namespace attman;
using std::numbers::pi;

TEST_CASE("s2_control_moment") {
  const S2Params p;
  const Vec3 u = s2_control_moment(TangentStateS2(UnitVector::e1(), Vec3::Zero()), p);
  CHECK((u - Vec3(0, 8.81, 0)).norm() < 1e-14);
  const Vec3 d = s2_control_moment(TangentStateS2(UnitVector::e3(), 0.1 * Vec3::UnitX()), p);
  CHECK((d - Vec3(-0.1, 0, 0)).norm() < 1e-15);
  S2Params heavy = p;
  heavy.m = 2.0;
  heavy.l = 3.0;
  const Vec3 u2 = s2_control_moment(TangentStateS2(UnitVector::e3(), 0.1 * Vec3::UnitX()), heavy);
  CHECK((u2 - 18.0 * Vec3(-0.1, 0, 0)).norm() < 1e-14);
}

TEST_CASE("s2_vector_field") {
  const S2Params p;
  for (const auto& s : equilibria(p)) {
    const auto d = s2_vector_field(s, p);
    CHECK(d.q_dot.isZero(0));
    CHECK(d.omega_dot.isZero(0));
  }
  const auto d = s2_vector_field(TangentStateS2(UnitVector::e1(), Vec3::Zero()), p);
  CHECK((d.omega_dot - Vec3(0, -1, 0)).norm() < 1e-15);
  CHECK(d.q_dot.isZero(0));
  const TangentStateS2 s(UnitVector(Vec3(1, 2, 2) / 3.0), Vec3(2, -1, 0));
  CHECK(std::abs(s2_vector_field(s, p).q_dot.dot(s.q.vec())) < 1e-15);
}

TEST_CASE("so3_control_moment") {
  const SO3Params p;
  CHECK(so3_control_moment(TangentStateSO3(), p).norm() < 1e-15);
  const Vec3 d = so3_control_moment(TangentStateSO3(Rotation::identity(), Vec3::UnitZ()), p);
  CHECK((d - Vec3(0, 0, -1)).norm() < 1e-15);
  const Vec3 e = so3_control_moment(TangentStateSO3(exp_rot(0.1 * Vec3::UnitZ()), Vec3::Zero()), p);
  CHECK((e - Vec3(0, 0, -0.95 * std::sin(0.1))).norm() < 1e-15);
  // Off-axis tilt: gravity compensation is -m g rho x R^T e3.
  const Rotation R = exp_rot(0.2 * Vec3::UnitX());
  const Vec3 tilt = so3_control_moment(TangentStateSO3(R, Vec3::Zero()), p);
  const Vec3 expect = -p.kR * attitude_error_vector(R, p.Rd, p.G) -
                      p.m * p.g * p.rho.cross(R.mat().transpose() * Vec3::UnitZ());
  CHECK((tilt - expect).norm() < 1e-14);
}

TEST_CASE("so3_vector_field") {
  const SO3Params p;
  for (const auto& s : equilibria(p)) {
    const auto d = so3_vector_field(s, p);
    CHECK(d.Omega_dot.norm() < 1e-15);
    CHECK(d.R_dot.isZero(0));
  }
  const auto d = so3_vector_field(TangentStateSO3(Rotation::identity(), Vec3::UnitZ()), p);
  CHECK((d.Omega_dot - Vec3(0, 0, -1)).norm() < 1e-15);
  const auto g = so3_vector_field(TangentStateSO3(Rotation::identity(), Vec3(1, 1, 0)), p);
  // J Wdot = -W x J W - W with J = diag(3,2,1): W x JW = (0,0,-1).
  CHECK((g.Omega_dot - Vec3(-1.0 / 3.0, -0.5, 1.0)).norm() < 1e-15);
}

TEST_CASE("lyapunov functions") {
  const S2Params p;
  CHECK(lyapunov_s2(TangentStateS2(UnitVector::e3(), Vec3::Zero()), p) == 0.0);
  CHECK(lyapunov_s2(TangentStateS2(-UnitVector::e3(), Vec3::Zero()), p) == 2.0);
  CHECK(lyapunov_s2(TangentStateS2(UnitVector::e3(), Vec3::UnitX()), p) == 0.5);
  const SO3Params r;
  CHECK(lyapunov_so3(TangentStateSO3(), r) == 0.0);
  CHECK(lyapunov_so3(TangentStateSO3(Rotation::identity(), Vec3::UnitX()), r) == 1.5);
  CHECK(lyapunov_so3(TangentStateSO3(exp_rot(pi * Vec3::UnitX()), Vec3::Zero()), r) ==
        doctest::Approx(2.1));
}

TEST_CASE("equilibria") {
  const auto s2 = equilibria(S2Params{});
  REQUIRE(s2.size() == 2);
  CHECK(s2[0].q.vec() == Vec3::UnitZ());
  CHECK(s2[1].q.vec() == -Vec3::UnitZ());
  const auto so3 = equilibria(SO3Params{});
  REQUIRE(so3.size() == 4);
  CHECK(so3[0].R.mat() == Mat3::Identity());
  CHECK(so3[1].R.mat() == Vec3(1, -1, -1).asDiagonal().toDenseMatrix());
  CHECK(so3[2].R.mat() == Vec3(-1, 1, -1).asDiagonal().toDenseMatrix());
  CHECK(so3[3].R.mat() == Vec3(-1, -1, 1).asDiagonal().toDenseMatrix());
  for (int i = 1; i <= 3; ++i) {
    CHECK((so3[i].R.mat() - exp_rot(pi * Vec3::Unit(i - 1)).mat()).norm() < 1e-15);
  }
  CHECK(so3_equilibrium_index("e2") == 2);
  CHECK_THROWS_AS(so3_equilibrium_index("e4"), BadParams);
  CHECK_THROWS_AS(s2_equilibrium(S2Params{}, "sideways"), BadParams);
}

TEST_CASE("parameter validation") {
  S2Params p;
  CHECK_NOTHROW(p.validate());
  p.kq = 0.0;
  CHECK_THROWS_AS(p.validate(), BadParams);
  SO3Params r;
  CHECK_NOTHROW(r.validate());
  r.J(0, 1) = 0.1;
  CHECK_THROWS(r.validate());
  SO3Params s;
  s.kOmega = -1.0;
  CHECK_THROWS_AS(s.validate(), BadParams);
  CHECK(parse_model_id("so3") == ModelId::SO3);
  CHECK_THROWS_AS(parse_model_id("se3"), BadParams);
}
