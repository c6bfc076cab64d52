#include "attman/linearization.hpp"

namespace attman {

Mat26 c_matrix_s2(const TangentStateS2& s) {
  const Vec3& q = s.q.vec();
  Mat26 c = Mat26::Zero();
  c.block<1, 3>(0, 0) = q.transpose();
  c.block<1, 3>(1, 0) = -s.omega.transpose() * hat(q);
  c.block<1, 3>(1, 3) = q.transpose();
  return c;
}

LinearizedSystem a_matrix_s2(const TangentStateS2& s, const S2Params& p) {
  const Vec3& q = s.q.vec();
  const Mat3 qqT = q * q.transpose();
  Mat6 a;
  a.block<3, 3>(0, 0) = qqT * hat(s.omega);
  a.block<3, 3>(0, 3) = Mat3::Identity() - qqT;
  a.block<3, 3>(3, 0) = p.kq * hat(p.qd.vec()) * hat(q);
  a.block<3, 3>(3, 3) = -p.komega * Mat3::Identity();
  return {a, c_matrix_s2(s), s};
}

Mat3 error_hessian_so3(const Rotation& R, const SO3Params& p) {
  const Mat3 x = R.mat().transpose() * p.Rd.mat() * p.G;
  return x.trace() * Mat3::Identity() - x;
}

LinearizedSystem a_matrix_so3(const TangentStateSO3& s, const SO3Params& p) {
  const Mat3 Jinv = p.J.diagonal().cwiseInverse().asDiagonal();
  const Mat3 H = error_hessian_so3(s.R, p);
  Mat6 a;
  a.block<3, 3>(0, 0) = -hat(s.Omega);
  a.block<3, 3>(0, 3) = Mat3::Identity();
  a.block<3, 3>(3, 0) = -0.5 * p.kR * Jinv * H;
  a.block<3, 3>(3, 3) =
      Jinv * (hat(p.J * s.Omega) - hat(s.Omega) * p.J - p.kOmega * Mat3::Identity());
  return {a, std::nullopt, s};
}

}  // namespace attman
