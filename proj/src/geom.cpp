#include "attman/geom.hpp"

#include <cmath>
#include <string>

#include "attman/errors.hpp"

namespace attman {

UnitVector::UnitVector(const Vec3& v, const GeomTolerances& tol) : v_(v) {
  if (!v.allFinite()) throw InvalidState("unit vector has non-finite components");
  const double defect = std::abs(v.norm() - 1.0);
  if (defect <= tol.unit_norm) return;
  if (defect <= tol.repair_factor * tol.unit_norm) {
    v_ = v / v.norm();
    return;
  }
  throw InvalidState("unit vector norm defect " + std::to_string(defect));
}

UnitVector UnitVector::operator-() const { return UnitVector(-v_, Trusted{}); }

Rotation::Rotation(const Mat3& m, const GeomTolerances& tol) : m_(m) {
  if (!m.allFinite()) throw InvalidState("rotation has non-finite entries");
  const double orth = (m.transpose() * m - Mat3::Identity()).norm();
  const double det = std::abs(m.determinant() - 1.0);
  const double defect = std::max(orth, det);
  if (defect <= tol.orthogonality) return;
  if (defect <= tol.repair_factor * tol.orthogonality) {
    // Nearest rotation in the Frobenius sense.
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    m_ = svd.matrixU() * svd.matrixV().transpose();
    return;
  }
  throw InvalidState("rotation defect " + std::to_string(defect));
}

Rotation Rotation::transpose() const { return Rotation(m_.transpose(), Trusted{}); }

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(m_ * other.m_, Trusted{});
}

double Rotation::orthogonality_defect() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

TangentStateS2::TangentStateS2(const UnitVector& q_, const Vec3& omega_,
                               const GeomTolerances& tol)
    : q(q_), omega(omega_) {
  if (!omega.allFinite()) throw InvalidState("angular velocity has non-finite components");
  const double defect = std::abs(q.vec().dot(omega));
  if (defect <= tol.tangency) return;
  if (defect <= tol.repair_factor * tol.tangency) {
    omega = tangent_project(q, omega);
    return;
  }
  throw InvalidState("angular velocity not tangent to S^2, |q.w| = " + std::to_string(defect));
}

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee_skew(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Vec3 vee(const Mat3& m, const GeomTolerances& tol) {
  const double sym = (m + m.transpose()).norm();
  if (!(sym <= tol.skew)) throw NotSkew("vee: |m + m^T|_F = " + std::to_string(sym));
  return vee_skew(m);
}

Rotation exp_rot(const Vec3& v) {
  const double theta2 = v.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a, b;  // R = I + a hat(v) + b hat(v)^2
  if (theta < 1e-8) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  const Mat3 k = hat(v);
  return Rotation(Mat3::Identity() + a * k + b * k * k);
}

Mat3 right_jacobian(const Vec3& v) {
  const double theta2 = v.squaredNorm();
  const double theta = std::sqrt(theta2);
  double a, b;  // Jr = I - a hat(v) + b hat(v)^2
  if (theta < 1e-5) {
    a = 0.5 - theta2 / 24.0;
    b = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    a = (1.0 - std::cos(theta)) / theta2;
    b = (theta - std::sin(theta)) / (theta2 * theta);
  }
  const Mat3 k = hat(v);
  return Mat3::Identity() - a * k + b * k * k;
}

Vec3 tangent_project(const UnitVector& q, const Vec3& v) {
  return v - q.vec() * q.vec().dot(v);
}

double psi_s2(const UnitVector& q, const UnitVector& qd) {
  // 1 - q.qd == |q - qd|^2 / 2 on the sphere; the latter has no cancellation.
  return 0.5 * (q.vec() - qd.vec()).squaredNorm();
}

void require_diagonal_positive(const Mat3& g, const char* what) {
  const Mat3 off = g - Mat3(g.diagonal().asDiagonal());
  if (!g.allFinite() || off.cwiseAbs().maxCoeff() != 0.0 || !(g.diagonal().minCoeff() > 0.0)) {
    throw BadGains(std::string(what) + " must be diagonal with positive entries");
  }
}

double psi_so3(const Rotation& r, const Rotation& rd, const Mat3& g) {
  require_diagonal_positive(g, "G");
  // 1 - (Rd^T R)_ii == |Rd e_i - R e_i|^2 / 2 for orthogonal matrices.
  double psi = 0.0;
  for (int i = 0; i < 3; ++i) {
    psi += g(i, i) * (rd.mat().col(i) - r.mat().col(i)).squaredNorm();
  }
  return 0.25 * psi;
}

Vec3 attitude_error_vector(const Rotation& r, const Rotation& rd, const Mat3& g) {
  require_diagonal_positive(g, "G");
  const Mat3 x = rd.mat().transpose() * r.mat();
  return 0.5 * vee_skew(g * x - x.transpose() * g);
}

double dist_ts2(const TangentStateS2& a, const TangentStateS2& b) {
  return std::sqrt(psi_s2(a.q, b.q)) + (a.omega - b.omega).norm();
}

double dist_tso3(const TangentStateSO3& a, const TangentStateSO3& b, const Mat3& g) {
  return std::sqrt(psi_so3(a.R, b.R, g)) + (a.Omega - b.Omega).norm();
}

}  // namespace attman
