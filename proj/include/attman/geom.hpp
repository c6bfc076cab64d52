#pragma once

// Primitives on the two-sphere and the rotation group: hat/vee, the Rodrigues
// exponential, tangent projection, configuration error functions and the
// distances on T S^2 and T SO(3).

#include <Eigen/Dense>

namespace attman {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Validation thresholds shared by the value types below. Every constructor
/// accepts an override; the defaults are what the rest of the library uses.
struct GeomTolerances {
  double unit_norm = 1e-12;     ///< | |q| - 1 |
  double orthogonality = 1e-10; ///< |R^T R - I|_F and |det R - 1|
  double tangency = 1e-10;      ///< |q . omega|
  double skew = 1e-9;           ///< |m + m^T|_F accepted by vee()
  /// Defects up to this multiple of the tolerance are repaired instead of rejected.
  double repair_factor = 10.0;
};

inline constexpr GeomTolerances kDefaultTolerances{};

/// Point on S^2.
class UnitVector {
 public:
  explicit UnitVector(const Vec3& v, const GeomTolerances& tol = kDefaultTolerances);

  static UnitVector e1() { return UnitVector(Vec3::UnitX()); }
  static UnitVector e2() { return UnitVector(Vec3::UnitY()); }
  static UnitVector e3() { return UnitVector(Vec3::UnitZ()); }

  const Vec3& vec() const { return v_; }
  UnitVector operator-() const;

 private:
  struct Trusted {};
  UnitVector(const Vec3& v, Trusted) : v_(v) {}
  Vec3 v_;
};

/// Element of SO(3).
class Rotation {
 public:
  explicit Rotation(const Mat3& m, const GeomTolerances& tol = kDefaultTolerances);

  static Rotation identity() { return Rotation(Mat3::Identity()); }

  const Mat3& mat() const { return m_; }
  Rotation transpose() const;
  Rotation operator*(const Rotation& other) const;
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// Orthogonality defect |R^T R - I|_F.
  double orthogonality_defect() const;

 private:
  struct Trusted {};
  Rotation(const Mat3& m, Trusted) : m_(m) {}
  Mat3 m_;
};

struct TangentStateS2 {
  /// (e3, 0)
  TangentStateS2() : q(UnitVector::e3()), omega(Vec3::Zero()) {}
  TangentStateS2(const UnitVector& q_, const Vec3& omega_,
                 const GeomTolerances& tol = kDefaultTolerances);
  UnitVector q;
  Vec3 omega;
};

struct TangentStateSO3 {
  /// (I, 0)
  TangentStateSO3() : R(Rotation::identity()), Omega(Vec3::Zero()) {}
  TangentStateSO3(const Rotation& R_, const Vec3& Omega_) : R(R_), Omega(Omega_) {}
  Rotation R;
  Vec3 Omega;
};

Mat3 hat(const Vec3& v);

/// Inverse of hat(). Throws NotSkew when |m + m^T|_F exceeds tol.skew;
/// otherwise reads the skew part of m.
Vec3 vee(const Mat3& m, const GeomTolerances& tol = kDefaultTolerances);

/// Vee of the skew part (m - m^T)/2, no precondition.
Vec3 vee_skew(const Mat3& m);

/// Rodrigues formula, Taylor branch for |v| < 1e-8.
Rotation exp_rot(const Vec3& v);

/// Right Jacobian of exp_rot: d/de exp(v + e d) = exp(v) hat(jr(v) d).
Mat3 right_jacobian(const Vec3& v);

/// (I - q q^T) v, i.e. -hat(q)^2 v.
Vec3 tangent_project(const UnitVector& q, const Vec3& v);

/// 1 - q . qd
double psi_s2(const UnitVector& q, const UnitVector& qd);

/// Throws BadGains unless g is diagonal with positive entries.
void require_diagonal_positive(const Mat3& g, const char* what);

/// 1/2 tr[(I - Rd^T R) G]
double psi_so3(const Rotation& r, const Rotation& rd, const Mat3& g);

/// e_R = 1/2 (G Rd^T R - R^T Rd G)^vee
Vec3 attitude_error_vector(const Rotation& r, const Rotation& rd, const Mat3& g);

/// sqrt(Psi(q1,q2)) + |w1 - w2|
double dist_ts2(const TangentStateS2& a, const TangentStateS2& b);

/// sqrt(Psi(R1,R2)) + |W1 - W2| with weight matrix g.
double dist_tso3(const TangentStateSO3& a, const TangentStateSO3& b, const Mat3& g);

}  // namespace attman
