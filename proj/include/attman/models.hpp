#pragma once

// Closed-loop spherical pendulum on S^2 and 3D pendulum on SO(3): control
// laws, vector fields, Lyapunov functions and equilibria.

#include <string>
#include <vector>

#include "attman/geom.hpp"

namespace attman {

enum class ModelId { S2, SO3 };

std::string to_string(ModelId id);
ModelId parse_model_id(const std::string& s);

struct S2Params {
  double m = 1.0;       // kg
  double l = 1.0;       // m
  double g = 9.81;      // m/s^2
  double kq = 1.0;
  double komega = 1.0;
  UnitVector qd = UnitVector::e3();

  void validate() const;
};

struct SO3Params {
  Mat3 J = Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal();  // kg m^2
  Vec3 rho = Vec3(0.0, 0.0, 0.5);                         // m, body frame
  double m = 1.0;
  double g = 9.81;
  Mat3 G = Eigen::Vector3d(0.9, 1.0, 1.1).asDiagonal();
  double kR = 1.0;
  double kOmega = 1.0;
  Rotation Rd = Rotation::identity();

  void validate() const;
};

struct StateDerivS2 {
  Vec3 q_dot;
  Vec3 omega_dot;
};

/// R_dot = R hat(Omega); Omega is carried as the attitude generator.
struct StateDerivSO3 {
  Vec3 Omega;
  Vec3 Omega_dot;
  Mat3 R_dot;
};

/// u = m l^2 (-kw w - kq qd x q - (g/l) q x e3), in N m.
Vec3 s2_control_moment(const TangentStateS2& s, const S2Params& p);

/// Closed-loop moment per unit m l^2: -kw w - kq qd x q.
Vec3 s2_closed_loop_moment(const Vec3& q, const Vec3& omega, const S2Params& p);

StateDerivS2 s2_vector_field(const TangentStateS2& s, const S2Params& p);

/// u = -kR e_R - kW W - m g rho x R^T e3
Vec3 so3_control_moment(const TangentStateSO3& s, const SO3Params& p);

/// Net closed-loop moment with gravity cancelled analytically: -kR e_R - kW W.
Vec3 so3_closed_loop_moment(const Rotation& R, const Vec3& Omega, const SO3Params& p);

StateDerivSO3 so3_vector_field(const TangentStateSO3& s, const SO3Params& p);

double lyapunov_s2(const TangentStateS2& s, const S2Params& p);
double lyapunov_so3(const TangentStateSO3& s, const SO3Params& p);

/// [(qd,0), (-qd,0)]: hanging then inverted.
std::vector<TangentStateS2> equilibria(const S2Params& p);

/// [(Rd,0), (Rd exp(pi e_i),0) for i = 1,2,3].
std::vector<TangentStateSO3> equilibria(const SO3Params& p);

/// "hanging" | "inverted"
TangentStateS2 s2_equilibrium(const S2Params& p, const std::string& name);

/// "identity" | "e1" | "e2" | "e3"; index 0..3 in equilibria() order.
int so3_equilibrium_index(const std::string& name);
TangentStateSO3 so3_equilibrium(const SO3Params& p, int index);

}  // namespace attman
