#include "attman/models.hpp"

#include <cmath>

#include "attman/errors.hpp"

namespace attman {

std::string to_string(ModelId id) { return id == ModelId::S2 ? "s2" : "so3"; }

ModelId parse_model_id(const std::string& s) {
  if (s == "s2") return ModelId::S2;
  if (s == "so3") return ModelId::SO3;
  throw BadParams("unknown model '" + s + "' (expected s2 or so3)");
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw BadParams(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void S2Params::validate() const {
  require_positive(m, "m");
  require_positive(l, "l");
  require_positive(g, "g");
  require_positive(kq, "kq");
  require_positive(komega, "komega");
}

void SO3Params::validate() const {
  require_diagonal_positive(J, "J");
  require_diagonal_positive(G, "G");
  require_positive(m, "m");
  require_positive(g, "g");
  require_positive(kR, "kR");
  require_positive(kOmega, "kOmega");
  if (!rho.allFinite()) throw BadParams("rho must be finite");
}

Vec3 s2_closed_loop_moment(const Vec3& q, const Vec3& omega, const S2Params& p) {
  return -p.komega * omega - p.kq * p.qd.vec().cross(q);
}

Vec3 s2_control_moment(const TangentStateS2& s, const S2Params& p) {
  const Vec3& q = s.q.vec();
  return p.m * p.l * p.l *
         (s2_closed_loop_moment(q, s.omega, p) - (p.g / p.l) * q.cross(Vec3::UnitZ()));
}

StateDerivS2 s2_vector_field(const TangentStateS2& s, const S2Params& p) {
  const Vec3& q = s.q.vec();
  return {s.omega.cross(q), s2_closed_loop_moment(q, s.omega, p)};
}

Vec3 so3_closed_loop_moment(const Rotation& R, const Vec3& Omega, const SO3Params& p) {
  return -p.kR * attitude_error_vector(R, p.Rd, p.G) - p.kOmega * Omega;
}

Vec3 so3_control_moment(const TangentStateSO3& s, const SO3Params& p) {
  const Vec3 gravity = p.m * p.g * p.rho.cross(s.R.mat().transpose() * Vec3::UnitZ());
  return so3_closed_loop_moment(s.R, s.Omega, p) - gravity;
}

StateDerivSO3 so3_vector_field(const TangentStateSO3& s, const SO3Params& p) {
  const Vec3 JW = p.J * s.Omega;
  const Vec3 rhs = -s.Omega.cross(JW) + so3_closed_loop_moment(s.R, s.Omega, p);
  return {s.Omega, p.J.diagonal().cwiseInverse().cwiseProduct(rhs), s.R.mat() * hat(s.Omega)};
}

double lyapunov_s2(const TangentStateS2& s, const S2Params& p) {
  return 0.5 * s.omega.squaredNorm() + p.kq * psi_s2(s.q, p.qd);
}

double lyapunov_so3(const TangentStateSO3& s, const SO3Params& p) {
  return 0.5 * s.Omega.dot(p.J * s.Omega) + p.kR * psi_so3(s.R, p.Rd, p.G);
}

std::vector<TangentStateS2> equilibria(const S2Params& p) {
  return {TangentStateS2(p.qd, Vec3::Zero()), TangentStateS2(-p.qd, Vec3::Zero())};
}

std::vector<TangentStateSO3> equilibria(const SO3Params& p) {
  std::vector<TangentStateSO3> out;
  out.emplace_back(p.Rd, Vec3::Zero());
  for (int i = 0; i < 3; ++i) {
    // exp(pi e_i) is exactly diag with +1 at i and -1 elsewhere.
    Mat3 flip = -Mat3::Identity();
    flip(i, i) = 1.0;
    out.emplace_back(p.Rd * Rotation(flip), Vec3::Zero());
  }
  return out;
}

TangentStateS2 s2_equilibrium(const S2Params& p, const std::string& name) {
  if (name == "hanging") return equilibria(p)[0];
  if (name == "inverted") return equilibria(p)[1];
  throw BadParams("unknown S^2 equilibrium '" + name + "' (expected hanging or inverted)");
}

int so3_equilibrium_index(const std::string& name) {
  if (name == "identity") return 0;
  if (name == "e1") return 1;
  if (name == "e2") return 2;
  if (name == "e3") return 3;
  throw BadParams("unknown SO(3) equilibrium '" + name + "' (expected identity, e1, e2 or e3)");
}

TangentStateSO3 so3_equilibrium(const SO3Params& p, int index) {
  if (index < 0 || index > 3) throw BadParams("SO(3) equilibrium index out of range");
  return equilibria(p)[static_cast<std::size_t>(index)];
}

}  // namespace attman
