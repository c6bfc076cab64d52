#include "attman/integrators.hpp"

#include <cmath>
#include <exception>

#include "attman/errors.hpp"

namespace attman {

void StepSpec::validate(const S2Params& p) const {
  if (!(h > 0.0) || !std::isfinite(h)) throw BadParams("time step h must be positive");
  if (!(h * p.komega < 2.0)) throw BadParams("time step too large: need h * komega < 2");
  if (!(newton_tol >= 1e-15)) throw BadParams("newton_tol must be >= 1e-15");
  if (newton_max_iters < 1) throw BadParams("newton_max_iters must be positive");
}

void StepSpec::validate(const SO3Params& p) const {
  if (!(h > 0.0) || !std::isfinite(h)) throw BadParams("time step h must be positive");
  if (!(0.5 * h * p.kOmega < p.J.diagonal().minCoeff())) {
    throw BadParams("time step too large: need h * kOmega / 2 < min J_i");
  }
  if (!(newton_tol >= 1e-15)) throw BadParams("newton_tol must be >= 1e-15");
  if (newton_max_iters < 1) throw BadParams("newton_max_iters must be positive");
}

MomentumState to_momentum(const TangentStateSO3& s, const SO3Params& p) {
  return {s.R, p.J * s.Omega};
}

TangentStateSO3 to_tangent(const MomentumState& s, const SO3Params& p) {
  return {s.R, p.J.diagonal().cwiseInverse().cwiseProduct(s.Pi)};
}

// ---------------------------------------------------------------------------
// S^2

TangentStateS2 s2_step_backward(const TangentStateS2& next, const StepSpec& spec,
                                const S2Params& p) {
  const double h = spec.h;
  const Vec3& q1 = next.q.vec();
  const Vec3& w1 = next.omega;
  const Vec3 f = h * w1 - 0.5 * h * h * s2_closed_loop_moment(q1, w1, p);
  const double f2 = f.squaredNorm();
  if (!(f2 < 1.0)) throw StepTooLarge("S^2 backward step: |f| >= 1");
  // sqrt(1 - |f|^2) - 1, without cancellation
  const double cm1 = -f2 / (1.0 + std::sqrt(1.0 - f2));
  const Vec3 q0 = q1 + (cm1 * q1 - f.cross(q1));
  const Vec3 w0 = ((1.0 + 0.5 * h * p.komega) * w1 + 0.5 * h * p.kq * p.qd.vec().cross(q0 + q1)) /
                  (1.0 - 0.5 * h * p.komega);
  return {UnitVector(q0), w0};
}

TangentStateS2 s2_step_forward(const TangentStateS2& s, const StepSpec& spec, const S2Params& p) {
  const double h = spec.h;
  const Vec3& q0 = s.q.vec();
  const Vec3& w0 = s.omega;
  const Vec3 m0 = s2_closed_loop_moment(q0, w0, p);
  const Vec3 f = h * w0 + 0.5 * h * h * m0;
  const double f2 = f.squaredNorm();
  if (!(f2 < 1.0)) throw StepTooLarge("S^2 forward step: |f| >= 1");
  const double cm1 = -f2 / (1.0 + std::sqrt(1.0 - f2));
  const Vec3 q1 = q0 + (f.cross(q0) + cm1 * q0);
  const Vec3 w1 = (w0 + 0.5 * h * m0 - 0.5 * h * p.kq * p.qd.vec().cross(q1)) /
                  (1.0 + 0.5 * h * p.komega);
  return {UnitVector(q1), w1};
}

TangentStateS2 s2_step(const TangentStateS2& s, const StepSpec& spec, const S2Params& p) {
  return spec.direction == Direction::Forward ? s2_step_forward(s, spec, p)
                                              : s2_step_backward(s, spec, p);
}

// ---------------------------------------------------------------------------
// SO(3)

Mat3 nonstandard_inertia(const Mat3& J) { return 0.5 * J.trace() * Mat3::Identity() - J; }

RelativeRotation so3_solve_relative_rotation(const Vec3& a, const Mat3& j_d, const Vec3& f0,
                                             double tol, int max_iters) {
  const double target = tol * std::max(1.0, a.norm());
  Vec3 f = f0;
  for (int iter = 0;; ++iter) {
    const Rotation F = exp_rot(f);
    const Mat3& Fm = F.mat();
    const Vec3 r = vee_skew(j_d * Fm - Fm.transpose() * j_d) - a;
    const double rn = r.norm();
    if (rn <= target) return {F, iter, rn};
    if (iter >= max_iters || !std::isfinite(rn)) {
      throw NewtonDiverged("relative rotation solve: residual " + std::to_string(rn) + " after " +
                           std::to_string(iter) + " iterations");
    }
    const Mat3 A = Fm.transpose() * j_d;
    const Mat3 jac = (A.trace() * Mat3::Identity() - A) * right_jacobian(f);
    f -= jac.fullPivLu().solve(r);
  }
}

RelativeRotation so3_solve_relative_rotation(const Vec3& a, const Mat3& j_d, double tol,
                                             int max_iters) {
  const Mat3 J = j_d.trace() * Mat3::Identity() - j_d;
  return so3_solve_relative_rotation(a, j_d, J.fullPivLu().solve(a), tol, max_iters);
}

MomentumState so3_step_backward(const MomentumState& next, const StepSpec& spec,
                                const SO3Params& p) {
  const double h = spec.h;
  const Vec3 jinv = p.J.diagonal().cwiseInverse();
  const Vec3 m1 = so3_closed_loop_moment(next.R, jinv.cwiseProduct(next.Pi), p);
  const Vec3 z = next.Pi - 0.5 * h * m1;
  const Mat3 Fm = so3_solve_relative_rotation(h * z, nonstandard_inertia(p.J),
                                              h * jinv.cwiseProduct(z), spec.newton_tol,
                                              spec.newton_max_iters)
                      .F.mat();
  const Rotation R0(next.R.mat() * Fm.transpose());
  const Vec3 rhs = Fm * z + 0.5 * h * p.kR * attitude_error_vector(R0, p.Rd, p.G);
  const Vec3 diag = Vec3::Ones() - 0.5 * h * p.kOmega * jinv;
  return {R0, rhs.cwiseQuotient(diag)};
}

MomentumState so3_step_forward(const MomentumState& s, const StepSpec& spec, const SO3Params& p) {
  const double h = spec.h;
  const Vec3 jinv = p.J.diagonal().cwiseInverse();
  const Vec3 m0 = so3_closed_loop_moment(s.R, jinv.cwiseProduct(s.Pi), p);
  const Vec3 y = s.Pi + 0.5 * h * m0;
  // F J_d - J_d F^T = h y^  <=>  (J_d G - G^T J_d)^vee = -h y with G = F^T.
  const Mat3 Fm = so3_solve_relative_rotation(-h * y, nonstandard_inertia(p.J),
                                              -h * jinv.cwiseProduct(y), spec.newton_tol,
                                              spec.newton_max_iters)
                      .F.mat()
                      .transpose();
  const Rotation R1(s.R.mat() * Fm);
  const Vec3 rhs = Fm.transpose() * y - 0.5 * h * p.kR * attitude_error_vector(R1, p.Rd, p.G);
  const Vec3 diag = Vec3::Ones() + 0.5 * h * p.kOmega * jinv;
  return {R1, rhs.cwiseQuotient(diag)};
}

MomentumState so3_step(const MomentumState& s, const StepSpec& spec, const SO3Params& p) {
  return spec.direction == Direction::Forward ? so3_step_forward(s, spec, p)
                                              : so3_step_backward(s, spec, p);
}

// ---------------------------------------------------------------------------
// Whole trajectories

long steps_for_duration(double T, double h) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw BadParams("duration T must be non-negative");
  if (!(h > 0.0)) throw BadParams("time step h must be positive");
  const double n = std::round(T / h);
  if (std::abs(n * h - T) > 1e-12 * std::max(1.0, T)) {
    throw BadParams("duration T must be an integer multiple of h");
  }
  return static_cast<long>(n);
}

namespace {

template <class State, class Params, class Stepper>
FlowResult<State> run_flow(const State& s, double T, const StepSpec& spec, const Params& p,
                           long stride, Stepper step) {
  spec.validate(p);
  if (stride < 1) throw BadParams("stride must be positive");
  const long n = steps_for_duration(T, spec.h);
  const double sign = spec.direction == Direction::Forward ? 1.0 : -1.0;

  FlowResult<State> out;
  auto& traj = out.trajectory;
  const auto reserve = static_cast<std::size_t>(n / stride + 2);
  traj.t.reserve(reserve);
  traj.states.reserve(reserve);
  traj.t.push_back(0.0);
  traj.states.push_back(s);

  State cur = s;
  for (long k = 1; k <= n; ++k) {
    try {
      cur = step(cur, spec, p);
    } catch (const Error& e) {
      out.failure = StepFailure{k, e.what(), std::current_exception()};
      return out;
    }
    if (k % stride == 0 || k == n) {
      traj.t.push_back(sign * static_cast<double>(k) * spec.h);
      traj.states.push_back(cur);
    }
  }
  return out;
}

template <class State>
Trajectory<State> unwrap(FlowResult<State>&& r) {
  if (!r.failure) return std::move(r.trajectory);
  const std::string msg =
      "step " + std::to_string(r.failure->step) + ": " + r.failure->message;
  try {
    std::rethrow_exception(r.failure->error);
  } catch (const StepTooLarge&) {
    throw StepTooLarge(msg);
  } catch (const NewtonDiverged&) {
    throw NewtonDiverged(msg);
  } catch (const InvalidState&) {
    throw InvalidState(msg);
  } catch (const Error&) {
    throw Error(msg);
  }
  throw Error(msg);
}

}  // namespace

FlowResult<TangentStateS2> flow_until_failure(const TangentStateS2& s, double T,
                                              const StepSpec& spec, const S2Params& p,
                                              long stride) {
  return run_flow(s, T, spec, p, stride, s2_step);
}

FlowResult<MomentumState> flow_until_failure(const MomentumState& s, double T,
                                             const StepSpec& spec, const SO3Params& p,
                                             long stride) {
  return run_flow(s, T, spec, p, stride, so3_step);
}

Trajectory<TangentStateS2> flow(const TangentStateS2& s, double T, const StepSpec& spec,
                                const S2Params& p, long stride) {
  return unwrap(flow_until_failure(s, T, spec, p, stride));
}

Trajectory<MomentumState> flow(const MomentumState& s, double T, const StepSpec& spec,
                               const SO3Params& p, long stride) {
  return unwrap(flow_until_failure(s, T, spec, p, stride));
}

}  // namespace attman
