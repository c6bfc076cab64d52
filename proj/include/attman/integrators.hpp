#pragma once

// Variational integrators for the closed-loop pendulums.
//
// S^2 (moments per unit m l^2, M = -kw w - kq qd x q):
//   q_{k+1} = f x q_k + sqrt(1 - |f|^2) q_k,   f = h w_k + h^2/2 M_k
//   w_{k+1} = w_k + h/2 (M_k + M_{k+1})
// The backward map uses f = h w_{k+1} - h^2/2 M_{k+1}, which is the same
// vector, so forward and backward steps are exact inverses. M is affine in w,
// so the implicit velocity update is a scalar division.
//
// SO(3) (Pi = J W, Jd = tr[J]/2 I - J):
//   h (Pi_{k+1} - h/2 M_{k+1})^ = Jd F_k - F_k^T Jd
//   R_k = R_{k+1} F_k^T
//   Pi_k = F_k Pi_{k+1} - h/2 F_k M_{k+1} - h/2 M_k
// F_k is found by Newton iteration on its exponential coordinates; Pi_k by a
// diagonal solve since M_k is affine in Pi_k.

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "attman/models.hpp"

namespace attman {

enum class Direction { Forward, Backward };

struct StepSpec {
  double h = 0.002;  // s
  Direction direction = Direction::Backward;
  double newton_tol = 1e-14;
  int newton_max_iters = 50;

  /// h > 0, h kw < 2, newton_tol >= 1e-15.
  void validate(const S2Params& p) const;
  /// h > 0, h kW / 2 < min J_i, newton_tol >= 1e-15.
  void validate(const SO3Params& p) const;
};

struct MomentumState {
  Rotation R;
  Vec3 Pi;  // kg m^2 / s
};

MomentumState to_momentum(const TangentStateSO3& s, const SO3Params& p);
TangentStateSO3 to_tangent(const MomentumState& s, const SO3Params& p);

/// Throws StepTooLarge when |h w_{k+1} - h^2/2 M_{k+1}| >= 1.
TangentStateS2 s2_step_backward(const TangentStateS2& next, const StepSpec& spec, const S2Params& p);
TangentStateS2 s2_step_forward(const TangentStateS2& s, const StepSpec& spec, const S2Params& p);

/// Dispatches on spec.direction.
TangentStateS2 s2_step(const TangentStateS2& s, const StepSpec& spec, const S2Params& p);

struct RelativeRotation {
  Rotation F;
  int iterations = 0;
  double residual = 0.0;
};

/// Jd = tr[J]/2 I - J
Mat3 nonstandard_inertia(const Mat3& J);

/// Solves (Jd F - F^T Jd)^vee = a for F = exp(f) by Newton's method from f0.
/// Converged when the residual is below tol * max(1, |a|).
/// Throws NewtonDiverged after max_iters updates.
RelativeRotation so3_solve_relative_rotation(const Vec3& a, const Mat3& j_d, const Vec3& f0,
                                             double tol = 1e-14, int max_iters = 50);

/// Same, starting from the leading-order solution f0 = J^-1 a with J = tr[Jd] I - Jd.
RelativeRotation so3_solve_relative_rotation(const Vec3& a, const Mat3& j_d, double tol = 1e-14,
                                             int max_iters = 50);

MomentumState so3_step_backward(const MomentumState& next, const StepSpec& spec, const SO3Params& p);
MomentumState so3_step_forward(const MomentumState& s, const StepSpec& spec, const SO3Params& p);
MomentumState so3_step(const MomentumState& s, const StepSpec& spec, const SO3Params& p);

template <class State>
struct Trajectory {
  std::vector<double> t;  ///< physical time; negative along backward runs
  std::vector<State> states;
};

struct StepFailure {
  long step = 0;  ///< 1-based index of the step that failed
  std::string message;
  std::exception_ptr error;
};

template <class State>
struct FlowResult {
  Trajectory<State> trajectory;
  std::optional<StepFailure> failure;
};

/// Number of steps N with |N h - T| <= 1e-12; throws BadParams otherwise.
long steps_for_duration(double T, double h);

/// Integrates for duration T >= 0 and records every stride-th state (the
/// initial and final states are always recorded). Stops at the first step
/// error and reports it instead of throwing.
FlowResult<TangentStateS2> flow_until_failure(const TangentStateS2& s, double T,
                                              const StepSpec& spec, const S2Params& p,
                                              long stride = 1);
FlowResult<MomentumState> flow_until_failure(const MomentumState& s, double T,
                                             const StepSpec& spec, const SO3Params& p,
                                             long stride = 1);

/// As flow_until_failure, but rethrows a step error with the failing step index.
Trajectory<TangentStateS2> flow(const TangentStateS2& s, double T, const StepSpec& spec,
                                const S2Params& p, long stride = 1);
Trajectory<MomentumState> flow(const MomentumState& s, double T, const StepSpec& spec,
                               const SO3Params& p, long stride = 1);

}  // namespace attman
