#pragma once

// Stable manifolds of saddle equilibria, grown from a small ball in the
// stable eigenspace by the backward discrete flow.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "attman/integrators.hpp"

namespace attman {

template <class State>
struct SeedBall {
  std::string equilibrium_name;
  State equilibrium;
  double delta = 0.0;
  std::vector<State> seeds;
  /// theta for S^2; unit direction in stable-coordinate space for SO(3).
  std::vector<Eigen::VectorXd> coordinates;
};

using SeedBallS2 = SeedBall<TangentStateS2>;
using SeedBallSO3 = SeedBall<TangentStateSO3>;

// --- S^2, inverted equilibrium ---------------------------------------------

/// Stable eigenvalue of the inverted equilibrium, (-kw - sqrt(kw^2 + 4 kq)) / 2.
double s2_inverted_stable_rate(const S2Params& p);

/// Point of the delta-ball at angle theta. With qd = e3:
///   q = exp(hat(a)) (-e3),  w = (I - q q^T)(lambda a),
///   a = kappa (cos theta e1 + sin theta e2),  kappa = delta / (1/sqrt2 + |lambda|).
/// For another qd the frame (e1, e2, e3) is rotated onto (., ., qd).
TangentStateS2 s2_seed(const S2Params& p, double delta, double theta);

/// n seeds at theta_j = 2 pi j / n. Requires delta in (0, 0.1], n >= 4.
SeedBallS2 build_seed_ball_s2(const S2Params& p, double delta, int n);

// --- SO(3) saddles -----------------------------------------------------------

/// Local stable eigenspace of an SO(3) equilibrium:
///   R = R_eq exp(hat(sum_m a_m eta_m)),  W = sum_m a_m dW_m
/// where [eta_m; dW_m] are the stable eigenvectors in mode_form.
struct StableParameterization {
  TangentStateSO3 equilibrium;
  std::vector<Vec3> eta;
  std::vector<Vec3> dOmega;
  std::vector<double> eigenvalues;

  int dimension() const { return static_cast<int>(eta.size()); }
  TangentStateSO3 point(const Eigen::VectorXd& alpha) const;
};

/// index 1..3 selects the saddle R_d exp(pi e_i). Throws EmptySubspace when
/// the equilibrium has no real stable eigenspace to parameterize.
StableParameterization so3_stable_parameterization(const SO3Params& p, int index);

/// The point along unit direction u whose dist_tso3 to the equilibrium is
/// delta, found by bisection on the scale factor.
TangentStateSO3 so3_seed_along(const StableParameterization& sp, const Eigen::VectorXd& u,
                               double delta, const Mat3& G);

/// Deterministic points on the unit sphere S^{dim-1}: equally spaced angles
/// for dim 2, a spherical Fibonacci lattice for dim 3, and a Box-Muller
/// image of an additive-recurrence low-discrepancy sequence above that.
std::vector<Eigen::VectorXd> sphere_points(int dim, int n);

/// Requires delta in (0, 0.1] and n >= 2 * dimension.
SeedBallSO3 build_seed_ball_so3(int index, const SO3Params& p, double delta, int n);

// --- Globalization -------------------------------------------------------------

template <class State, class Params>
struct ManifoldBundle {
  ModelId model = ModelId::S2;
  std::string equilibrium_name;
  State equilibrium;
  Params params;
  double delta = 0.0;
  double h = 0.0;
  long stride = 1;
  std::vector<double> t;  ///< backward-time parameter, shared by every track
  std::vector<std::vector<State>> tracks;
  std::vector<std::optional<StepFailure>> failures;

  std::size_t seed_count() const { return tracks.size(); }
  /// Grid index of t (tolerance 1e-9); throws TimeNotStored.
  std::size_t time_index(double time) const;
};

using S2Bundle = ManifoldBundle<TangentStateS2, S2Params>;
using SO3Bundle = ManifoldBundle<TangentStateSO3, SO3Params>;

struct GlobalizeOptions {
  long stride = 1;
  unsigned workers = 0;  ///< 0: hardware concurrency
};

/// Integrates every seed backward for T. A failing seed keeps the states
/// computed before the failure and is annotated in failures.
S2Bundle globalize(const SeedBallS2& ball, double T, const StepSpec& spec, const S2Params& p,
                   const GlobalizeOptions& opt = {});
SO3Bundle globalize(const SeedBallSO3& ball, double T, const StepSpec& spec, const SO3Params& p,
                    const GlobalizeOptions& opt = {});

template <class State>
struct SliceStats {
  double t = 0.0;
  std::vector<std::optional<State>> states;  ///< nullopt for failed seeds
  double max_speed = 0.0;                    ///< rad/s, over non-failed seeds
};

SliceStats<TangentStateS2> slice_stats(const S2Bundle& b, double t);
SliceStats<TangentStateSO3> slice_stats(const SO3Bundle& b, double t);

/// Takes the stored state of a seed at backward time t, integrates it forward
/// for t and returns its distance to the equilibrium.
double validate_forward(const S2Bundle& b, std::size_t seed, double t, const StepSpec& spec,
                        const S2Params& p);
double validate_forward(const SO3Bundle& b, std::size_t seed, double t, const StepSpec& spec,
                        const SO3Params& p);

// --- Diagnostics ---------------------------------------------------------------

/// Largest deviation of w/|w| from its initial direction, and of q from the
/// plane normal to that direction, along an S^2 track.
struct GreatCircleDefect {
  double direction = 0.0;
  double plane = 0.0;
};
GreatCircleDefect great_circle_defect(const std::vector<TangentStateS2>& track);

/// Accumulated angle swept by q along a track (rad).
double arc_length(const std::vector<TangentStateS2>& track);

/// log(max_speed(t2) / max_speed(t1)) / (t2 - t1)
template <class Bundle>
double growth_rate(const Bundle& b, double t1, double t2) {
  return std::log(slice_stats(b, t2).max_speed / slice_stats(b, t1).max_speed) / (t2 - t1);
}

}  // namespace attman
