#include "attman/manifold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "attman/errors.hpp"
#include "attman/spectral.hpp"

namespace attman {

namespace {

void require_radius(double delta) {
  if (!(delta > 0.0 && delta <= 0.1)) throw BadRadius("delta must lie in (0, 0.1]");
}

// Rotation taking e3 to qd; exactly the identity for qd = e3.
Mat3 frame_for(const UnitVector& qd) {
  const Vec3& d = qd.vec();
  if (d == Vec3::UnitZ()) return Mat3::Identity();
  const Vec3 axis = Vec3::UnitZ().cross(d);
  const double s = axis.norm();
  const double angle = std::atan2(s, d.z());
  if (s < 1e-15) return exp_rot(std::numbers::pi * Vec3::UnitX()).mat();
  return exp_rot(axis / s * angle).mat();
}

template <class Fn>
void for_each_index(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

template <class Bundle, class Ball>
void init_bundle(Bundle& b, const Ball& ball, double T, const StepSpec& spec, long stride) {
  b.equilibrium_name = ball.equilibrium_name;
  b.delta = ball.delta;
  b.h = spec.h;
  b.stride = stride;
  const long n = steps_for_duration(T, spec.h);
  for (long k = 0; k <= n; k += stride) b.t.push_back(static_cast<double>(k) * spec.h);
  if (n % stride != 0) b.t.push_back(static_cast<double>(n) * spec.h);
  b.tracks.resize(ball.seeds.size());
  b.failures.resize(ball.seeds.size());
}

template <class State>
const State& stored_state(const std::vector<std::vector<State>>& tracks, std::size_t seed,
                          std::size_t idx) {
  if (seed >= tracks.size()) throw BadParams("seed index out of range");
  if (idx >= tracks[seed].size()) throw TimeNotStored("seed failed before the requested time");
  return tracks[seed][idx];
}

}  // namespace

// ---------------------------------------------------------------------------
// Seeds

double s2_inverted_stable_rate(const S2Params& p) {
  return -0.5 * (p.komega + std::sqrt(p.komega * p.komega + 4.0 * p.kq));
}

TangentStateS2 s2_seed(const S2Params& p, double delta, double theta) {
  const double lambda = s2_inverted_stable_rate(p);
  const double kappa = delta / (1.0 / std::numbers::sqrt2 + std::abs(lambda));
  const Vec3 alpha = frame_for(p.qd) * Vec3(kappa * std::cos(theta), kappa * std::sin(theta), 0.0);
  const UnitVector q(exp_rot(alpha) * (-p.qd.vec()));
  return {q, tangent_project(q, lambda * alpha)};
}

SeedBallS2 build_seed_ball_s2(const S2Params& p, double delta, int n) {
  require_radius(delta);
  if (n < 4) throw BadParams("S^2 seed ball needs at least 4 points");
  SeedBallS2 ball{"inverted", s2_equilibrium(p, "inverted"), delta, {}, {}};
  for (int j = 0; j < n; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / n;
    ball.seeds.push_back(s2_seed(p, delta, theta));
    ball.coordinates.push_back(Eigen::VectorXd::Constant(1, theta));
  }
  return ball;
}

TangentStateSO3 StableParameterization::point(const Eigen::VectorXd& alpha) const {
  Vec3 rot = Vec3::Zero();
  Vec3 omega = Vec3::Zero();
  for (int m = 0; m < dimension(); ++m) {
    rot += alpha(m) * eta[m];
    omega += alpha(m) * dOmega[m];
  }
  return {equilibrium.R * exp_rot(rot), omega};
}

StableParameterization so3_stable_parameterization(const SO3Params& p, int index) {
  const TangentStateSO3 eq = so3_equilibrium(p, index);
  const SubspaceBasis sub = stable_subspace(eigen_decompose(a_matrix_so3(eq, p).A));
  StableParameterization sp{eq, {}, {}, {}};
  for (std::size_t m = 0; m < sub.basis.size(); ++m) {
    sp.eta.push_back(sub.basis[m].head<3>());
    sp.dOmega.push_back(sub.basis[m].tail<3>());
    sp.eigenvalues.push_back(sub.eigenvalues[m].real());
  }
  return sp;
}

TangentStateSO3 so3_seed_along(const StableParameterization& sp, const Eigen::VectorXd& u,
                               double delta, const Mat3& G) {
  require_radius(delta);
  const Eigen::VectorXd dir = u / u.norm();
  auto dist_at = [&](double s) { return dist_tso3(sp.point(s * dir), sp.equilibrium, G); };

  double lo = 0.0;
  double hi = delta;
  for (int i = 0; i < 200 && dist_at(hi) < delta; ++i) hi *= 2.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (dist_at(mid) < delta ? lo : hi) = mid;
    if (hi - lo <= 1e-14 * hi) break;
  }
  const double s = 0.5 * (lo + hi);
  if (std::abs(dist_at(s) - delta) > 1e-3 * delta) {
    throw BadRadius("could not place seed at the requested distance");
  }
  return sp.point(s * dir);
}

std::vector<Eigen::VectorXd> sphere_points(int dim, int n) {
  if (dim < 1 || n < 1) throw BadParams("sphere_points needs dim >= 1 and n >= 1");
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(n));
  if (dim == 1) {
    for (int j = 0; j < n; ++j) pts.push_back(Eigen::VectorXd::Constant(1, j % 2 == 0 ? 1.0 : -1.0));
    return pts;
  }
  if (dim == 2) {
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * j / n;
      pts.push_back(Eigen::Vector2d(std::cos(th), std::sin(th)));
    }
    return pts;
  }
  if (dim == 3) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int j = 0; j < n; ++j) {
      const double z = 1.0 - (2.0 * j + 1.0) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double ph = golden_angle * j;
      pts.push_back(Eigen::Vector3d(r * std::cos(ph), r * std::sin(ph), z));
    }
    return pts;
  }

  // Additive recurrence with the generalized golden ratio (x^(D+1) = x + 1)
  // in D = 2 ceil(dim/2) uniforms, mapped to Gaussians pairwise.
  const int D = 2 * ((dim + 1) / 2);
  double phi = 2.0;
  for (int i = 0; i < 64; ++i) phi = std::pow(1.0 + phi, 1.0 / (D + 1));
  Eigen::VectorXd step(D);
  for (int k = 0; k < D; ++k) step(k) = std::pow(1.0 / phi, k + 1);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd g(D);
    for (int k = 0; k < D; k += 2) {
      const double u1 = std::max(std::fmod(0.5 + (j + 1) * step(k), 1.0), 1e-300);
      const double u2 = std::fmod(0.5 + (j + 1) * step(k + 1), 1.0);
      const double r = std::sqrt(-2.0 * std::log(u1));
      g(k) = r * std::cos(2.0 * std::numbers::pi * u2);
      g(k + 1) = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    Eigen::VectorXd v = g.head(dim);
    pts.push_back(v / v.norm());
  }
  return pts;
}

SeedBallSO3 build_seed_ball_so3(int index, const SO3Params& p, double delta, int n) {
  require_radius(delta);
  if (index < 1 || index > 3) throw BadParams("SO(3) saddle index must be 1, 2 or 3");
  const StableParameterization sp = so3_stable_parameterization(p, index);
  if (n < 2 * sp.dimension()) {
    throw BadParams("SO(3) seed ball needs at least " + std::to_string(2 * sp.dimension()) +
                    " points");
  }
  static const char* names[] = {"identity", "e1", "e2", "e3"};
  SeedBallSO3 ball{names[index], sp.equilibrium, delta, {}, {}};
  for (const Eigen::VectorXd& u : sphere_points(sp.dimension(), n)) {
    ball.seeds.push_back(so3_seed_along(sp, u, delta, p.G));
    ball.coordinates.push_back(u);
  }
  return ball;
}

// ---------------------------------------------------------------------------
// Globalization

template <class State, class Params>
std::size_t ManifoldBundle<State, Params>::time_index(double time) const {
  const auto it = std::lower_bound(t.begin(), t.end(), time - 1e-9);
  if (it == t.end() || std::abs(*it - time) > 1e-9) {
    throw TimeNotStored("t = " + std::to_string(time) + " is not on the stored grid");
  }
  return static_cast<std::size_t>(it - t.begin());
}

template struct ManifoldBundle<TangentStateS2, S2Params>;
template struct ManifoldBundle<TangentStateSO3, SO3Params>;

S2Bundle globalize(const SeedBallS2& ball, double T, const StepSpec& spec, const S2Params& p,
                   const GlobalizeOptions& opt) {
  StepSpec back = spec;
  back.direction = Direction::Backward;
  back.validate(p);
  S2Bundle b;
  b.model = ModelId::S2;
  b.equilibrium = ball.equilibrium;
  b.params = p;
  init_bundle(b, ball, T, back, opt.stride);
  for_each_index(ball.seeds.size(), opt.workers, [&](std::size_t i) {
    auto r = flow_until_failure(ball.seeds[i], T, back, p, opt.stride);
    b.tracks[i] = std::move(r.trajectory.states);
    b.failures[i] = std::move(r.failure);
  });
  return b;
}

SO3Bundle globalize(const SeedBallSO3& ball, double T, const StepSpec& spec, const SO3Params& p,
                    const GlobalizeOptions& opt) {
  StepSpec back = spec;
  back.direction = Direction::Backward;
  back.validate(p);
  SO3Bundle b;
  b.model = ModelId::SO3;
  b.equilibrium = ball.equilibrium;
  b.params = p;
  init_bundle(b, ball, T, back, opt.stride);
  for_each_index(ball.seeds.size(), opt.workers, [&](std::size_t i) {
    auto r = flow_until_failure(to_momentum(ball.seeds[i], p), T, back, p, opt.stride);
    auto& track = b.tracks[i];
    track.reserve(r.trajectory.states.size());
    for (const MomentumState& m : r.trajectory.states) track.push_back(to_tangent(m, p));
    b.failures[i] = std::move(r.failure);
  });
  return b;
}

namespace {

template <class State, class Bundle, class Speed>
SliceStats<State> slice_impl(const Bundle& b, double t, Speed speed) {
  const std::size_t idx = b.time_index(t);
  SliceStats<State> out;
  out.t = b.t[idx];
  for (std::size_t i = 0; i < b.tracks.size(); ++i) {
    if (b.failures[i] || idx >= b.tracks[i].size()) {
      out.states.emplace_back(std::nullopt);
      continue;
    }
    const State& s = b.tracks[i][idx];
    out.states.emplace_back(s);
    out.max_speed = std::max(out.max_speed, speed(s));
  }
  return out;
}

}  // namespace

SliceStats<TangentStateS2> slice_stats(const S2Bundle& b, double t) {
  return slice_impl<TangentStateS2>(b, t, [](const TangentStateS2& s) { return s.omega.norm(); });
}

SliceStats<TangentStateSO3> slice_stats(const SO3Bundle& b, double t) {
  return slice_impl<TangentStateSO3>(b, t,
                                     [](const TangentStateSO3& s) { return s.Omega.norm(); });
}

double validate_forward(const S2Bundle& b, std::size_t seed, double t, const StepSpec& spec,
                        const S2Params& p) {
  const TangentStateS2& start = stored_state(b.tracks, seed, b.time_index(t));
  StepSpec fwd = spec;
  fwd.direction = Direction::Forward;
  const auto traj = flow(start, b.t[b.time_index(t)], fwd, p, std::max<long>(1, steps_for_duration(t, fwd.h)));
  return dist_ts2(traj.states.back(), b.equilibrium);
}

double validate_forward(const SO3Bundle& b, std::size_t seed, double t, const StepSpec& spec,
                        const SO3Params& p) {
  const TangentStateSO3& start = stored_state(b.tracks, seed, b.time_index(t));
  StepSpec fwd = spec;
  fwd.direction = Direction::Forward;
  const auto traj = flow(to_momentum(start, p), b.t[b.time_index(t)], fwd, p,
                         std::max<long>(1, steps_for_duration(t, fwd.h)));
  return dist_tso3(to_tangent(traj.states.back(), p), b.equilibrium, p.G);
}

// ---------------------------------------------------------------------------
// Diagnostics

GreatCircleDefect great_circle_defect(const std::vector<TangentStateS2>& track) {
  GreatCircleDefect d;
  if (track.empty()) return d;
  const Vec3 n0 = track.front().omega.normalized();
  for (const TangentStateS2& s : track) {
    const double speed = s.omega.norm();
    if (speed > 0.0) {
      // Direction is defined up to sign only while w passes through zero.
      const Vec3 n = s.omega / speed;
      d.direction = std::max(d.direction, std::min((n - n0).norm(), (n + n0).norm()));
    }
    d.plane = std::max(d.plane, std::abs(s.q.vec().dot(n0)));
  }
  return d;
}

double arc_length(const std::vector<TangentStateS2>& track) {
  double total = 0.0;
  for (std::size_t k = 1; k < track.size(); ++k) {
    const Vec3& a = track[k - 1].q.vec();
    const Vec3& c = track[k].q.vec();
    total += std::atan2(a.cross(c).norm(), a.dot(c));
  }
  return total;
}

}  // namespace attman
