#pragma once
// Test-only oracles, independent of the production integrators and solvers.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include "attman/linearization.hpp"
#include "attman/models.hpp"

namespace oracle {

using attman::Mat3;
using attman::Vec3;
using attman::Vec6;

// --- adaptive reference integrator -------------------------------------------

/// Classical RK4 with step doubling and Richardson extrapolation. `rhs` is
/// evaluated on a flat state; `project` pulls the state back onto the
/// manifold after each accepted step.
template <int N>
Eigen::Matrix<double, N, 1> rk4_adaptive(
    Eigen::Matrix<double, N, 1> y, double T,
    const std::function<Eigen::Matrix<double, N, 1>(const Eigen::Matrix<double, N, 1>&)>& rhs,
    const std::function<void(Eigen::Matrix<double, N, 1>&)>& project, double tol = 1e-13) {
  using V = Eigen::Matrix<double, N, 1>;
  const double dir = T < 0 ? -1.0 : 1.0;
  double remaining = std::abs(T);
  double dt = std::min(remaining, 1e-3);
  auto rk4 = [&](const V& x, double h) {
    const V k1 = rhs(x);
    const V k2 = rhs(x + 0.5 * h * k1);
    const V k3 = rhs(x + 0.5 * h * k2);
    const V k4 = rhs(x + h * k3);
    return V(x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  while (remaining > 0.0) {
    dt = std::min(dt, remaining);
    const double h = dir * dt;
    const V big = rk4(y, h);
    const V half = rk4(rk4(y, 0.5 * h), 0.5 * h);
    const double err = (half - big).norm() / 15.0;
    if (err <= tol * std::max(1.0, y.norm()) || dt < 1e-9) {
      y = half + (half - big) / 15.0;
      project(y);
      remaining -= dt;
      dt *= std::clamp(0.9 * std::pow(tol / std::max(err, 1e-300), 0.2), 0.2, 4.0);
    } else {
      dt *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.1, 0.9);
    }
  }
  return y;
}

inline attman::TangentStateS2 reference_s2(const attman::TangentStateS2& s, double T,
                                           const attman::S2Params& p) {
  using V = Eigen::Matrix<double, 6, 1>;
  V y;
  y << s.q.vec(), s.omega;
  auto rhs = [&](const V& x) {
    const Vec3 q = x.head<3>(), w = x.tail<3>();
    V d;
    d << w.cross(q), -p.komega * w - p.kq * p.qd.vec().cross(q);
    return d;
  };
  auto project = [](V& x) {
    x.head<3>().normalize();
    const Vec3 q = x.head<3>();
    x.tail<3>() -= q * q.dot(x.tail<3>());
  };
  const V out = rk4_adaptive<6>(y, T, rhs, project);
  return {attman::UnitVector(Vec3(out.head<3>())), Vec3(out.tail<3>())};
}

inline attman::TangentStateSO3 reference_so3(const attman::TangentStateSO3& s, double T,
                                             const attman::SO3Params& p) {
  using V = Eigen::Matrix<double, 12, 1>;
  V y;
  y.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(s.R.mat().data());
  y.tail<3>() = s.Omega;
  auto unpack = [](const V& x) { return Mat3(Eigen::Map<const Mat3>(x.data())); };
  auto rhs = [&](const V& x) {
    const Mat3 R = unpack(x);
    const Vec3 W = x.tail<3>();
    // e_R = 1/2 (G Rd^T R - R^T Rd G)^vee, written out without the library.
    const Mat3 X = p.G * p.Rd.mat().transpose() * R;
    const Mat3 S = 0.5 * (X - X.transpose());
    const Vec3 eR(S(2, 1), S(0, 2), S(1, 0));
    const Vec3 JW = p.J * W;
    const Vec3 Wdot = p.J.inverse() * (-W.cross(JW) - p.kR * eR - p.kOmega * W);
    Mat3 What;
    What << 0, -W.z(), W.y(), W.z(), 0, -W.x(), -W.y(), W.x(), 0;
    const Mat3 Rdot = R * What;
    V d;
    d.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(Rdot.data());
    d.tail<3>() = Wdot;
    return d;
  };
  auto project = [&](V& x) {
    Eigen::JacobiSVD<Mat3> svd(unpack(x), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    x.head<9>() = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(R.data());
  };
  const V out = rk4_adaptive<12>(y, T, rhs, project);
  return {attman::Rotation(unpack(out)), Vec3(out.tail<3>())};
}

// --- per-axis eigenvalue oracle ----------------------------------------------

/// Roots of lambda^2 + (kW/J_i) lambda + kR H_i / (2 J_i) for each axis, with
/// H = tr[X] I - X and X = R^T Rd G diagonal at the equilibria.
inline std::vector<std::complex<double>> quadratic_roots(const Mat3& R, const attman::SO3Params& p) {
  const Mat3 X = R.transpose() * p.Rd.mat() * p.G;
  std::vector<std::complex<double>> out;
  for (int i = 0; i < 3; ++i) {
    const double Ji = p.J(i, i);
    const double Hi = X.trace() - X(i, i);
    const double b = p.kOmega / Ji, c = p.kR * Hi / (2.0 * Ji);
    const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * c, 0.0));
    out.push_back((-b + disc) / 2.0);
    out.push_back((-b - disc) / 2.0);
  }
  auto key = [](std::complex<double> a, std::complex<double> b) {
    if (std::abs(a.real() - b.real()) > 1e-9) return a.real() < b.real();
    return a.imag() < b.imag();
  };
  std::sort(out.begin(), out.end(), key);
  return out;
}

// --- finite-difference linearization oracle ------------------------------------

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

inline Mat3 rodrigues(const Vec3& v) {
  const double th = v.norm();
  if (th < 1e-12) return Mat3::Identity() + skew(v);
  const Mat3 K = skew(v / th);
  return Mat3::Identity() + std::sin(th) * K + (1.0 - std::cos(th)) * K * K;
}

/// Time derivative of x = [xi; dw] along the linearized S^2 flow, obtained
/// by central differences of the nonlinear vector field under
/// q -> exp(e hat(xi)) q, w -> w + e dw. Requires xi . q = 0.
inline Vec6 fd_xdot_s2(const Vec3& q, const Vec3& w, const Vec6& x, const attman::S2Params& p,
                       double eps = 1e-6) {
  const Vec3 xi = x.head<3>(), dw = x.tail<3>();
  auto field = [&](double e) {
    const Vec3 qe = rodrigues(e * xi) * q;
    const Vec3 we = w + e * dw;
    Vec6 f;
    f << we.cross(qe), -p.komega * we - p.kq * p.qd.vec().cross(qe);
    return f;
  };
  const Vec6 d = (field(eps) - field(-eps)) / (2.0 * eps);
  const Vec3 qdot = w.cross(q);
  // xi_dot x q = d(q_dot) - xi x q_dot, and xi_dot . q = -xi . q_dot.
  const Vec3 rhs = d.head<3>() - xi.cross(qdot);
  const Vec3 xi_dot = q.cross(rhs) - q * xi.dot(qdot);
  Vec6 out;
  out << xi_dot, d.tail<3>();
  return out;
}

/// Same for SO(3) under R -> R exp(e hat(eta)), W -> W + e dW.
inline Vec6 fd_xdot_so3(const Mat3& R, const Vec3& W, const Vec6& x, const attman::SO3Params& p,
                        double eps = 1e-6) {
  const Vec3 eta = x.head<3>(), dW = x.tail<3>();
  auto wdot = [&](const Mat3& Re, const Vec3& We) {
    const Mat3 X = p.G * p.Rd.mat().transpose() * Re;
    const Mat3 S = 0.5 * (X - X.transpose());
    const Vec3 eR(S(2, 1), S(0, 2), S(1, 0));
    return Vec3(p.J.inverse() * (-We.cross(p.J * We) - p.kR * eR - p.kOmega * We));
  };
  auto Rdot = [&](double e) {
    const Mat3 Re = R * rodrigues(e * eta);
    return Mat3(Re * skew(W + e * dW));
  };
  const Mat3 dRdot = (Rdot(eps) - Rdot(-eps)) / (2.0 * eps);
  const Mat3 eta_dot_hat = R.transpose() * dRdot - skew(W) * skew(eta);
  const Vec3 eta_dot(0.5 * (eta_dot_hat(2, 1) - eta_dot_hat(1, 2)),
                     0.5 * (eta_dot_hat(0, 2) - eta_dot_hat(2, 0)),
                     0.5 * (eta_dot_hat(1, 0) - eta_dot_hat(0, 1)));
  const Vec3 dWdot = (wdot(R * rodrigues(eps * eta), W + eps * dW) -
                      wdot(R * rodrigues(-eps * eta), W - eps * dW)) /
                     (2.0 * eps);
  Vec6 out;
  out << eta_dot, dWdot;
  return out;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Vec3(n(rng), n(rng), n(rng)).normalized();
}

}  // namespace oracle
