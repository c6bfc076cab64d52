#pragma once

// Coordinate-free linearization. For S^2 the linear state is x = [xi; dw]
// with variations q -> exp(e hat(xi)) q, w -> w + e dw; for SO(3) it is
// x = [eta; dW] with R -> R exp(e hat(eta)), W -> W + e dW.

#include <optional>
#include <variant>

#include "attman/models.hpp"

namespace attman {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat26 = Eigen::Matrix<double, 2, 6>;

struct LinearizedSystem {
  Mat6 A;
  std::optional<Mat26> C;  ///< S^2 only
  std::variant<TangentStateS2, TangentStateSO3> base;
};

/// A = [[q q^T hat(w), I - q q^T], [kq hat(qd) hat(q), -kw I]], with C filled in.
LinearizedSystem a_matrix_s2(const TangentStateS2& s, const S2Params& p);

/// Rows [q^T, 0] and [-w^T hat(q), q^T]; admissible variations satisfy C x = 0.
Mat26 c_matrix_s2(const TangentStateS2& s);

/// A = [[-hat(W), I], [-kR/2 J^-1 H, J^-1 (hat(J W) - hat(W) J - kW I)]],
/// H = tr[R^T Rd G] I - R^T Rd G.
LinearizedSystem a_matrix_so3(const TangentStateSO3& s, const SO3Params& p);

/// The H matrix above; d e_R = H eta / 2.
Mat3 error_hessian_so3(const Rotation& R, const SO3Params& p);

}  // namespace attman
