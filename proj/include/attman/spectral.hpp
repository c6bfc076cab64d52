#pragma once

// Eigen-structure of the 6x6 linearized systems: decomposition with a
// deterministic ordering and eigenvector normalization, equilibrium
// classification under the S^2 constraint, and real bases of stable
// eigenspaces and constraint null spaces.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "attman/linearization.hpp"

namespace attman {

using cplx = std::complex<double>;
using CVec6 = Eigen::Matrix<cplx, 6, 1>;

/// Eigenvalues sorted by (real part, imaginary part) ascending. Eigenvectors
/// have unit norm; within a repeated eigenvalue the basis is the reduced row
/// echelon form of the eigenspace, so e.g. a double eigenvalue with
/// eigenspace span{e1 + a e4, e2 + a e5} is reported exactly in that form.
struct EigenStructure {
  std::array<cplx, 6> eigenvalues;
  std::array<CVec6, 6> eigenvectors;
  std::array<double, 6> residuals;  ///< |A v - lambda v|
  double matrix_norm = 0.0;         ///< |A|_F
};

/// Throws NoConvergence if the QR iteration fails.
EigenStructure eigen_decompose(const Mat6& a);

/// Rescales v so its largest configuration-part entry (first three slots)
/// is exactly 1, giving the e_i + lambda e_{i+3} layout for decoupled modes.
/// Falls back to the largest entry overall when the configuration part is zero.
CVec6 mode_form(const CVec6& v);

enum class StabilityLabel { AsymptoticallyStable, StableFocus, Saddle, Unstable, CenterDegenerate };

std::string to_string(StabilityLabel label);

struct ClassifyOptions {
  double constraint_tol = 1e-8;  ///< on |C v| / |v|
  double center_tol = 1e-9;      ///< |Re lambda| below this is a center mode
  bool allow_center = false;     ///< otherwise center modes raise AmbiguousMode
};

struct Classification {
  int stable = 0;
  int unstable = 0;
  int center = 0;
  std::vector<int> retained;  ///< indices into EigenStructure after filtering
  StabilityLabel label = StabilityLabel::Saddle;
};

Classification classify_equilibrium(const EigenStructure& e,
                                     const std::optional<Mat26>& c = std::nullopt,
                                     const ClassifyOptions& opt = {});

struct SubspaceBasis {
  std::vector<Vec6> basis;
  std::vector<cplx> eigenvalues;  ///< one per basis vector
};

/// Real basis of the stable eigenspace (after constraint filtering when c is
/// given). Complex pairs contribute {Re v, Im v}. Vectors are in mode_form.
/// Throws EmptySubspace when there is no stable mode.
SubspaceBasis stable_subspace(const EigenStructure& e, const std::optional<Mat26>& c = std::nullopt,
                              const ClassifyOptions& opt = {});

/// Orthonormal basis of null(C), canonicalized through the reduced row
/// echelon form. Throws RankDeficient unless rank(C) = 2.
SubspaceBasis nullspace_basis(const Mat26& c);

/// Smallest singular value of the basis matrix with unit-normalized columns.
double min_singular_value(const SubspaceBasis& b);

}  // namespace attman
