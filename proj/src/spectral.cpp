#include "attman/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "attman/errors.hpp"

namespace attman {

namespace {

using CMat = Eigen::Matrix<cplx, Eigen::Dynamic, 6>;

// Reduced row echelon form with partial pivoting; rows spanning a subspace.
CMat rref(CMat m, double tol) {
  int lead_row = 0;
  for (int col = 0; col < 6 && lead_row < m.rows(); ++col) {
    Eigen::Index piv = lead_row;
    double best = 0.0;
    for (Eigen::Index r = lead_row; r < m.rows(); ++r) {
      if (std::abs(m(r, col)) > best) {
        best = std::abs(m(r, col));
        piv = r;
      }
    }
    if (best <= tol) continue;
    m.row(lead_row).swap(m.row(piv));
    m.row(lead_row) /= m(lead_row, col);
    m(lead_row, col) = 1.0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == lead_row) continue;
      const cplx f = m(r, col);
      m.row(r) -= f * m.row(lead_row);
      m(r, col) = 0.0;
    }
    ++lead_row;
  }
  return m;
}

// Unit norm, and the first entry that is not negligible made real positive.
CVec6 normalize_phase(CVec6 v) {
  v /= v.norm();
  const double vmax = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < 6; ++i) {
    if (std::abs(v(i)) > 1e-6 * vmax) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  }
  return v;
}

bool is_real(cplx z, double scale) { return std::abs(z.imag()) <= 1e-14 * std::max(1.0, scale); }

}  // namespace

std::string to_string(StabilityLabel label) {
  switch (label) {
    case StabilityLabel::AsymptoticallyStable: return "asymptotically-stable";
    case StabilityLabel::StableFocus: return "stable-focus";
    case StabilityLabel::Saddle: return "saddle";
    case StabilityLabel::Unstable: return "unstable";
    case StabilityLabel::CenterDegenerate: return "center-degenerate";
  }
  return "unknown";
}

EigenStructure eigen_decompose(const Mat6& a) {
  if (!a.allFinite()) throw NoConvergence("eigen_decompose: non-finite matrix entries");
  Eigen::EigenSolver<Mat6> solver;
  solver.setMaxIterations(100);
  solver.compute(a, true);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("eigen_decompose: QR iteration did not converge in 100 sweeps per eigenvalue");
  }
  const double scale = std::max(1.0, a.norm());
  const auto vals = solver.eigenvalues();
  const auto vecs = solver.eigenvectors();

  std::array<int, 6> order;
  std::iota(order.begin(), order.end(), 0);
  const double tie = 1e-9 * scale;
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    if (std::abs(vals(i).real() - vals(j).real()) > tie) return vals(i).real() < vals(j).real();
    return vals(i).imag() < vals(j).imag() - tie;
  });

  EigenStructure out;
  out.matrix_norm = a.norm();
  for (int k = 0; k < 6; ++k) {
    cplx lambda = vals(order[k]);
    if (is_real(lambda, scale)) lambda = {lambda.real(), 0.0};
    out.eigenvalues[k] = lambda;
    out.eigenvectors[k] = vecs.col(order[k]);
  }

  // Canonical basis inside clusters of repeated eigenvalues.
  const double cluster_tol = 1e-8 * scale;
  for (int start = 0; start < 6;) {
    int end = start + 1;
    while (end < 6 && std::abs(out.eigenvalues[end] - out.eigenvalues[start]) <= cluster_tol) ++end;
    if (end - start > 1) {
      CMat rows(end - start, 6);
      for (int k = start; k < end; ++k) rows.row(k - start) = normalize_phase(out.eigenvectors[k]).transpose();
      const CMat reduced = rref(rows, 1e-8);
      for (int k = start; k < end; ++k) {
        const CVec6 v = reduced.row(k - start).transpose();
        // A rank drop means a defective eigenvalue; keep the solver's vector.
        if (v.norm() > 1e-8) out.eigenvectors[k] = v;
      }
    }
    start = end;
  }

  for (int k = 0; k < 6; ++k) {
    CVec6 v = normalize_phase(out.eigenvectors[k]);
    if (out.eigenvalues[k].imag() == 0.0) v = v.real().cast<cplx>();
    v /= v.norm();
    out.eigenvectors[k] = v;
    out.residuals[k] = (a.cast<cplx>() * v - out.eigenvalues[k] * v).norm();
  }
  return out;
}

CVec6 mode_form(const CVec6& v) {
  Eigen::Index imax = 0;
  const double top = v.head<3>().cwiseAbs().maxCoeff(&imax);
  if (top > 1e-12 * v.norm()) {
    CVec6 out = v / v(imax);
    out(imax) = 1.0;
    return out;
  }
  v.cwiseAbs().maxCoeff(&imax);
  CVec6 out = v / v(imax);
  out(imax) = 1.0;
  return out;
}

Classification classify_equilibrium(const EigenStructure& e, const std::optional<Mat26>& c,
                                    const ClassifyOptions& opt) {
  Classification out;
  for (int k = 0; k < 6; ++k) {
    const CVec6& v = e.eigenvectors[k];
    if (c) {
      const double defect = (c->cast<cplx>() * v).norm() / v.norm();
      if (defect > opt.constraint_tol) continue;
    }
    out.retained.push_back(k);
    const double re = e.eigenvalues[k].real();
    if (std::abs(re) < opt.center_tol) {
      if (!opt.allow_center) {
        throw AmbiguousMode("eigenvalue with |Re| < " + std::to_string(opt.center_tol) +
                            " survives constraint filtering");
      }
      ++out.center;
    } else if (re < 0.0) {
      ++out.stable;
    } else {
      ++out.unstable;
    }
  }

  if (out.center > 0) {
    out.label = StabilityLabel::CenterDegenerate;
  } else if (out.unstable == 0) {
    // Focus: every mode oscillatory and no repeated eigenvalue.
    bool focus = !out.retained.empty();
    for (std::size_t a = 0; a < out.retained.size() && focus; ++a) {
      const cplx la = e.eigenvalues[out.retained[a]];
      if (la.imag() == 0.0) focus = false;
      for (std::size_t b = a + 1; b < out.retained.size() && focus; ++b) {
        if (std::abs(la - e.eigenvalues[out.retained[b]]) <= 1e-8 * std::max(1.0, e.matrix_norm)) {
          focus = false;
        }
      }
    }
    out.label = focus ? StabilityLabel::StableFocus : StabilityLabel::AsymptoticallyStable;
  } else if (out.stable == 0) {
    out.label = StabilityLabel::Unstable;
  } else {
    out.label = StabilityLabel::Saddle;
  }
  return out;
}

SubspaceBasis stable_subspace(const EigenStructure& e, const std::optional<Mat26>& c,
                              const ClassifyOptions& opt) {
  ClassifyOptions relaxed = opt;
  relaxed.allow_center = true;
  const Classification cls = classify_equilibrium(e, c, relaxed);

  SubspaceBasis out;
  for (int k : cls.retained) {
    const cplx lambda = e.eigenvalues[k];
    if (!(lambda.real() <= -opt.center_tol)) continue;
    if (lambda.imag() == 0.0) {
      out.basis.push_back(mode_form(e.eigenvectors[k]).real());
      out.eigenvalues.push_back(lambda);
    } else if (lambda.imag() > 0.0) {
      const CVec6 v = mode_form(e.eigenvectors[k]);
      out.basis.push_back(v.real());
      out.eigenvalues.push_back(lambda);
      out.basis.push_back(v.imag());
      out.eigenvalues.push_back(std::conj(lambda));
    }
  }
  if (out.basis.empty()) throw EmptySubspace("no stable modes");
  return out;
}

SubspaceBasis nullspace_basis(const Mat26& c) {
  Eigen::JacobiSVD<Mat26> svd(c, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (!(sv(1) > 1e-12 * std::max(1.0, sv(0)))) throw RankDeficient("constraint matrix rank < 2");

  CMat rows(4, 6);
  for (int k = 0; k < 4; ++k) rows.row(k) = svd.matrixV().col(2 + k).transpose().cast<cplx>();
  const CMat reduced = rref(rows, 1e-10);

  SubspaceBasis out;
  for (int k = 0; k < 4; ++k) {
    Vec6 v = reduced.row(k).transpose().real();
    for (const Vec6& u : out.basis) v -= u.dot(v) * u;
    for (const Vec6& u : out.basis) v -= u.dot(v) * u;
    out.basis.push_back(v.normalized());
    out.eigenvalues.push_back(0.0);
  }
  return out;
}

double min_singular_value(const SubspaceBasis& b) {
  Eigen::MatrixXd m(6, static_cast<Eigen::Index>(b.basis.size()));
  for (std::size_t k = 0; k < b.basis.size(); ++k) {
    m.col(static_cast<Eigen::Index>(k)) = b.basis[k].normalized();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().minCoeff();
}

}  // namespace attman
