// Copyright 2026 The condgate Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Decoherence-free subspace of H_cond, obtained either in closed form or
// from the real-eigenvalue part of a biorthogonal eigendecomposition, plus
// the Zeno projector and the projected Hamiltonian P H_cond P.

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "condgate/hamiltonian.hpp"
#include "condgate/hilbert.hpp"

namespace condgate {

/// Thrown when H is defective or its eigenbasis is too ill-conditioned to
/// build a reciprocal basis. Callers fall back to analytic_dfs.
class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectralDecomposition {
  OperatorMatrix source;
  std::vector<Complex> eigenvalues;
  std::vector<StateVector> right;       // |lambda_k>
  std::vector<StateVector> reciprocal;  // |lambda^k>, <lambda^k|lambda_j> = delta_jk
  double condition_number = 1.0;
  double reconstruction_residual = 0.0;
  double biorthogonality_residual = 0.0;

  std::size_t size() const { return eigenvalues.size(); }
};

enum class DfsProvenance { analytic, spectral };

struct DfsBasis {
  std::vector<StateVector> vectors;
  DfsProvenance provenance = DfsProvenance::analytic;
  int n_max = 0;

  std::size_t dim() const { return vectors.size(); }
};

namespace detail {

inline Matrix null_space(const Matrix& a, double tol) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol * scale) ++rank;
  }
  return svd.matrixV().rightCols(a.cols() - rank);
}

// Modified Gram-Schmidt; drops vectors that are linearly dependent on the
// ones already accepted.
inline std::vector<Vector> orthonormalize(const std::vector<Vector>& in, double tol) {
  std::vector<Vector> out;
  for (Vector v : in) {
    const double original = v.norm();
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& q : out) v -= q.dot(v) * q;
    }
    const double nrm = v.norm();
    if (original > 0.0 && nrm > tol * original) out.push_back(v / nrm);
  }
  return out;
}

}  // namespace detail

/// The Gamma = 0 cavity-decay DFS: the four qubit states and |0;a>, all with
/// the cavity in vacuum.
inline DfsBasis analytic_dfs(int n_max) {
  if (n_max < 1) throw std::invalid_argument("analytic_dfs needs n_max >= 1");
  DfsBasis basis{{}, DfsProvenance::analytic, n_max};
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) basis.vectors.push_back(StateVector::basis({0, a1, a2}, n_max));
  }
  basis.vectors.push_back(singlet_triplet(n_max).antisymmetric);
  return basis;
}

/// Eigendecomposition H = sum_k lambda_k |lambda_k><lambda^k|.
///
/// Degenerate eigenvalue clusters are re-spanned by an orthonormal basis of
/// ker(H - lambda) so that semisimple degeneracies (the DFS itself) do not
/// produce nearly parallel eigenvectors. A cluster whose kernel is smaller
/// than its algebraic multiplicity is defective and raises SpectralError.
inline SpectralDecomposition spectral_decompose(const OperatorMatrix& h, double tol = 1e-8,
                                                double max_condition = 1e10) {
  const Matrix& a = h.entries();
  const int d = h.dim();
  Eigen::ComplexEigenSolver<Matrix> solver(a, true);
  if (solver.info() != Eigen::Success) throw SpectralError("eigensolver did not converge");

  Eigen::VectorXcd lambda = solver.eigenvalues();
  Matrix v = solver.eigenvectors();
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double cluster_tol = 1e-9 * scale;

  std::vector<bool> done(d, false);
  for (int i = 0; i < d; ++i) {
    if (done[i]) continue;
    std::vector<int> members{i};
    for (int j = i + 1; j < d; ++j) {
      if (!done[j] && std::abs(lambda(j) - lambda(i)) < cluster_tol) members.push_back(j);
    }
    for (int m : members) done[m] = true;
    if (members.size() == 1) continue;

    Complex mean = 0.0;
    for (int m : members) mean += lambda(m);
    mean /= double(members.size());
    const Matrix kernel =
        detail::null_space(a - mean * Matrix::Identity(d, d), 1e-9);
    if (kernel.cols() < static_cast<Eigen::Index>(members.size())) {
      throw SpectralError("defective eigenvalue cluster near " + std::to_string(mean.real()) + " + " +
                          std::to_string(mean.imag()) + "i: geometric multiplicity " +
                          std::to_string(kernel.cols()) + " < " + std::to_string(members.size()));
    }
    for (std::size_t k = 0; k < members.size(); ++k) {
      v.col(members[k]) = kernel.col(static_cast<Eigen::Index>(k));
      lambda(members[k]) = mean;
    }
  }
  for (int k = 0; k < d; ++k) v.col(k).normalize();

  Eigen::JacobiSVD<Matrix> svd(v);
  const auto& sv = svd.singularValues();
  const double cond = sv(d - 1) > 0.0 ? sv(0) / sv(d - 1) : std::numeric_limits<double>::infinity();
  if (!(cond < max_condition)) {
    throw SpectralError("eigenbasis condition number " + std::to_string(cond) + " exceeds " +
                        std::to_string(max_condition));
  }
  const Matrix w = v.inverse();  // row k is <lambda^k|

  SpectralDecomposition out;
  out.source = h;
  out.condition_number = cond;
  for (int k = 0; k < d; ++k) {
    out.eigenvalues.push_back(lambda(k));
    out.right.emplace_back(v.col(k), h.n_max());
    out.reciprocal.emplace_back(w.row(k).adjoint(), h.n_max());
  }
  out.reconstruction_residual = (v * lambda.asDiagonal() * w - a).norm() / scale;
  out.biorthogonality_residual = (w * v - Matrix::Identity(d, d)).norm();
  if (out.reconstruction_residual > tol || out.biorthogonality_residual > tol * cond) {
    throw SpectralError("spectral reconstruction residual " + std::to_string(out.reconstruction_residual) +
                        " above tolerance");
  }
  return out;
}

/// Eigenvectors with |Im lambda| < tol * g_scale, orthonormalised. An empty
/// result is a valid outcome.
inline DfsBasis dfs_from_spectrum(const SpectralDecomposition& d, double tol = 1e-8, double g_scale = 1.0) {
  std::vector<Vector> selected;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (std::abs(d.eigenvalues[k].imag()) < tol * g_scale) selected.push_back(d.right[k].amplitudes());
  }
  DfsBasis basis{{}, DfsProvenance::spectral, d.source.n_max()};
  for (Vector& q : detail::orthonormalize(selected, 1e-8)) basis.vectors.emplace_back(std::move(q), basis.n_max);
  return basis;
}

inline OperatorMatrix dfs_projector(const DfsBasis& basis) {
  const int d = dimension(basis.n_max);
  Matrix p = Matrix::Zero(d, d);
  for (const StateVector& v : basis.vectors) p += v.amplitudes() * v.amplitudes().adjoint();
  return {std::move(p), basis.n_max, Hermiticity::hermitian};
}

/// H_eff = P H_cond P.
inline OperatorMatrix effective_hamiltonian(const OperatorMatrix& h_cond, const OperatorMatrix& projector) {
  if (h_cond.dim() != projector.dim()) throw std::invalid_argument("projector and Hamiltonian dimensions differ");
  Matrix h = projector.entries() * h_cond.entries() * projector.entries();
  const bool herm = (h - h.adjoint()).norm() <= 1e-12 * std::max(1.0, h.norm());
  return {std::move(h), h_cond.n_max(), herm ? Hermiticity::hermitian : Hermiticity::non_hermitian};
}

struct ZenoReport {
  double max_decay_factor = 0.0;  // max |exp(-i lambda dt)| over non-real lambda
  double residual = 0.0;          // ||U_cond(dt) - U_dfs(dt)||_2
  std::size_t dfs_dimension = 0;
  bool satisfied = false;
};

/// Checks how well U_cond(dt) is approximated by its restriction to the
/// real-eigenvalue part of the spectrum.
inline ZenoReport zeno_condition_check(const SpectralDecomposition& d, double dt, double tol = 1e-6,
                                       double real_tol = 1e-8) {
  const int dim = d.source.dim();
  Matrix leak = Matrix::Zero(dim, dim);
  ZenoReport r;
  for (std::size_t k = 0; k < d.size(); ++k) {
    const Complex lam = d.eigenvalues[k];
    if (std::abs(lam.imag()) < real_tol) {
      ++r.dfs_dimension;
      continue;
    }
    const Complex factor = std::exp(-kI * lam * dt);
    r.max_decay_factor = std::max(r.max_decay_factor, std::abs(factor));
    leak += factor * d.right[k].amplitudes() * d.reciprocal[k].amplitudes().adjoint();
  }
  if (r.dfs_dimension < d.size()) {
    Eigen::JacobiSVD<Matrix> svd(leak);
    r.residual = svd.singularValues()(0);
  }
  r.satisfied = r.residual < tol;
  return r;
}

}  // namespace condgate
