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

// Composite Hilbert space of two three-level atoms and one truncated cavity
// mode. Basis states |n; a1 a2> are stored at index 9*n + 3*a1 + a2, so the
// four qubit states |0;00>, |0;01>, |0;10>, |0;11> sit at 0, 1, 3, 4.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <initializer_list>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace condgate {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr Complex kI{0.0, 1.0};

constexpr int levels_per_atom = 3;
constexpr int atomic_states = levels_per_atom * levels_per_atom;

inline int dimension(int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
  return atomic_states * (n_max + 1);
}

struct BasisLabel {
  int n = 0;
  int a1 = 0;
  int a2 = 0;

  friend bool operator==(const BasisLabel&, const BasisLabel&) = default;
};

inline bool is_valid(const BasisLabel& label, int n_max) {
  return label.n >= 0 && label.n <= n_max && label.a1 >= 0 && label.a1 < levels_per_atom &&
         label.a2 >= 0 && label.a2 < levels_per_atom;
}

inline int basis_index(const BasisLabel& label, int n_max) {
  if (!is_valid(label, n_max)) {
    throw std::invalid_argument("basis label |" + std::to_string(label.n) + ";" +
                                std::to_string(label.a1) + std::to_string(label.a2) +
                                "> outside truncation n_max=" + std::to_string(n_max));
  }
  return atomic_states * label.n + levels_per_atom * label.a1 + label.a2;
}

inline BasisLabel basis_label(int index, int n_max) {
  if (index < 0 || index >= dimension(n_max)) {
    throw std::invalid_argument("basis index " + std::to_string(index) + " out of range");
  }
  return {index / atomic_states, (index % atomic_states) / levels_per_atom, index % levels_per_atom};
}

/// Complex amplitudes over the canonical basis. The squared norm of a
/// conditionally evolved state is its no-photon probability, so states are
/// deliberately not renormalised after propagation.
class StateVector {
 public:
  StateVector() = default;
  StateVector(Vector amplitudes, int n_max) : amplitudes_(std::move(amplitudes)), n_max_(n_max) {
    if (amplitudes_.size() != dimension(n_max_)) {
      throw std::invalid_argument("state length does not match n_max");
    }
  }

  static StateVector zero(int n_max) { return {Vector::Zero(dimension(n_max)), n_max}; }

  static StateVector basis(const BasisLabel& label, int n_max) {
    StateVector s = zero(n_max);
    s.amplitudes_(basis_index(label, n_max)) = 1.0;
    return s;
  }

  const Vector& amplitudes() const { return amplitudes_; }
  Vector& amplitudes() { return amplitudes_; }
  int n_max() const { return n_max_; }
  int dim() const { return static_cast<int>(amplitudes_.size()); }

  Complex operator[](const BasisLabel& label) const { return amplitudes_(basis_index(label, n_max_)); }
  Complex& operator[](const BasisLabel& label) { return amplitudes_(basis_index(label, n_max_)); }

  double norm_squared() const { return amplitudes_.squaredNorm(); }
  double norm() const { return amplitudes_.norm(); }

  StateVector normalized() const {
    const double nrm = norm();
    if (nrm == 0.0) throw std::domain_error("cannot normalise the zero vector");
    return {amplitudes_ / nrm, n_max_};
  }

 private:
  Vector amplitudes_;
  int n_max_ = 0;
};

enum class Hermiticity { hermitian, non_hermitian, unknown };

/// Dense square operator on the composite space.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  OperatorMatrix(Matrix entries, int n_max, Hermiticity flag = Hermiticity::unknown)
      : entries_(std::move(entries)), n_max_(n_max), flag_(flag) {
    if (entries_.rows() != entries_.cols()) throw std::invalid_argument("operator must be square");
    if (entries_.rows() != dimension(n_max_)) {
      throw std::invalid_argument("operator dimension does not match n_max");
    }
  }

  static OperatorMatrix zero(int n_max) {
    const int d = dimension(n_max);
    return {Matrix::Zero(d, d), n_max, Hermiticity::hermitian};
  }

  const Matrix& entries() const { return entries_; }
  int n_max() const { return n_max_; }
  int dim() const { return static_cast<int>(entries_.rows()); }
  Hermiticity hermiticity() const { return flag_; }

  Complex operator()(const BasisLabel& row, const BasisLabel& col) const {
    return entries_(basis_index(row, n_max_), basis_index(col, n_max_));
  }

  /// Frobenius norm of H - H^dagger.
  double hermiticity_defect() const { return (entries_ - entries_.adjoint()).norm(); }

  StateVector apply(const StateVector& psi) const {
    if (psi.dim() != dim()) throw std::invalid_argument("dimension mismatch in operator apply");
    return {entries_ * psi.amplitudes(), n_max_};
  }

 private:
  Matrix entries_;
  int n_max_ = 0;
  Hermiticity flag_ = Hermiticity::unknown;
};

using StateTerm = std::pair<BasisLabel, Complex>;

inline StateVector make_state(std::span<const StateTerm> terms, int n_max) {
  StateVector s = StateVector::zero(n_max);
  for (const auto& [label, amplitude] : terms) s[label] += amplitude;
  if (s.norm() == 0.0) throw std::invalid_argument("make_state needs at least one nonzero amplitude");
  return s.normalized();
}

inline StateVector make_state(std::initializer_list<StateTerm> terms, int n_max) {
  return make_state(std::span<const StateTerm>(terms.begin(), terms.size()), n_max);
}

struct SingletTriplet {
  StateVector antisymmetric;  // |0;a> = (|0;12> - |0;21>)/sqrt2
  StateVector symmetric;      // |0;s> = (|0;12> + |0;21>)/sqrt2
};

inline SingletTriplet singlet_triplet(int n_max) {
  return {make_state({{{0, 1, 2}, 1.0}, {{0, 2, 1}, -1.0}}, n_max),
          make_state({{{0, 1, 2}, 1.0}, {{0, 2, 1}, 1.0}}, n_max)};
}

/// <psi|phi>, conjugate-linear in psi.
inline Complex overlap(const StateVector& psi, const StateVector& phi) {
  if (psi.dim() != phi.dim()) throw std::invalid_argument("overlap of states with different dimensions");
  return psi.amplitudes().dot(phi.amplitudes());
}

/// CSV rows: index,n,a1,a2,re,im in canonical order.
inline void write_state_csv(std::ostream& os, const StateVector& psi, bool header = true) {
  if (header) os << "index,n,a1,a2,re,im\n";
  const auto old_precision = os.precision(17);
  for (int i = 0; i < psi.dim(); ++i) {
    const BasisLabel l = basis_label(i, psi.n_max());
    const Complex c = psi.amplitudes()(i);
    os << i << ',' << l.n << ',' << l.a1 << ',' << l.a2 << ',' << c.real() << ',' << c.imag() << '\n';
  }
  os.precision(old_precision);
}

inline std::string label_string(const BasisLabel& l) {
  return "|" + std::to_string(l.n) + ";" + std::to_string(l.a1) + std::to_string(l.a2) + ">";
}

}  // namespace condgate
