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

// Test-only reference routines, kept independent of the library's
// integrator and of Eigen's MatrixFunctions module.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>

#include "condgate/hamiltonian.hpp"

namespace condgate::testing {

/// exp(A) by scaling and squaring with a truncated Taylor series.
inline Matrix expm_oracle(const Matrix& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
  const Matrix scaled = a / std::pow(2.0, squarings);
  Matrix result = Matrix::Identity(a.rows(), a.cols());
  Matrix term = result;
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled / double(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

/// psi(T) = exp(-i H T) psi0.
inline Vector evolve_oracle(const Matrix& h, const Vector& psi0, double t) {
  return expm_oracle(Complex(0.0, -1.0) * t * h) * psi0;
}

inline SystemParams random_params(std::mt19937_64& rng, int n_max = 3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SystemParams p;
  p.g = 0.5 + u(rng);
  p.kappa = 2.0 * u(rng);
  p.gamma = 0.2 * u(rng);
  for (auto& atom : p.rabi) {
    for (auto& w : atom) w = Complex(u(rng) - 0.5, 0.0);
  }
  p.n_max = n_max;
  return p;
}

inline Vector random_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(n(rng), n(rng));
  return v;
}

}  // namespace condgate::testing
