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

// Conditional (no-photon) Hamiltonian of two Lambda atoms in a single-mode
// cavity, in the interaction picture with hbar = 1. All rates are in the
// same unit as g; the library never assumes g = 1 but the tools do.

#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "condgate/hilbert.hpp"

namespace condgate {

struct SystemParams {
  double g = 1.0;
  double kappa = 0.0;
  double gamma = 0.0;
  /// rabi[i][j] drives the j-2 transition of atom i+1.
  std::array<std::array<Complex, 2>, 2> rabi{};
  int n_max = 3;
  /// Ground level populated by atomic decay. Does not enter H_cond.
  int decay_target = 0;

  Complex& omega(int atom, int level) { return rabi.at(atom - 1).at(level); }
  Complex omega(int atom, int level) const { return rabi.at(atom - 1).at(level); }

  void validate() const {
    if (!(g >= 0.0) || !std::isfinite(g)) throw std::invalid_argument("g must be finite and >= 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be finite and >= 0");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite and >= 0");
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (decay_target != 0 && decay_target != 1) throw std::invalid_argument("decay_target must be 0 or 1");
  }

  SystemParams without_drive() const {
    SystemParams q = *this;
    q.rabi = {};
    return q;
  }

  SystemParams without_decay() const {
    SystemParams q = *this;
    q.kappa = 0.0;
    q.gamma = 0.0;
    return q;
  }
};

namespace ops {

/// Cavity annihilation operator b.
inline Matrix annihilation(int n_max) {
  const int d = dimension(n_max);
  Matrix b = Matrix::Zero(d, d);
  for (int n = 1; n <= n_max; ++n) {
    for (int a1 = 0; a1 < levels_per_atom; ++a1) {
      for (int a2 = 0; a2 < levels_per_atom; ++a2) {
        b(basis_index({n - 1, a1, a2}, n_max), basis_index({n, a1, a2}, n_max)) = std::sqrt(double(n));
      }
    }
  }
  return b;
}

/// |to><from| acting on atom 1 or 2.
inline Matrix atom_transition(int atom, int to, int from, int n_max) {
  if (atom != 1 && atom != 2) throw std::invalid_argument("atom index must be 1 or 2");
  const int d = dimension(n_max);
  Matrix m = Matrix::Zero(d, d);
  for (int n = 0; n <= n_max; ++n) {
    for (int other = 0; other < levels_per_atom; ++other) {
      const BasisLabel src = atom == 1 ? BasisLabel{n, from, other} : BasisLabel{n, other, from};
      const BasisLabel dst = atom == 1 ? BasisLabel{n, to, other} : BasisLabel{n, other, to};
      m(basis_index(dst, n_max), basis_index(src, n_max)) = 1.0;
    }
  }
  return m;
}

}  // namespace ops

namespace detail {

inline Matrix coherent_part(const SystemParams& p) {
  const int nm = p.n_max;
  const Matrix b = ops::annihilation(nm);
  const Matrix bdag = b.adjoint();
  const int d = dimension(nm);
  Matrix h = Matrix::Zero(d, d);
  for (int atom = 1; atom <= 2; ++atom) {
    h += kI * p.g * bdag * ops::atom_transition(atom, 1, 2, nm);
    for (int level = 0; level < 2; ++level) {
      h += 0.5 * p.omega(atom, level) * ops::atom_transition(atom, level, 2, nm);
    }
  }
  return h + h.adjoint().eval();
}

/// kappa b^dag b + gamma sum_i |2><2|_i, i.e. sum_c L_c^dag L_c.
inline Matrix decay_part(const SystemParams& p) {
  const int nm = p.n_max;
  const Matrix b = ops::annihilation(nm);
  Matrix gamma_total = p.kappa * (b.adjoint() * b);
  for (int atom = 1; atom <= 2; ++atom) gamma_total += p.gamma * ops::atom_transition(atom, 2, 2, nm);
  return gamma_total;
}

}  // namespace detail

/// H_cond = i g sum_i b^dag |1>_i<2| + sum_ij (Omega_j^(i)/2) |j>_i<2| + h.c.
///          - (i kappa/2) b^dag b - (i gamma/2) sum_i |2>_i<2|
inline OperatorMatrix build_h_cond(const SystemParams& p) {
  p.validate();
  Matrix h = detail::coherent_part(p) - 0.5 * kI * detail::decay_part(p);
  const Hermiticity flag = (p.kappa == 0.0 && p.gamma == 0.0) ? Hermiticity::hermitian : Hermiticity::non_hermitian;
  return {std::move(h), p.n_max, flag};
}

/// Decay-free counterpart of build_h_cond (all four lasers allowed).
inline OperatorMatrix build_h_coherent(const SystemParams& p) {
  p.validate();
  return {detail::coherent_part(p), p.n_max, Hermiticity::hermitian};
}

enum class DecayChannel { cavity = 0, atom1 = 1, atom2 = 2 };

inline const char* to_string(DecayChannel c) {
  switch (c) {
    case DecayChannel::cavity: return "cavity";
    case DecayChannel::atom1: return "atom1";
    case DecayChannel::atom2: return "atom2";
  }
  return "?";
}

struct JumpOperator {
  OperatorMatrix matrix;
  DecayChannel channel;
  double rate;
  int target_level;  // -1 for the cavity channel
};

/// sqrt(kappa) b and sqrt(gamma) |target><2|_i; zero-rate channels are omitted.
inline std::vector<JumpOperator> jump_operators(const SystemParams& p) {
  p.validate();
  std::vector<JumpOperator> out;
  if (p.kappa > 0.0) {
    out.push_back({OperatorMatrix(std::sqrt(p.kappa) * ops::annihilation(p.n_max), p.n_max, Hermiticity::non_hermitian),
                   DecayChannel::cavity, p.kappa, -1});
  }
  if (p.gamma > 0.0) {
    for (int atom = 1; atom <= 2; ++atom) {
      out.push_back({OperatorMatrix(std::sqrt(p.gamma) * ops::atom_transition(atom, p.decay_target, 2, p.n_max),
                                    p.n_max, Hermiticity::non_hermitian),
                     atom == 1 ? DecayChannel::atom1 : DecayChannel::atom2, p.gamma, p.decay_target});
    }
  }
  return out;
}

/// Parses a flat `key = value` document. Blank lines and `#` comments are
/// ignored; unknown keys are an error.
inline SystemParams read_params(std::istream& in, SystemParams base = {}) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(raw, &used);
      if (used != raw.size()) throw std::invalid_argument(raw);
    } catch (const std::exception&) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": bad number '" + raw + "'");
    }
    if (key == "g") base.g = value;
    else if (key == "kappa") base.kappa = value;
    else if (key == "gamma") base.gamma = value;
    else if (key == "omega_1_0") base.omega(1, 0) = value;
    else if (key == "omega_1_1") base.omega(1, 1) = value;
    else if (key == "omega_2_0") base.omega(2, 0) = value;
    else if (key == "omega_2_1") base.omega(2, 1) = value;
    else if (key == "n_max") base.n_max = static_cast<int>(value);
    else if (key == "decay_target") base.decay_target = static_cast<int>(value);
    else throw std::invalid_argument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
  base.validate();
  return base;
}

inline SystemParams read_params(const std::string& text, SystemParams base = {}) {
  std::istringstream in(text);
  return read_params(in, base);
}

/// Nonzero entries as row,col,re,im.
inline void write_matrix_csv(std::ostream& os, const OperatorMatrix& m, double drop_below = 0.0) {
  os << "row,col,re,im\n";
  const auto old_precision = os.precision(17);
  for (int r = 0; r < m.dim(); ++r) {
    for (int c = 0; c < m.dim(); ++c) {
      const Complex v = m.entries()(r, c);
      if (std::abs(v) > drop_below) os << r << ',' << c << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
  os.precision(old_precision);
}

}  // namespace condgate
