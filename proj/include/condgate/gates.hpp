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

// Single-pulse CNOT, PHASE and SWAP schedules, the end-to-end gate runner and
// the repetition calculus for computations that abort on any emission.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "condgate/dfs.hpp"
#include "condgate/dynamics.hpp"
#include "condgate/hamiltonian.hpp"
#include "condgate/hilbert.hpp"

namespace condgate {

enum class GateKind { cnot, phase, swap };

inline const char* to_string(GateKind k) {
  switch (k) {
    case GateKind::cnot: return "cnot";
    case GateKind::phase: return "phase";
    case GateKind::swap: return "swap";
  }
  return "?";
}

inline GateKind parse_gate_kind(const std::string& s) {
  if (s == "cnot" || s == "CNOT") return GateKind::cnot;
  if (s == "phase" || s == "PHASE") return GateKind::phase;
  if (s == "swap" || s == "SWAP") return GateKind::swap;
  throw std::invalid_argument("unknown gate kind '" + s + "'");
}

/// Unitary on span{|00>, |01>, |10>, |11>} in that order.
using QubitUnitary = Eigen::Matrix4cd;

/// Canonical index of qubit state q (0..3, bits a1 a2).
inline int qubit_index(int q) { return 3 * (q >> 1) + (q & 1); }

struct GateSpec {
  GateKind kind = GateKind::phase;
  double omega = 0.0;
  std::array<std::array<Complex, 2>, 2> rabi{};
  double duration = 0.0;
  QubitUnitary target = QubitUnitary::Identity();
};

inline GateSpec gate_schedule(GateKind kind, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw std::invalid_argument("Rabi frequency must be > 0");
  GateSpec spec;
  spec.kind = kind;
  spec.omega = omega;
  QubitUnitary u = QubitUnitary::Zero();
  switch (kind) {
    case GateKind::cnot:
      spec.rabi[0][1] = omega;  // 1-2 transition of atom 1
      spec.rabi[1][0] = omega;  // 0-2 transition of atom 2
      spec.duration = 2.0 * std::numbers::pi / omega;
      u(0, 0) = u(1, 1) = 1.0;
      u(2, 3) = u(3, 2) = 1.0;
      break;
    case GateKind::phase:
      spec.rabi[0][0] = omega;
      spec.duration = 2.0 * std::numbers::sqrt2 * std::numbers::pi / omega;
      u.diagonal() << 1.0, -1.0, 1.0, 1.0;
      break;
    case GateKind::swap:
      spec.rabi[0][0] = omega;
      spec.rabi[1][0] = omega;
      spec.duration = 2.0 * std::numbers::pi / omega;
      u(0, 0) = u(3, 3) = 1.0;
      u(1, 2) = u(2, 1) = 1.0;
      break;
  }
  spec.target = u;
  return spec;
}

inline SystemParams apply_schedule(SystemParams p, const GateSpec& spec) {
  p.rabi = spec.rabi;
  return p;
}

/// Lifts a qubit unitary to the full space, identity outside the qubit block.
inline OperatorMatrix embed_qubit_operator(const QubitUnitary& u, int n_max) {
  const int d = dimension(n_max);
  Matrix m = Matrix::Identity(d, d);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(qubit_index(r), qubit_index(c)) = u(r, c);
  }
  return {std::move(m), n_max, Hermiticity::unknown};
}

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct EffectiveGateReport {
  Eigen::Matrix<Complex, 5, 5> dfs_unitary;  // exp(-i H_eff T) on (00, 01, 10, 11, a)
  QubitUnitary qubit_block;
  double deviation = 0.0;    // max |qubit_block - e^{i phi} target|
  double max_leakage = 0.0;  // largest |a> population from a qubit input
};

namespace detail {

inline Eigen::Matrix<Complex, 5, 5> effective_dfs_unitary(const GateSpec& spec, double duration) {
  SystemParams p;
  p.n_max = 1;
  p.rabi = spec.rabi;
  const OperatorMatrix h = build_h_cond(p);
  const DfsBasis basis = analytic_dfs(p.n_max);
  const OperatorMatrix heff = effective_hamiltonian(h, dfs_projector(basis));
  Matrix b(h.dim(), 5);
  for (int k = 0; k < 5; ++k) b.col(k) = basis.vectors[k].amplitudes();
  const Matrix restricted = b.adjoint() * heff.entries() * b;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (restricted + restricted.adjoint()));
  const Eigen::VectorXcd phases =
      (-kI * duration * es.eigenvalues().cast<Complex>()).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace detail

/// Exponentiates the projected Hamiltonian over the scheduled duration and
/// compares the qubit block with the target up to a global phase.
inline EffectiveGateReport effective_gate_check(const GateSpec& spec, double tol = 1e-8) {
  EffectiveGateReport r;
  r.dfs_unitary = detail::effective_dfs_unitary(spec, spec.duration);
  r.qubit_block = r.dfs_unitary.topLeftCorner<4, 4>();
  const Complex tr = (spec.target.adjoint() * r.qubit_block).trace();
  const Complex phase = std::abs(tr) > 0.0 ? tr / std::abs(tr) : Complex{1.0};
  r.deviation = detail::max_abs(r.qubit_block - phase * spec.target);
  for (int q = 0; q < 4; ++q) r.max_leakage = std::max(r.max_leakage, std::norm(r.dfs_unitary(4, q)));
  if (r.deviation > tol) {
    throw ContractViolation(std::string("effective evolution of ") + to_string(spec.kind) +
                            " deviates from its target by " + std::to_string(r.deviation));
  }
  return r;
}

struct GateOptions {
  PropagationOptions propagation{};
  bool damp = true;
  double damping_threshold = 1e-8;
};

struct GateResult {
  double p0 = 0.0;        // no-photon probability over pulse and transition window
  double p0_pulse = 0.0;  // ... over the pulse alone
  double fidelity = 0.0;
  /// Fidelity against exp(-i H_eff T) psi0 instead of the ideal gate.
  double fidelity_effective = 0.0;
  bool fidelity_defined = false;
  StateVector final_state;
  double transition_time = 0.0;
  double duration = 0.0;
};

namespace detail {

inline GateResult finish_gate(const GateSpec& spec, const SystemParams& driven, const StateVector& psi0,
                              const StateVector& after_pulse, double duration, const GateOptions& opts) {
  GateResult r;
  r.duration = duration;
  r.p0_pulse = after_pulse.norm_squared();
  DampingResult damped = opts.damp ? damp_transition(after_pulse, driven, opts.damping_threshold)
                                   : DampingResult{after_pulse, 0.0};
  r.transition_time = damped.transition_time;
  r.final_state = std::move(damped.state);

  const FidelityResult f = conditional_fidelity(psi0, embed_qubit_operator(spec.target, psi0.n_max()), r.final_state);
  r.p0 = f.p0;
  r.fidelity = f.fidelity;
  r.fidelity_defined = f.defined;

  if (f.defined) {
    const auto u5 = effective_dfs_unitary(spec, duration);
    const Matrix b = [&] {
      const DfsBasis basis = analytic_dfs(psi0.n_max());
      Matrix m(psi0.dim(), 5);
      for (int k = 0; k < 5; ++k) m.col(k) = basis.vectors[k].amplitudes();
      return m;
    }();
    const Vector ideal = b * (u5 * (b.adjoint() * psi0.amplitudes()));
    r.fidelity_effective = std::clamp(std::norm(ideal.dot(r.final_state.amplitudes())) / r.p0, 0.0, 1.0);
  }
  return r;
}

}  // namespace detail

inline void require_qubit_input(const StateVector& psi0) {
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("gate input must be normalised");
  double qubit = 0.0;
  for (int q = 0; q < 4; ++q) qubit += std::norm(psi0.amplitudes()(qubit_index(q)));
  if (std::abs(qubit - 1.0) > 1e-10) {
    throw std::invalid_argument("gate input must lie in the qubit subspace with the cavity empty");
  }
}

/// Pulse, transition damping and fidelity evaluation for one input.
inline GateResult run_gate(const GateSpec& spec, const SystemParams& p, const StateVector& psi0,
                           const GateOptions& opts = {}) {
  p.validate();
  if (psi0.n_max() != p.n_max) throw std::invalid_argument("input truncation differs from params");
  require_qubit_input(psi0);
  const SystemParams driven = apply_schedule(p, spec);
  const StateVector after = evolve(build_h_cond(driven), psi0, spec.duration, opts.propagation);
  return detail::finish_gate(spec, driven, psi0, after, spec.duration, opts);
}

enum class QubitInput { s00, s01, s10, s11, plus, bell };

inline const char* to_string(QubitInput in) {
  switch (in) {
    case QubitInput::s00: return "00";
    case QubitInput::s01: return "01";
    case QubitInput::s10: return "10";
    case QubitInput::s11: return "11";
    case QubitInput::plus: return "plus";
    case QubitInput::bell: return "bell";
  }
  return "?";
}

inline QubitInput parse_qubit_input(const std::string& s) {
  for (QubitInput in : {QubitInput::s00, QubitInput::s01, QubitInput::s10, QubitInput::s11, QubitInput::plus,
                        QubitInput::bell}) {
    if (s == to_string(in)) return in;
  }
  throw std::invalid_argument("unknown qubit input '" + s + "'");
}

inline bool is_basis_input(QubitInput in) { return in != QubitInput::plus && in != QubitInput::bell; }

/// "plus" is the uniform superposition of the four qubit states; it carries
/// the relative phases that single basis inputs cannot see. "bell" is
/// (|00> + |11>)/sqrt2.
inline StateVector qubit_input_state(QubitInput in, int n_max) {
  switch (in) {
    case QubitInput::s00: return StateVector::basis({0, 0, 0}, n_max);
    case QubitInput::s01: return StateVector::basis({0, 0, 1}, n_max);
    case QubitInput::s10: return StateVector::basis({0, 1, 0}, n_max);
    case QubitInput::s11: return StateVector::basis({0, 1, 1}, n_max);
    case QubitInput::plus:
      return make_state({{{0, 0, 0}, 1.0}, {{0, 0, 1}, 1.0}, {{0, 1, 0}, 1.0}, {{0, 1, 1}, 1.0}}, n_max);
    case QubitInput::bell: return make_state({{{0, 0, 0}, 1.0}, {{0, 1, 1}, 1.0}}, n_max);
  }
  throw std::invalid_argument("unknown qubit input");
}

inline const std::vector<QubitInput>& default_inputs() {
  static const std::vector<QubitInput> inputs{QubitInput::s00, QubitInput::s01, QubitInput::s10, QubitInput::s11,
                                              QubitInput::plus};
  return inputs;
}

struct InputResult {
  QubitInput input;
  GateResult result;
};

struct RunReport {
  GateSpec spec;
  std::vector<InputResult> results;
  double worst_p0 = 1.0;        // over basis inputs
  double worst_fidelity = 1.0;  // over every input
  bool duration_tuned = false;

  const GateResult& at(QubitInput in) const {
    for (const auto& r : results) {
      if (r.input == in) return r.result;
    }
    throw std::out_of_range(std::string("input ") + to_string(in) + " not in report");
  }
};

struct ReportOptions {
  GateOptions gate{};
  /// Search T in [T0, (1 + stretch) T0] for the best worst-case fidelity.
  bool tune_duration = false;
  double max_duration_stretch = 0.1;
};

namespace detail {

inline RunReport run_report_at(const GateSpec& spec, const SystemParams& p, double duration,
                               const std::vector<QubitInput>& inputs, const GateOptions& opts) {
  const SystemParams driven = apply_schedule(p, spec);
  const OperatorMatrix h = build_h_cond(driven);
  const int d = h.dim();
  Matrix block(d, static_cast<Eigen::Index>(inputs.size()));
  std::vector<StateVector> initial;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    initial.push_back(qubit_input_state(inputs[k], p.n_max));
    block.col(static_cast<Eigen::Index>(k)) = initial.back().amplitudes();
  }
  ConditionalPropagator stepper(h, opts.propagation);
  stepper.advance(block, duration);

  RunReport report;
  report.spec = spec;
  report.spec.duration = duration;
  bool any_basis = false;
  for (QubitInput in : inputs) any_basis = any_basis || is_basis_input(in);
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const StateVector after(block.col(static_cast<Eigen::Index>(k)), p.n_max);
    GateResult r = finish_gate(spec, driven, initial[k], after, duration, opts);
    if (is_basis_input(inputs[k]) || !any_basis) report.worst_p0 = std::min(report.worst_p0, r.p0);
    report.worst_fidelity = std::min(report.worst_fidelity, r.fidelity_defined ? r.fidelity : 0.0);
    report.results.push_back({inputs[k], std::move(r)});
  }
  return report;
}

}  // namespace detail

/// Runs the gate on every requested input. The pulse is integrated for all
/// inputs at once; damping and scoring are per input.
inline RunReport run_report(const GateSpec& spec, const SystemParams& p, const ReportOptions& opts = {},
                            const std::vector<QubitInput>& inputs = default_inputs()) {
  p.validate();
  if (inputs.empty()) throw std::invalid_argument("run_report needs at least one input");
  if (!opts.tune_duration) return detail::run_report_at(spec, p, spec.duration, inputs, opts.gate);

  // Golden-section search on the pulse length.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = spec.duration, b = spec.duration * (1.0 + opts.max_duration_stretch);
  auto score = [&](double t) { return detail::run_report_at(spec, p, t, inputs, opts.gate); };
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  RunReport r1 = score(x1), r2 = score(x2);
  while (b - a > 1e-4 * spec.duration) {
    if (r1.worst_fidelity >= r2.worst_fidelity) {
      b = x2;
      x2 = x1;
      r2 = std::move(r1);
      x1 = b - phi * (b - a);
      r1 = score(x1);
    } else {
      a = x1;
      x1 = x2;
      r1 = std::move(r2);
      x2 = a + phi * (b - a);
      r2 = score(x2);
    }
  }
  RunReport best = r1.worst_fidelity >= r2.worst_fidelity ? std::move(r1) : std::move(r2);
  RunReport untuned = score(spec.duration);
  if (untuned.worst_fidelity >= best.worst_fidelity) return untuned;
  best.duration_tuned = true;
  return best;
}

/// Probability that at least one of M runs of an N-gate computation is
/// emission-free: 1 - (1 - P0^N)^M, evaluated in log space.
inline double repetition_success(double p0, long n_gates, long runs) {
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw std::invalid_argument("P0 must lie in [0, 1]");
  if (n_gates < 1 || runs < 1) throw std::invalid_argument("N and M must be >= 1");
  if (p0 == 0.0) return 0.0;
  if (p0 == 1.0) return 1.0;
  const double all_gates_ok = std::exp(double(n_gates) * std::log(p0));
  const double log_all_runs_fail = double(runs) * std::log1p(-all_gates_ok);
  return -std::expm1(log_all_runs_fail);
}

}  // namespace condgate
