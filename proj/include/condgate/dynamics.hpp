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

// No-photon time evolution i d/dt psi = H_cond psi, the functionals built on
// it (success probability, conditional fidelity), the post-pulse damping
// window and the closed-form adiabatic solution of the PHASE scheme.

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "condgate/dfs.hpp"
#include "condgate/hamiltonian.hpp"
#include "condgate/hilbert.hpp"

namespace condgate {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DampingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PropagationOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-13;
  /// Output grid size of propagate(); does not affect the internal steps.
  int samples = 2000;
  /// Smallest admissible step relative to the integration span.
  double min_step_fraction = 1e-14;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

/// Adaptive Dormand-Prince integrator for d/dt Y = -i H Y, where the columns
/// of Y are independent states. The step size carries over between calls.
class ConditionalPropagator {
 public:
  ConditionalPropagator(const OperatorMatrix& h, PropagationOptions opts = {})
      : generator_(-kI * h.entries()), opts_(opts) {}

  /// Advances y by `span` in place.
  void advance(Matrix& y, double span) {
    if (span < 0.0) throw std::invalid_argument("negative propagation span");
    if (span == 0.0) return;
    using T = detail::Dopri5;
    if (step_ <= 0.0) step_ = initial_step(y, span);
    const double min_step = opts_.min_step_fraction * std::max(span, 1.0);
    double t = 0.0;
    Matrix k1 = generator_ * y;
    while (t < span) {
      double h = std::min(step_, span - t);
      const bool last = (h == span - t);
      const Matrix k2 = generator_ * (y + h * T::a21 * k1);
      const Matrix k3 = generator_ * (y + h * (T::a31 * k1 + T::a32 * k2));
      const Matrix k4 = generator_ * (y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
      const Matrix k5 = generator_ * (y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
      const Matrix k6 =
          generator_ * (y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
      Matrix y_new = y + h * (T::b1 * k1 + T::b3 * k3 + T::b4 * k4 + T::b5 * k5 + T::b6 * k6);
      Matrix k7 = generator_ * y_new;
      const Matrix err = h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);

      const double scaled = error_norm(err, y, y_new);
      if (scaled <= 1.0) {
        t = last ? span : t + h;
        y = std::move(y_new);
        k1 = std::move(k7);
        const double grow = scaled == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(scaled, -0.2));
        // A step clipped to land on `span` says nothing about the natural step.
        if (!last || h >= step_) step_ = h * grow;
      } else {
        step_ = h * std::max(0.2, 0.9 * std::pow(scaled, -0.2));
        if (step_ < min_step) {
          throw IntegrationError("step size underflow (h=" + std::to_string(step_) + ") at t=" + std::to_string(t));
        }
      }
      ++steps_;
    }
  }

  long steps() const { return steps_; }

 private:
  double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1) const {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < err.cols(); ++j) {
      for (Eigen::Index i = 0; i < err.rows(); ++i) {
        const double sc = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y0(i, j)), std::abs(y1(i, j)));
        const double r = std::abs(err(i, j)) / sc;
        acc += r * r;
      }
    }
    return std::sqrt(acc / double(err.size()));
  }

  double initial_step(const Matrix& y, double span) const {
    const double rate = std::max(generator_.cwiseAbs().rowwise().sum().maxCoeff(), 1e-300);
    (void)y;
    return std::min(span, 0.1 / rate);
  }

  Matrix generator_;
  PropagationOptions opts_;
  double step_ = 0.0;
  long steps_ = 0;
};

/// States sampled on a uniform output grid; states are not renormalised.
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::vector<double> norm_squared;

  double duration() const { return times.empty() ? 0.0 : times.back(); }
  const StateVector& final_state() const { return states.back(); }
};

inline Trajectory propagate(const OperatorMatrix& h, const StateVector& psi0, double duration,
                            PropagationOptions opts = {}) {
  if (psi0.dim() != h.dim()) throw std::invalid_argument("state and Hamiltonian dimensions differ");
  if (!(duration > 0.0)) throw std::invalid_argument("propagation time must be > 0");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state must be normalised");
  const int samples = std::max(2, opts.samples);

  ConditionalPropagator stepper(h, opts);
  Trajectory traj;
  traj.times.reserve(samples);
  traj.states.reserve(samples);
  Matrix y = psi0.amplitudes();
  double t = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double target = duration * double(k) / double(samples - 1);
    stepper.advance(y, target - t);
    t = target;
    traj.times.push_back(t);
    traj.states.emplace_back(y.col(0), psi0.n_max());
    traj.norm_squared.push_back(y.col(0).squaredNorm());
  }
  return traj;
}

/// Final state only; cheaper than propagate() when no trace is needed.
inline StateVector evolve(const OperatorMatrix& h, const StateVector& psi0, double duration,
                          PropagationOptions opts = {}) {
  if (psi0.dim() != h.dim()) throw std::invalid_argument("state and Hamiltonian dimensions differ");
  ConditionalPropagator stepper(h, opts);
  Matrix y = psi0.amplitudes();
  stepper.advance(y, duration);
  return {y.col(0), psi0.n_max()};
}

/// P0(t) = ||psi(t)||^2, linearly interpolated between output samples.
inline double no_photon_probability(const Trajectory& traj, double t) {
  if (traj.times.empty()) throw std::invalid_argument("empty trajectory");
  const double eps = 1e-12 * std::max(1.0, traj.duration());
  if (t < -eps || t > traj.duration() + eps) throw std::out_of_range("time outside trajectory");
  t = std::clamp(t, 0.0, traj.duration());
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  if (it == traj.times.end()) return traj.norm_squared.back();
  const std::size_t hi = static_cast<std::size_t>(it - traj.times.begin());
  if (hi == 0) return traj.norm_squared.front();
  const std::size_t lo = hi - 1;
  const double w = (t - traj.times[lo]) / (traj.times[hi] - traj.times[lo]);
  return (1.0 - w) * traj.norm_squared[lo] + w * traj.norm_squared[hi];
}

struct FidelityResult {
  double fidelity = 0.0;
  double p0 = 0.0;
  bool defined = false;
};

/// F = |<U_target psi0 | psiT>|^2 / P0 with P0 = ||psiT||^2. Undefined (and
/// reported as such) when P0 < 1e-12.
inline FidelityResult conditional_fidelity(const StateVector& psi0, const OperatorMatrix& target,
                                           const StateVector& psi_t) {
  if (psi0.dim() != target.dim() || psi_t.dim() != target.dim()) {
    throw std::invalid_argument("conditional_fidelity: dimension mismatch");
  }
  FidelityResult r;
  r.p0 = psi_t.norm_squared();
  if (r.p0 < 1e-12) return r;
  const StateVector ideal = target.apply(psi0);
  r.fidelity = std::clamp(std::norm(overlap(ideal, psi_t)) / r.p0, 0.0, 1.0);
  r.defined = true;
  return r;
}

struct DampingResult {
  StateVector state;
  double transition_time = 0.0;
};

/// Population outside the Gamma = 0 cavity-decay DFS.
inline double population_outside_dfs(const StateVector& psi) {
  const Vector& c = psi.amplitudes();
  double inside = std::norm(c(0)) + std::norm(c(1)) + std::norm(c(3)) + std::norm(c(4));
  inside += 0.5 * std::norm(c(basis_index({0, 1, 2}, psi.n_max())) - c(basis_index({0, 2, 1}, psi.n_max())));
  return std::max(0.0, psi.norm_squared() - inside);
}

/// Lets the state evolve with all lasers off until less than `threshold` of
/// population remains outside the Gamma = 0 DFS, and returns the first time
/// this happens (bisected to a relative 1e-6). With the lasers off H_cond is
/// constant, so the window is stepped with its exact exponential.
inline DampingResult damp_transition(const StateVector& psi, const SystemParams& p, double threshold = 1e-8) {
  p.validate();
  if (psi.n_max() != p.n_max) throw std::invalid_argument("state truncation differs from params");
  if (!(threshold > 0.0)) throw std::invalid_argument("damping threshold must be > 0");
  // Without cavity decay the Gamma = 0 DFS is the whole space.
  if (p.kappa == 0.0 || population_outside_dfs(psi) < threshold) return {psi, 0.0};

  const double slowest = p.gamma > 0.0 ? std::min(p.kappa, p.gamma) : p.kappa;
  const double cap = 50.0 / slowest;
  const double chunk = 0.25 / std::max({p.kappa, p.gamma, p.g});
  const Matrix generator = -kI * build_h_cond(p.without_drive()).entries();
  const Matrix step = (generator * chunk).exp();
  auto outside = [&](const Vector& v) { return population_outside_dfs(StateVector(v, psi.n_max())); };

  Vector y = psi.amplitudes();
  Vector before = y;
  double t = 0.0;
  while (true) {
    before = y;
    y = step * before;
    t += chunk;
    if (outside(y) < threshold) break;
    if (t > cap) {
      throw DampingError("transition damping did not reach " + std::to_string(threshold) + " within t=" +
                         std::to_string(cap));
    }
  }
  double lo = 0.0, hi = chunk;
  Vector at_hi = y;
  while (hi - lo > 1e-6 * (t - chunk + hi)) {
    const double mid = 0.5 * (lo + hi);
    Vector trial = (generator * mid).exp() * before;
    if (outside(trial) < threshold) {
      hi = mid;
      at_hi = std::move(trial);
    } else {
      lo = mid;
    }
  }
  return {StateVector(at_hi, psi.n_max()), t - chunk + hi};
}

/// Slow and fast amplitudes of the PHASE scheme after adiabatic elimination
/// of everything that evolves on the 1/g time scale.
struct AdiabaticAmplitudes {
  Complex c00, c01, c10, c11;  // qubit states, cavity empty
  Complex ca;                  // |0;a>
  Complex c1_10, c1_11;        // |1;10>, |1;11>
};

inline AdiabaticAmplitudes adiabatic_reference(double omega, const AdiabaticAmplitudes& initial, double t,
                                               double g = 1.0) {
  const double theta = omega * t / (2.0 * std::numbers::sqrt2);
  const double c = std::cos(theta), s = std::sin(theta);
  AdiabaticAmplitudes out = initial;
  out.c01 = c * initial.c01 + kI * s * initial.ca;
  out.ca = c * initial.ca + kI * s * initial.c01;
  out.c1_10 = -kI * omega / (2.0 * g) * out.c00;
  out.c1_11 = -kI * omega / (4.0 * g) * out.c01;
  return out;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.states.empty()) return;
  const int n_max = traj.states.front().n_max();
  const int d = traj.states.front().dim();
  os << "t,P0";
  for (int i = 0; i < d; ++i) {
    const BasisLabel l = basis_label(i, n_max);
    os << ",p_" << l.n << '_' << l.a1 << l.a2;
  }
  os << '\n';
  const auto old_precision = os.precision(12);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k] << ',' << traj.norm_squared[k];
    for (int i = 0; i < d; ++i) os << ',' << std::norm(traj.states[k].amplitudes()(i));
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace condgate
