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

// First-jump quantum-jump unraveling of the conditional dynamics. A run ends
// at its first emission, so every trajectory follows the same deterministic
// no-jump branch until its random threshold is crossed. That branch is
// computed once per call with exact exponential steps (not the adaptive
// integrator) and shared by all trajectories.

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "condgate/hamiltonian.hpp"
#include "condgate/hilbert.hpp"
#include "condgate/parallel.hpp"

namespace condgate {

/// Counter-based generator, algorithm "condgate-rng-v1": the k-th draw of
/// stream s under seed S is splitmix64_mix(S ^ splitmix64_mix(s + 1) +
/// (k + 1) * 0x9E3779B97F4A7C15). Uniforms use the top 53 bits, offset by
/// half an ulp so they lie strictly inside (0, 1).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(seed ^ mix(stream + 1)) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t next() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

  double uniform() { return (double(next() >> 11) + 0.5) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct TrajectoryStats {
  std::size_t n_traj = 0;
  std::size_t n_no_jump = 0;
  /// First-jump times of the trajectories that jumped, in trajectory order.
  std::vector<double> first_jump_times;
  std::array<std::size_t, 3> channel_counts{};  // indexed by DecayChannel
  std::uint64_t seed = 0;
  double duration = 0.0;

  std::size_t jumped() const { return n_traj - n_no_jump; }

  std::vector<std::size_t> histogram(std::size_t bins) const {
    std::vector<std::size_t> h(bins, 0);
    if (bins == 0 || duration <= 0.0) return h;
    for (double t : first_jump_times) {
      const auto b = static_cast<std::size_t>(t / duration * double(bins));
      ++h[std::min(b, bins - 1)];
    }
    return h;
  }
};

struct MonteCarloOptions {
  /// Crossing times are refined until ||psi||^2 is within this of the threshold.
  double norm_tol = 1e-6;
  unsigned workers = 0;
};

namespace detail {

// exp(-i H s) psi by Taylor series; s is at most one cached step so
// ||H|| s <= 0.5 and the series converges in a few dozen terms.
inline Vector taylor_step(const Matrix& generator, const Vector& psi, double s) {
  Vector sum = psi, term = psi;
  for (int k = 1; k < 60; ++k) {
    term = (s / double(k)) * (generator * term);
    sum += term;
    if (term.norm() < 1e-17 * sum.norm()) break;
  }
  return sum;
}

inline double sequential_norm2(const Vector& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::norm(v(i));
  return acc;
}

}  // namespace detail

inline TrajectoryStats run_trajectories(const SystemParams& p, const StateVector& psi0, double duration,
                                        std::size_t n_traj, std::uint64_t seed, MonteCarloOptions opts = {}) {
  p.validate();
  if (n_traj < 1) throw std::invalid_argument("n_traj must be >= 1");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  if (psi0.n_max() != p.n_max) throw std::invalid_argument("state truncation differs from params");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state must be normalised");

  TrajectoryStats stats;
  stats.n_traj = n_traj;
  stats.seed = seed;
  stats.duration = duration;
  const std::vector<JumpOperator> jumps = jump_operators(p);
  if (jumps.empty()) {
    stats.n_no_jump = n_traj;
    return stats;
  }

  const OperatorMatrix h = build_h_cond(p);
  const Matrix generator = -kI * h.entries();
  const double h_norm = std::max(generator.cwiseAbs().colwise().sum().maxCoeff(), 1e-12);
  const auto steps = static_cast<std::size_t>(std::ceil(duration * h_norm / 0.5));
  const double dt = duration / double(steps);
  const Matrix propagator = (generator * dt).exp();

  std::vector<Vector> branch{psi0.amplitudes()};
  std::vector<double> branch_norm{psi0.norm_squared()};
  branch.reserve(steps + 1);
  for (std::size_t k = 0; k < steps; ++k) {
    branch.push_back(propagator * branch.back());
    branch_norm.push_back(branch.back().squaredNorm());
  }

  struct Outcome {
    bool jumped = false;
    double time = 0.0;
    int channel = 0;
  };
  std::vector<Outcome> outcomes(n_traj);
  parallel_for(
      n_traj,
      [&](std::size_t i) {
        CounterRng rng(seed, i);
        const double threshold = rng.uniform();
        const double channel_draw = rng.uniform();
        if (branch_norm.back() >= threshold) return;
        // First cached sample below the threshold; norms are non-increasing.
        const auto it = std::partition_point(branch_norm.begin(), branch_norm.end(),
                                             [&](double n) { return n >= threshold; });
        const std::size_t k = static_cast<std::size_t>(it - branch_norm.begin());
        // Illinois regula falsi on ||psi(s)||^2 - threshold inside the step.
        const Vector& start = branch[k - 1];
        double lo = 0.0, hi = dt, mid = dt;
        double f_lo = branch_norm[k - 1] - threshold, f_hi = branch_norm[k] - threshold;
        Vector at = branch[k];
        int side = 0;
        for (int iter = 0; iter < 200; ++iter) {
          mid = f_lo == f_hi ? 0.5 * (lo + hi) : lo + (hi - lo) * f_lo / (f_lo - f_hi);
          mid = std::clamp(mid, lo, hi);
          at = detail::taylor_step(generator, start, mid);
          const double f = at.squaredNorm() - threshold;
          if (std::abs(f) < opts.norm_tol || hi - lo < 1e-15 * duration) break;
          if (f < 0.0) {
            hi = mid;
            f_hi = f;
            if (side == -1) f_lo *= 0.5;
            side = -1;
          } else {
            lo = mid;
            f_lo = f;
            if (side == 1) f_hi *= 0.5;
            side = 1;
          }
        }
        Outcome& o = outcomes[i];
        o.jumped = true;
        o.time = double(k - 1) * dt + mid;
        std::vector<double> weight;
        double total = 0.0;
        for (const JumpOperator& j : jumps) {
          weight.push_back(detail::sequential_norm2(j.matrix.entries() * at));
          total += weight.back();
        }
        double cumulative = 0.0;
        o.channel = static_cast<int>(jumps.front().channel);
        for (std::size_t c = 0; c < jumps.size(); ++c) {
          cumulative += weight[c];
          if (channel_draw * total <= cumulative) {
            o.channel = static_cast<int>(jumps[c].channel);
            break;
          }
        }
      },
      opts.workers);

  for (const Outcome& o : outcomes) {
    if (!o.jumped) {
      ++stats.n_no_jump;
      continue;
    }
    stats.first_jump_times.push_back(o.time);
    ++stats.channel_counts[static_cast<std::size_t>(o.channel)];
  }
  return stats;
}

struct P0Estimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Binomial point estimate and standard error sqrt(p(1-p)/n).
inline P0Estimate estimate_p0(const TrajectoryStats& stats) {
  if (stats.n_traj < 1) throw std::invalid_argument("no trajectories");
  const double n = double(stats.n_traj);
  const double p = double(stats.n_no_jump) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace condgate
