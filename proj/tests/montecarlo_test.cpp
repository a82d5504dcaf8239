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

#include "condgate/montecarlo.hpp"

#include <gtest/gtest.h>

#include <algorithm>

#include "condgate/gates.hpp"

namespace condgate {
namespace {

SystemParams lossy(double kappa, double gamma) {
  SystemParams p;
  p.kappa = kappa;
  p.gamma = gamma;
  return p;
}

TEST(CounterRng, MixIsTheSplitmixFinalizer) {
  // First output of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(CounterRng::mix(0x9E3779B97F4A7C15ull), 0xE220A8397B1DCDAFull);
}

TEST(CounterRng, GoldenValues) {
  CounterRng a(42, 0);
  EXPECT_EQ(a.next(), 0xE36A9A2D0E015D43ull);
  EXPECT_EQ(a.next(), 0x6BB4D94F28071B75ull);
  EXPECT_EQ(a.next(), 0xDBF4398C6072128Aull);
  CounterRng b(42, 1);
  EXPECT_EQ(b.next(), 0x70DFFC6D370FCBABull);
  CounterRng c(~0ull, 7);
  EXPECT_EQ(c.next(), 0x61254C1E0A341F40ull);
  EXPECT_DOUBLE_EQ(CounterRng(42, 0).uniform(), 0.8883453712460372);
  EXPECT_DOUBLE_EQ(CounterRng(0, 0).uniform(), 0.7497482413580301);
}

TEST(CounterRng, UniformsAreStrictlyInsideTheUnitInterval) {
  CounterRng r(7, 3);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / n, 0.5, 5.0 / std::sqrt(12.0 * n));
}

TEST(Trajectories, NoDecayMeansNoJumps) {
  const TrajectoryStats s =
      run_trajectories(SystemParams{}, qubit_input_state(QubitInput::s01, 3), 10.0, 1000, 1);
  EXPECT_EQ(s.n_no_jump, 1000u);
  EXPECT_TRUE(s.first_jump_times.empty());
}

TEST(Trajectories, PhotonLifetimeIsExponential) {
  SystemParams p = lossy(0.5, 0.0);
  p.g = 0.0;
  const double duration = 40.0;
  const std::size_t n = 10000;
  const TrajectoryStats s = run_trajectories(p, StateVector::basis({1, 0, 0}, 3), duration, n, 2024);
  EXPECT_EQ(s.channel_counts[0], s.jumped());
  std::vector<double> times = s.first_jump_times;
  std::sort(times.begin(), times.end());
  double d = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double cdf = 1.0 - std::exp(-p.kappa * times[i]);
    d = std::max({d, std::abs(double(i + 1) / n - cdf), std::abs(double(i) / n - cdf)});
  }
  // Trajectories surviving to T sit above every jump time.
  d = std::max(d, std::abs(double(times.size()) / n - (1.0 - std::exp(-p.kappa * duration))));
  EXPECT_LT(d, 1.63 / std::sqrt(double(n)));
}

TEST(Trajectories, AgreesWithNormBasedSuccess) {
  const SystemParams base = lossy(0.04, 0.04);
  const GateSpec spec = gate_schedule(GateKind::phase, 0.79);
  const SystemParams p = apply_schedule(base, spec);
  for (QubitInput in : {QubitInput::s00, QubitInput::s01}) {
    const StateVector psi0 = qubit_input_state(in, 3);
    const double exact = evolve(build_h_cond(p), psi0, spec.duration).norm_squared();
    const P0Estimate e = estimate_p0(run_trajectories(p, psi0, spec.duration, 10000, 42));
    EXPECT_LE(std::abs(e.estimate - exact), 3.0 * e.std_error) << to_string(in);
  }
}

TEST(Trajectories, CountsAreConsistent) {
  const GateSpec spec = gate_schedule(GateKind::swap, 0.5);
  const SystemParams p = apply_schedule(lossy(0.04, 0.04), spec);
  const TrajectoryStats s = run_trajectories(p, qubit_input_state(QubitInput::s01, 3), spec.duration, 5000, 9);
  EXPECT_LE(s.n_no_jump, s.n_traj);
  EXPECT_EQ(s.channel_counts[0] + s.channel_counts[1] + s.channel_counts[2], s.jumped());
  EXPECT_EQ(s.first_jump_times.size(), s.jumped());
  for (double t : s.first_jump_times) {
    EXPECT_GT(t, 0.0);
    EXPECT_LE(t, spec.duration);
  }
  const auto h = s.histogram(10);
  std::size_t total = 0;
  for (std::size_t c : h) total += c;
  EXPECT_EQ(total, s.jumped());
}

TEST(Trajectories, ChannelsFollowJumpRates) {
  SystemParams p = lossy(0.0, 0.2);
  p.g = 0.0;
  const std::size_t n = 4000;
  const TrajectoryStats s = run_trajectories(p, StateVector::basis({0, 2, 0}, 3), 100.0, n, 5);
  EXPECT_EQ(s.channel_counts[2], 0u);
  EXPECT_EQ(s.channel_counts[1], s.jumped());
  const TrajectoryStats both = run_trajectories(p, StateVector::basis({0, 2, 2}, 3), 100.0, n, 5);
  const double frac = double(both.channel_counts[1]) / double(both.jumped());
  EXPECT_NEAR(frac, 0.5, 3.0 * 0.5 / std::sqrt(double(both.jumped())));
}

TEST(Trajectories, SeedDeterminism) {
  const GateSpec spec = gate_schedule(GateKind::cnot, 0.1);
  const SystemParams p = apply_schedule(lossy(1.0, 0.005), spec);
  const StateVector psi0 = qubit_input_state(QubitInput::s10, 3);
  const TrajectoryStats a = run_trajectories(p, psi0, spec.duration, 2000, 77);
  const TrajectoryStats b = run_trajectories(p, psi0, spec.duration, 2000, 77);
  EXPECT_EQ(a.n_no_jump, b.n_no_jump);
  EXPECT_EQ(a.first_jump_times, b.first_jump_times);
  EXPECT_EQ(a.channel_counts, b.channel_counts);
  const TrajectoryStats c = run_trajectories(p, psi0, spec.duration, 2000, 78);
  EXPECT_NE(a.first_jump_times, c.first_jump_times);
}

TEST(Trajectories, IndependentOfWorkerCount) {
  const GateSpec spec = gate_schedule(GateKind::phase, 0.3);
  const SystemParams p = apply_schedule(lossy(0.04, 0.04), spec);
  const StateVector psi0 = qubit_input_state(QubitInput::plus, 3);
  MonteCarloOptions one, four;
  one.workers = 1;
  four.workers = 4;
  const TrajectoryStats a = run_trajectories(p, psi0, spec.duration, 3000, 11, one);
  const TrajectoryStats b = run_trajectories(p, psi0, spec.duration, 3000, 11, four);
  EXPECT_EQ(a.n_no_jump, b.n_no_jump);
  EXPECT_EQ(a.first_jump_times, b.first_jump_times);
  EXPECT_EQ(a.channel_counts, b.channel_counts);
}

TEST(Trajectories, DecayTargetDoesNotChangeJumpStatistics) {
  const GateSpec spec = gate_schedule(GateKind::swap, 0.4);
  SystemParams p = apply_schedule(lossy(0.04, 0.04), spec);
  const StateVector psi0 = qubit_input_state(QubitInput::s10, 3);
  p.decay_target = 0;
  const TrajectoryStats a = run_trajectories(p, psi0, spec.duration, 4000, 3);
  p.decay_target = 1;
  const TrajectoryStats b = run_trajectories(p, psi0, spec.duration, 4000, 3);
  EXPECT_EQ(a.n_no_jump, b.n_no_jump);
  EXPECT_EQ(a.first_jump_times, b.first_jump_times);
  EXPECT_EQ(a.channel_counts, b.channel_counts);
}

TEST(Trajectories, RejectsBadArguments) {
  const StateVector psi0 = qubit_input_state(QubitInput::s00, 3);
  EXPECT_THROW(run_trajectories(lossy(1, 0), psi0, 1.0, 0, 1), std::invalid_argument);
  EXPECT_THROW(run_trajectories(lossy(1, 0), psi0, 0.0, 10, 1), std::invalid_argument);
  EXPECT_THROW(run_trajectories(lossy(1, 0), qubit_input_state(QubitInput::s00, 2), 1.0, 10, 1),
               std::invalid_argument);
}

TEST(EstimateP0, BinomialFormula) {
  TrajectoryStats s;
  s.n_traj = 100;
  s.n_no_jump = 100;
  P0Estimate e = estimate_p0(s);
  EXPECT_EQ(e.estimate, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
  s.n_no_jump = 50;
  e = estimate_p0(s);
  EXPECT_DOUBLE_EQ(e.estimate, 0.5);
  EXPECT_DOUBLE_EQ(e.std_error, 0.05);
  EXPECT_THROW(estimate_p0(TrajectoryStats{}), std::invalid_argument);
}

}  // namespace
}  // namespace condgate
