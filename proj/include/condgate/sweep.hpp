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

// Rabi-frequency sweeps and the bracketed maximisation of the worst-case
// success probability under a fidelity floor.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "condgate/gates.hpp"
#include "condgate/hamiltonian.hpp"
#include "condgate/parallel.hpp"

namespace condgate {

struct SweepRow {
  double omega = 0.0;
  double duration = 0.0;
  double p0_worst = 0.0;
  double fidelity_worst = 0.0;
  std::vector<QubitInput> inputs;
  std::vector<double> p0;
  std::vector<double> fidelity;
  std::vector<double> transition_time;
  std::string error;  // empty when the point evaluated cleanly

  bool ok() const { return error.empty(); }
};

struct SweepOptions {
  ReportOptions report{};
  std::vector<QubitInput> inputs = default_inputs();
  unsigned workers = 0;
};

inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi >= lo) || n == 0) throw std::invalid_argument("log_grid needs 0 < lo <= hi and n >= 1");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = n == 1 ? lo : lo * std::pow(hi / lo, double(i) / double(n - 1));
  }
  return g;
}

/// 60 points per decade over [1e-3 g, g].
inline std::vector<double> default_rabi_grid(double g = 1.0) { return log_grid(1e-3 * g, g, 181); }

inline SweepRow evaluate_point(GateKind kind, const SystemParams& p, double omega, const SweepOptions& opts) {
  SweepRow row;
  row.omega = omega;
  row.inputs = opts.inputs;
  try {
    const GateSpec spec = gate_schedule(kind, omega);
    const RunReport report = run_report(spec, p, opts.report, opts.inputs);
    row.duration = report.spec.duration;
    row.p0_worst = report.worst_p0;
    row.fidelity_worst = report.worst_fidelity;
    for (const auto& r : report.results) {
      row.p0.push_back(r.result.p0);
      row.fidelity.push_back(r.result.fidelity);
      row.transition_time.push_back(r.result.transition_time);
    }
  } catch (const std::exception& e) {
    row.error = e.what();
    row.p0_worst = 0.0;
    row.fidelity_worst = 0.0;
  }
  return row;
}

/// One row per grid point, in grid order. Failures are recorded in the row.
inline std::vector<SweepRow> sweep_rabi(GateKind kind, const SystemParams& p, const std::vector<double>& grid,
                                        const SweepOptions& opts = {}) {
  if (grid.empty()) throw std::invalid_argument("empty Rabi grid");
  for (double w : grid) {
    if (!(w > 0.0)) throw std::invalid_argument("grid values must be > 0");
  }
  p.validate();
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { rows[i] = evaluate_point(kind, p, grid[i], opts); }, opts.workers);
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  if (rows.empty()) return;
  os << "omega,T,p0_worst,fidelity_worst";
  for (QubitInput in : rows.front().inputs) os << ",P0_" << to_string(in) << ",F_" << to_string(in);
  os << ",error\n";
  const auto old_precision = os.precision(12);
  for (const SweepRow& r : rows) {
    os << r.omega << ',' << r.duration << ',' << r.p0_worst << ',' << r.fidelity_worst;
    for (std::size_t k = 0; k < r.inputs.size(); ++k) {
      if (r.ok()) {
        os << ',' << r.p0[k] << ',' << r.fidelity[k];
      } else {
        os << ",,";
      }
    }
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << ',' << err << '\n';
  }
  os.precision(old_precision);
}

struct MaximizeOptions {
  SweepOptions sweep{};
  std::size_t points_per_decade = 60;
  std::size_t min_grid_points = 8;
  double rel_tol = 1e-3;
  /// Grid points whose p0 is within this of the best count as ties; the
  /// smallest such Omega wins.
  double tie_tol = 1e-6;
};

struct OptimumReport {
  bool feasible = false;
  double best_omega = 0.0;
  double best_p0 = 0.0;
  double fidelity_at_best = 0.0;
  double duration = 0.0;
  double f_min = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::size_t grid_points = 0;
  double rel_tol = 0.0;
  std::size_t evaluations = 0;
  std::vector<SweepRow> grid_rows;
};

/// Scans a log grid over the bracket, then refines around the best feasible
/// grid point by golden-section search in log Omega until the bracket is
/// narrower than rel_tol. Infeasible points score below every feasible one.
inline OptimumReport maximize_p0(GateKind kind, const SystemParams& p, double f_min, double lo, double hi,
                                 const MaximizeOptions& opts = {}) {
  if (!(f_min > 0.0 && f_min <= 1.0)) throw std::invalid_argument("f_min must lie in (0, 1]");
  if (!(lo > 0.0 && hi > lo)) throw std::invalid_argument("bracket must satisfy 0 < lo < hi");

  OptimumReport out;
  out.f_min = f_min;
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.rel_tol = opts.rel_tol;
  const double decades = std::log10(hi / lo);
  out.grid_points =
      std::max(opts.min_grid_points, static_cast<std::size_t>(std::ceil(decades * double(opts.points_per_decade))) + 1);
  const std::vector<double> grid = log_grid(lo, hi, out.grid_points);
  out.grid_rows = sweep_rabi(kind, p, grid, opts.sweep);
  out.evaluations = grid.size();

  auto feasible = [&](const SweepRow& r) { return r.ok() && r.fidelity_worst >= f_min; };
  auto score = [&](const SweepRow& r) { return feasible(r) ? r.p0_worst : -1.0 + r.fidelity_worst * 1e-3; };

  std::size_t best = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!feasible(out.grid_rows[i])) continue;
    if (best == grid.size() || out.grid_rows[i].p0_worst > out.grid_rows[best].p0_worst + opts.tie_tol) best = i;
  }
  if (best == grid.size()) return out;

  SweepRow champion = out.grid_rows[best];
  auto consider = [&](const SweepRow& r) {
    if (!feasible(r)) return;
    const bool better = r.p0_worst > champion.p0_worst + opts.tie_tol;
    const bool tie_smaller = std::abs(r.p0_worst - champion.p0_worst) <= opts.tie_tol && r.omega < champion.omega;
    if (better || tie_smaller) champion = r;
  };

  double a = std::log(grid[best > 0 ? best - 1 : 0]);
  double b = std::log(grid[std::min(best + 1, grid.size() - 1)]);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto eval = [&](double x) {
    SweepRow r = evaluate_point(kind, p, std::exp(x), opts.sweep);
    ++out.evaluations;
    consider(r);
    return score(r);
  };
  if (b > a) {
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = eval(x1), f2 = eval(x2);
    while (b - a > opts.rel_tol) {
      if (f1 >= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = eval(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = eval(x2);
      }
    }
  }

  out.feasible = true;
  out.best_omega = champion.omega;
  out.best_p0 = champion.p0_worst;
  out.fidelity_at_best = champion.fidelity_worst;
  out.duration = champion.duration;
  return out;
}

/// Reference parameter sets for success-rate curves, keyed fig3, fig4, fig6.
struct FigurePanel {
  std::string label;
  GateKind kind;
  SystemParams params;
  std::vector<QubitInput> plotted;
};

inline std::vector<FigurePanel> figure_panels(const std::string& figure, int n_max = 3) {
  std::vector<FigurePanel> panels;
  auto make = [&](const std::string& label, GateKind kind, double kappa, double gamma,
                  std::vector<QubitInput> plotted) {
    SystemParams p;
    p.kappa = kappa;
    p.gamma = gamma;
    p.n_max = n_max;
    panels.push_back({label, kind, p, std::move(plotted)});
  };
  if (figure == "fig3") {
    for (double gamma : {1e-4, 1e-3, 5e-3}) {
      make("gamma_" + std::to_string(gamma), GateKind::cnot, 1.0, gamma, {QubitInput::s10});
    }
  } else if (figure == "fig4" || figure == "fig6") {
    const GateKind kind = figure == "fig4" ? GateKind::phase : GateKind::swap;
    const std::vector<QubitInput> plotted = figure == "fig4"
                                                ? std::vector<QubitInput>{QubitInput::s00, QubitInput::s01}
                                                : std::vector<QubitInput>{QubitInput::s00, QubitInput::s01,
                                                                          QubitInput::s10, QubitInput::s11};
    for (double rate : {0.01, 0.02, 0.04}) make("rate_" + std::to_string(rate), kind, rate, rate, plotted);
  } else {
    throw std::invalid_argument("unknown figure '" + figure + "' (expected fig3, fig4 or fig6)");
  }
  return panels;
}

}  // namespace condgate
