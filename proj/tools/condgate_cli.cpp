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

// Command-line front end: gate runs, sweeps and optimisation, DFS spectra,
// Monte Carlo validation and figure data.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "condgate/condgate.hpp"

namespace {

using namespace condgate;

struct ParamFlags {
  std::string config;
  std::optional<double> g, kappa, gamma;
  std::optional<int> n_max;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "flat key = value parameter file")->check(CLI::ExistingFile);
    app->add_option("--g", g, "atom-cavity coupling (default 1)");
    app->add_option("--kappa", kappa, "cavity decay rate, units of g");
    app->add_option("--gamma", gamma, "atomic decay rate, units of g");
    app->add_option("--nmax", n_max, "Fock truncation (default 3)");
  }

  SystemParams resolve() const {
    SystemParams p;
    if (!config.empty()) {
      std::ifstream in(config);
      p = read_params(in);
    }
    if (g) p.g = *g;
    if (kappa) p.kappa = *kappa;
    if (gamma) p.gamma = *gamma;
    if (n_max) p.n_max = *n_max;
    p.validate();
    return p;
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw std::invalid_argument("grid must be lo:hi:n");
  return log_grid(std::stod(parts[0]), std::stod(parts[1]), std::stoul(parts[2]));
}

std::vector<QubitInput> inputs_from(const std::string& input) {
  if (input.empty()) return default_inputs();
  return {parse_qubit_input(input)};
}

void write_report_csv(std::ostream& os, const RunReport& report, int n_max) {
  os << "input,P0,F,transition_time,T,n_max\n" << std::setprecision(12);
  for (const auto& r : report.results) {
    os << to_string(r.input) << ',' << r.result.p0 << ',' << r.result.fidelity << ',' << r.result.transition_time
       << ',' << r.result.duration << ',' << n_max << '\n';
  }
}

std::string panel_file(const std::string& figure, const FigurePanel& panel) {
  std::ostringstream name;
  name << figure << '_';
  if (panel.kind == GateKind::cnot) {
    name << "kappa" << panel.params.kappa << "_gamma" << panel.params.gamma;
  } else {
    name << "rate" << panel.params.kappa;
  }
  name << ".csv";
  return name.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional no-photon dynamics of two atoms in a lossy cavity"};
  app.require_subcommand(1);

  // gate ...
  auto* gate = app.add_subcommand("gate", "gate runs, sweeps and optimisation");
  gate->require_subcommand(1);

  std::string kind_name = "phase", input, out, grid_spec = "0.001:1:181";
  double omega = 0.1, fmin = 0.99, lo = 1e-3, hi = 1.0;
  bool tune = false;
  ParamFlags params;

  auto* run = gate->add_subcommand("run", "run one gate and report P0 and F per input");
  run->add_option("--kind", kind_name, "cnot | phase | swap")->required();
  run->add_option("--omega", omega, "Rabi frequency, units of g")->required();
  run->add_option("--input", input, "00 | 01 | 10 | 11 | plus | bell (default: all basis inputs and plus)");
  run->add_flag("--tune-duration", tune, "fine-tune T for the best worst-case fidelity");
  run->add_option("--out", out, "report CSV (default stdout)");
  params.attach(run);

  auto* sweep = gate->add_subcommand("sweep", "sweep the Rabi frequency");
  sweep->add_option("--kind", kind_name)->required();
  sweep->add_option("--grid", grid_spec, "lo:hi:n, log-spaced");
  sweep->add_option("--out", out, "sweep CSV (default stdout)");
  params.attach(sweep);

  auto* optimize = gate->add_subcommand("optimize", "maximise worst-case P0 subject to a fidelity floor");
  optimize->add_option("--kind", kind_name)->required();
  optimize->add_option("--fmin", fmin, "fidelity floor");
  optimize->add_option("--lo", lo, "bracket lower end");
  optimize->add_option("--hi", hi, "bracket upper end");
  optimize->add_option("--out", out, "result CSV (default stdout)");
  params.attach(optimize);

  auto* trace = gate->add_subcommand("trace", "P0(t) and populations during the pulse");
  trace->add_option("--kind", kind_name)->required();
  trace->add_option("--omega", omega)->required();
  trace->add_option("--input", input, "qubit input (default 01)");
  trace->add_option("--out", out, "trajectory CSV (default stdout)");
  params.attach(trace);

  // dfs show
  auto* dfs = app.add_subcommand("dfs", "decoherence-free subspace");
  dfs->require_subcommand(1);
  auto* show = dfs->add_subcommand("show", "eigenvalues of H_cond and the DFS dimension");
  std::optional<double> show_omega;
  double real_tol = 1e-8;
  show->add_option("--kind", kind_name, "laser configuration used with --omega");
  show->add_option("--omega", show_omega, "Rabi frequency (default: lasers off)");
  show->add_option("--tol", real_tol, "|Im lambda| threshold, units of g");
  show->add_option("--out", out);
  params.attach(show);

  // mc validate
  auto* mc = app.add_subcommand("mc", "quantum-jump Monte Carlo");
  mc->require_subcommand(1);
  auto* validate = mc->add_subcommand("validate", "compare sampled P0 with the norm-based value");
  std::size_t ntraj = 10000;
  std::uint64_t seed = 42;
  validate->add_option("--kind", kind_name)->required();
  validate->add_option("--omega", omega)->required();
  validate->add_option("--ntraj", ntraj);
  validate->add_option("--seed", seed);
  validate->add_option("--input", input, "qubit input (default: the four basis states)");
  validate->add_option("--out", out);
  params.attach(validate);

  // figure
  auto* figure = app.add_subcommand("figure", "sweep CSVs for the reference parameter sets");
  std::string figure_name, out_dir = ".";
  std::size_t points = 61;
  figure->add_option("name", figure_name, "fig3 | fig4 | fig6")->required();
  figure->add_option("--out", out_dir, "output directory");
  figure->add_option("--points", points, "grid points per panel");
  figure->add_option("--lo", lo, "smallest Omega");
  figure->add_option("--hi", hi, "largest Omega");
  params.attach(figure);

  // hamiltonian
  auto* ham = app.add_subcommand("hamiltonian", "dump H_cond (or its coherent part) as CSV");
  bool coherent = false;
  ham->add_flag("--coherent", coherent, "drop the decay terms");
  ham->add_option("--out", out);
  params.attach(ham);

  CLI11_PARSE(app, argc, argv);

  try {
    const SystemParams p = params.resolve();
    Output sink(out);
    std::ostream& os = sink.stream();

    if (run->parsed()) {
      ReportOptions opts;
      opts.tune_duration = tune;
      const RunReport report = run_report(gate_schedule(parse_gate_kind(kind_name), omega), p, opts, inputs_from(input));
      write_report_csv(os, report, p.n_max);
    } else if (sweep->parsed()) {
      write_sweep_csv(os, sweep_rabi(parse_gate_kind(kind_name), p, parse_grid(grid_spec)));
    } else if (optimize->parsed()) {
      const GateKind kind = parse_gate_kind(kind_name);
      if (kind == GateKind::cnot && p.gamma > 0.005 * p.g) {
        std::cerr << "warning: CNOT needs gamma below about 0.005 g to reach useful success rates\n";
      }
      const OptimumReport best = maximize_p0(kind, p, fmin, lo, hi);
      os << "feasible,best_omega,best_p0,fidelity_at_best,T,fmin,lo,hi,grid_points,rel_tol,evaluations\n"
         << std::setprecision(12) << best.feasible << ',' << best.best_omega << ',' << best.best_p0 << ','
         << best.fidelity_at_best << ',' << best.duration << ',' << best.f_min << ',' << best.bracket_lo << ','
         << best.bracket_hi << ',' << best.grid_points << ',' << best.rel_tol << ',' << best.evaluations << '\n';
      if (!best.feasible) {
        std::cerr << "no Omega in the bracket reaches F >= " << fmin << '\n';
        return 2;
      }
    } else if (trace->parsed()) {
      const GateSpec spec = gate_schedule(parse_gate_kind(kind_name), omega);
      const QubitInput in = input.empty() ? QubitInput::s01 : parse_qubit_input(input);
      const Trajectory traj =
          propagate(build_h_cond(apply_schedule(p, spec)), qubit_input_state(in, p.n_max), spec.duration);
      write_trajectory_csv(os, traj);
    } else if (show->parsed()) {
      SystemParams q = p;
      if (show_omega) q = apply_schedule(q, gate_schedule(parse_gate_kind(kind_name), *show_omega));
      const SpectralDecomposition d = spectral_decompose(build_h_cond(q));
      const DfsBasis basis = dfs_from_spectrum(d, real_tol, q.g > 0.0 ? q.g : 1.0);
      os << "index,re,im,decoherence_free\n" << std::setprecision(12);
      for (std::size_t k = 0; k < d.size(); ++k) {
        const Complex lam = d.eigenvalues[k] / (q.g > 0.0 ? q.g : 1.0);
        os << k << ',' << lam.real() << ',' << lam.imag() << ',' << (std::abs(lam.imag()) < real_tol) << '\n';
      }
      os << "dfs_dimension," << basis.dim() << '\n';
    } else if (validate->parsed()) {
      const GateSpec spec = gate_schedule(parse_gate_kind(kind_name), omega);
      const SystemParams driven = apply_schedule(p, spec);
      const OperatorMatrix h = build_h_cond(driven);
      std::vector<QubitInput> ins = input.empty() ? std::vector<QubitInput>{QubitInput::s00, QubitInput::s01,
                                                                              QubitInput::s10, QubitInput::s11}
                                                  : std::vector<QubitInput>{parse_qubit_input(input)};
      os << "input,estimate,std_error,norm_p0,z_score,n_traj,seed\n" << std::setprecision(12);
      for (QubitInput in : ins) {
        const StateVector psi0 = qubit_input_state(in, p.n_max);
        const TrajectoryStats stats = run_trajectories(driven, psi0, spec.duration, ntraj, seed);
        const P0Estimate est = estimate_p0(stats);
        const double norm_p0 = evolve(h, psi0, spec.duration).norm_squared();
        const double sigma = std::max(est.std_error, 1.0 / double(ntraj));
        os << to_string(in) << ',' << est.estimate << ',' << est.std_error << ',' << norm_p0 << ','
           << (est.estimate - norm_p0) / sigma << ',' << ntraj << ',' << seed << '\n';
      }
    } else if (figure->parsed()) {
      std::filesystem::create_directories(out_dir);
      for (const FigurePanel& panel : figure_panels(figure_name, p.n_max)) {
        SystemParams q = panel.params;
        q.g = p.g;
        const auto rows = sweep_rabi(panel.kind, q, log_grid(lo, hi, points));
        const std::string path = (std::filesystem::path(out_dir) / panel_file(figure_name, panel)).string();
        std::ofstream f(path);
        write_sweep_csv(f, rows);
        std::cerr << "wrote " << path << '\n';
      }
    } else if (ham->parsed()) {
      write_matrix_csv(os, coherent ? build_h_coherent(p) : build_h_cond(p));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
