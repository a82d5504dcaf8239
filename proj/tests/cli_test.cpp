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

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct CliRun {
  int status;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(CONDGATE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, {}};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

double field(const std::string& line, int index) {
  std::istringstream in(line);
  std::string item;
  for (int i = 0; i <= index; ++i) std::getline(in, item, ',');
  return std::stod(item);
}

TEST(Cli, GateRunReportsEveryInput) {
  const CliRun r = cli("gate run --kind phase --omega 0.79 --kappa 0.04 --gamma 0.04");
  ASSERT_EQ(r.status, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "input,P0,F,transition_time,T,n_max");
  EXPECT_EQ(rows[3].substr(0, 3), "10,");
  EXPECT_NEAR(field(rows[3], 1), 1.0, 1e-6);
  EXPECT_EQ(rows[5].substr(0, 5), "plus,");
}

TEST(Cli, GateRunSingleInputToFile) {
  const auto path = std::filesystem::temp_directory_path() / "condgate_cli_run.csv";
  const CliRun r = cli("gate run --kind cnot --omega 0.1 --kappa 1 --gamma 0.001 --input 01 --out " + path.string());
  ASSERT_EQ(r.status, 0);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto rows = lines(ss.str());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(field(rows[1], 1), 1.0, 1e-6);
  std::filesystem::remove(path);
}

TEST(Cli, ConfigFileSuppliesParameters) {
  const auto path = std::filesystem::temp_directory_path() / "condgate_cli_params.txt";
  std::ofstream(path) << "kappa = 0.04\ngamma = 0.04\nn_max = 2\n";
  const CliRun r = cli("gate run --kind swap --omega 0.5 --input 11 --config " + path.string());
  ASSERT_EQ(r.status, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].substr(rows[1].size() - 2), ",2");
  std::filesystem::remove(path);
}

TEST(Cli, DfsShowCountsTheSubspace) {
  const CliRun r = cli("dfs show --kappa 1");
  ASSERT_EQ(r.status, 0);
  const auto rows = lines(r.out);
  EXPECT_EQ(rows.front(), "index,re,im,decoherence_free");
  EXPECT_EQ(rows.back(), "dfs_dimension,5");
  EXPECT_EQ(rows.size(), 36u + 2u);
}

TEST(Cli, MonteCarloValidate) {
  const CliRun r = cli("mc validate --kind phase --omega 0.79 --kappa 0.04 --gamma 0.04 --ntraj 2000 --seed 5");
  ASSERT_EQ(r.status, 0);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "input,estimate,std_error,norm_p0,z_score,n_traj,seed");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(std::abs(field(rows[i], 4)), 4.0);
}

TEST(Cli, SweepWritesOneRowPerPoint) {
  const CliRun r = cli("gate sweep --kind swap --kappa 0.02 --gamma 0.02 --grid 0.1:1:4");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(lines(r.out).size(), 5u);
}

TEST(Cli, HamiltonianDump) {
  const CliRun r = cli("hamiltonian --nmax 1 --kappa 0.5");
  ASSERT_EQ(r.status, 0);
  const auto rows = lines(r.out);
  EXPECT_EQ(rows.front(), "row,col,re,im");
  EXPECT_GT(rows.size(), 12u);
}

TEST(Cli, ErrorsExitNonzero) {
  EXPECT_EQ(cli("gate run --kind toffoli --omega 0.1").status, 1);
  EXPECT_EQ(cli("gate run --kind phase --omega -0.1").status, 1);
  EXPECT_EQ(cli("gate run --kind phase --omega 0.1 --kappa -1").status, 1);
  EXPECT_NE(cli("gate run --omega 0.1").status, 0);
  EXPECT_NE(cli("").status, 0);
}

TEST(Cli, InfeasibleOptimisationExitsTwo) {
  EXPECT_EQ(cli("gate optimize --kind phase --kappa 0.04 --gamma 0.04 --fmin 1 --lo 0.5 --hi 1").status, 2);
}

}  // namespace
