/*
 * Copyright 2026 The ndham Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ndham/cli.hpp"
#include "ndham/signals.hpp"
#include "support.hpp"

namespace ndham {
namespace {

using nlohmann::ordered_json;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
  ordered_json json() const { return ordered_json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(NDHAM_TEST_DATA) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content = "") {
  const std::string path = ::testing::TempDir() + "/ndham_cli_" + name;
  if (!content.empty()) std::ofstream(path) << content;
  return path;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void expect_schema(const CliRun& r, const std::string& command) {
  const auto schema = testing::load_schema(std::string(NDHAM_SCHEMA_DIR) + "/" + command + ".schema.json");
  const auto errors = testing::schema_errors(schema, r.json());
  EXPECT_TRUE(errors.empty()) << command << ": " << (errors.empty() ? "" : errors.front());
}

TEST(CliExamples, CheckNewton) {
  const CliRun r = run({"check", "--field", data("newton.field"), "--tol", "1e-9", "--format", "json"});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_TRUE(j["verdict"].get<bool>());
  EXPECT_TRUE(j["reconstruction"]["available"].get<bool>());
  EXPECT_EQ(j["reconstruction"]["sample_values"].size(), 5u);
}

TEST(CliExamples, CheckBadLinear) {
  const CliRun r = run({"check", "--field", data("bad_linear.field")});
  EXPECT_EQ(r.code, 1);
  const auto j = r.json();
  EXPECT_FALSE(j["verdict"].get<bool>());
  EXPECT_EQ(j["hc1_residual"].get<double>(), 2.0);
  EXPECT_FALSE(j["reconstruction"]["available"].get<bool>());
}

TEST(CliExamples, ReconstructLinearAtOneOne) {
  const CliRun r = run({"reconstruct", "--field", data("linear.field"), "--at", "1,1"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.json()["values"][0]["H_re"].get<double>(), 0.5, 1e-15);
}

TEST(Cli, EnvelopeAndSeed) {
  const CliRun r = run({"check", "--field", data("newton.field"), "--seed", "42", "--points", "8"});
  const auto j = r.json();
  EXPECT_EQ(j["tool"], "ndham");
  EXPECT_EQ(j["version"], cli::kVersion);
  EXPECT_EQ(j["command"], "check");
  EXPECT_EQ(j["seed"].get<std::uint64_t>(), 42u);
  EXPECT_EQ(j["config"]["points"].get<std::size_t>(), 8u);
  EXPECT_NE(r.out.find("\"tol\": 1.0000000000000001e-09"), std::string::npos);
}

TEST(Cli, SeedChangesThePointCloud) {
  const CliRun a = run({"check", "--field", data("newton.field"), "--seed", "1"});
  const CliRun b = run({"check", "--field", data("newton.field"), "--seed", "2"});
  EXPECT_NE(a.json()["worst_point"], b.json()["worst_point"]);
}

const std::vector<std::vector<std::string>>& report_corpus() {
  static const std::vector<std::vector<std::string>> corpus{
      {"derive", "--function", "t^2", "--n", "5"},
      {"derive", "--function", "weierstrass:0.5,3", "--t0", "0.2", "--t1", "0.8", "--n", "4", "--mu", "-i"},
      {"derive", "--function", "c*sin(t)", "--const", "c=2", "--eps", "list:0.1,0.05,0.02,0.01", "--mu", "0"},
      {"check", "--field", data("newton.field")},
      {"check", "--field", data("coupled.field"), "--points", "16", "--complex-p"},
      {"check", "--field", data("bad_linear.field"), "--box", "3"},
      {"reconstruct", "--field", data("linear.field"), "--at", "1,1"},
      {"reconstruct", "--field", data("coupled.field"), "--grid", "2,0.5", "--nodes", "auto"},
      {"reconstruct", "--field", data("bad_linear.field"), "--at", "1,1", "--force"},
      {"verify", "--field", data("newton.field"), "--trials", "2", "--n", "401"},
      {"verify", "--field", data("bad_linear.field"), "--trials", "2", "--n", "401"},
      {"simulate", "--field", data("newton.field"), "--z0", "1,0", "--steps", "100"},
      {"simulate", "--field", data("coupled.field"), "--z0", "0.1,0.2,0.3,0.4", "--steps", "20", "--dt", "0.01"},
      {"el", "--lagrangian", "0.5*v^2", "--path", "t", "--n", "129"},
      {"el", "--lagrangian", "0.5*v^2 - 0.5*w*x^2", "--path", "cos(t)", "--const", "w=1", "--n", "2049"},
  };
  return corpus;
}

TEST(CliProperty, EveryReportMatchesItsSchema) {
  for (const auto& args : report_corpus()) {
    const CliRun r = run(args);
    ASSERT_LE(r.code, 1) << args[0] << " " << args[2] << ": " << r.err;
    expect_schema(r, args[0]);
  }
}

TEST(CliProperty, ReportsAreByteIdenticalAcrossRuns) {
  for (const auto& args : report_corpus()) {
    const CliRun a = run(args);
    const CliRun b = run(args);
    EXPECT_EQ(a.out, b.out) << args[0];
    EXPECT_FALSE(a.out.empty());
  }
}

TEST(CliSchema, ValidatorRejectsBrokenReports) {
  const CliRun r = run({"reconstruct", "--field", data("linear.field"), "--at", "1,1"});
  const auto schema = testing::load_schema(std::string(NDHAM_SCHEMA_DIR) + "/reconstruct.schema.json");
  auto missing = r.json();
  missing.erase("seed");
  EXPECT_FALSE(testing::schema_errors(schema, missing).empty());
  auto extra = r.json();
  extra["surprise"] = 1;
  EXPECT_FALSE(testing::schema_errors(schema, extra).empty());
  auto wrong = r.json();
  wrong["values"][0]["H_re"] = "half";
  EXPECT_FALSE(testing::schema_errors(schema, wrong).empty());
  auto bad_command = r.json();
  bad_command["command"] = "check";
  EXPECT_FALSE(testing::schema_errors(schema, bad_command).empty());
}

TEST(CliUsage, ErrorsExitTwo) {
  const std::vector<std::vector<std::string>> cases{
      {},
      {"frobnicate"},
      {"check"},
      {"check", "--field", data("newton.field"), "--bogus"},
      {"check", "--field", data("missing.field")},
      {"check", "--field", data("newton.field"), "--format", "csv"},
      {"check", "--field", data("newton.field"), "--points", "0"},
      {"reconstruct", "--field", data("linear.field")},
      {"reconstruct", "--field", data("linear.field"), "--at", "1,1", "--grid", "3,1"},
      {"reconstruct", "--field", data("linear.field"), "--at", "1"},
      {"reconstruct", "--field", data("linear.field"), "--at", "1,x"},
      {"reconstruct", "--field", data("linear.field"), "--at", "1,1", "--nodes", "sometimes"},
      {"derive", "--function", "t^2", "--eps", "geo:0.1,2,5"},
      {"derive", "--function", "t^2", "--eps", "spiral:1"},
      {"derive", "--function", "t^2", "--mu", "2"},
      {"derive", "--function", "t^", "--n", "3"},
      {"derive", "--function", "t + y"},
      {"derive", "--function", "weierstrass:2,3"},
      {"derive", "--function", "t^2", "--const", "c"},
      {"simulate", "--field", data("newton.field"), "--z0", "1"},
      {"simulate", "--field", data("newton.field"), "--z0", "1,0", "--dt", "-1"},
      {"el", "--lagrangian", "0.5*v^2", "--path", "t", "--eps", "grid:8,4"},
      {"el", "--lagrangian", "0.5*v^2", "--path", "t", "--eps", "list:0.01,0.005,0.0025,0.00125"},
  };
  for (const auto& args : cases) {
    const CliRun r = run(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "<none>" : args[0]) << " " << (args.size() > 2 ? args[2] : "")
                         << " | " << r.err;
    EXPECT_FALSE(r.err.empty());
    EXPECT_TRUE(r.out.empty());
  }
}

TEST(CliNumerical, PointFailuresExitThree) {
  const std::string field = temp_file("singular.field", "d = 1\nXq1 = p1\nXp1 = -1/(q1 - q1)\n");
  const CliRun r = run({"check", "--field", field, "--points", "4"});
  EXPECT_EQ(r.code, 3);
  const auto j = r.json();
  EXPECT_EQ(j["failures"].size(), 4u);
  EXPECT_FALSE(j["verdict"].get<bool>());
  expect_schema(r, "check");
}

TEST(CliNumerical, ElWithoutConvergedNodesExitsThree) {
  const CliRun r = run({"el", "--lagrangian", "0.5*v^2", "--path", "t^2", "--n", "129"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("converged"), std::string::npos);
}

std::string rough_path_csv(const std::string& name, double smooth_until) {
  const UniformGrid g(0, 1, 4097);
  std::vector<Complex> values;
  for (std::size_t k = 0; k < g.n; ++k) {
    const double t = g.node(k);
    values.push_back(0.5 * t * t + std::max(0.0, t - smooth_until) * weierstrass(0.5, 3, t));
  }
  std::ostringstream csv;
  write_path_csv(csv, SampledPath(g, values));
  return temp_file(name, csv.str());
}

TEST(CliNumerical, FlaggedElExitsThree) {
  const CliRun r = run({"el", "--lagrangian", "0.5*v^2", "--path", rough_path_csv("mostly_rough.csv", 0.3)});
  EXPECT_EQ(r.code, 3) << r.err;
  ASSERT_FALSE(r.out.empty());
  const auto j = r.json();
  EXPECT_TRUE(j["flagged"].get<bool>());
  EXPECT_GT(j["nonconverged"].get<std::size_t>(), j["points"].get<std::size_t>() / 2);
  EXPECT_EQ(j["config"]["path_source"], "csv");
  expect_schema(r, "el");
}

TEST(CliNumerical, RoughPathWithNoConvergedNodeExitsThree) {
  const CliRun r = run({"el", "--lagrangian", "0.5*v^2", "--path", rough_path_csv("rough.csv", 0.0)});
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("converged"), std::string::npos);
}

TEST(CliVerdict, NonHamiltonianExitsOne) {
  EXPECT_EQ(run({"reconstruct", "--field", data("bad_linear.field"), "--at", "1,1"}).code, 1);
  EXPECT_EQ(run({"simulate", "--field", data("bad_linear.field"), "--z0", "1,0", "--steps", "5"}).code, 1);
  EXPECT_EQ(run({"simulate", "--field", data("bad_linear.field"), "--z0", "1,0", "--steps", "5", "--force"}).code, 0);
  const CliRun v = run({"verify", "--field", data("bad_linear.field"), "--trials", "2", "--n", "401"});
  EXPECT_EQ(v.code, 1);
  EXPECT_FALSE(v.json()["verdict"].get<bool>());
  EXPECT_FALSE(v.json()["gradients"]["available"].get<bool>());
  EXPECT_GE(v.json()["self_adjointness"]["residual"].get<double>(), 1e-2);
}

TEST(Cli, VerifyNewton) {
  const CliRun r = run({"verify", "--field", data("newton.field")});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_TRUE(j["verdict"].get<bool>());
  EXPECT_LE(j["gradients"]["q_residual"].get<double>(), 1e-6);
  EXPECT_LE(j["self_adjointness"]["residual"].get<double>(), 1e-6);
  EXPECT_EQ(j["self_adjointness"]["trials"].get<int>(), 16);
}

TEST(Cli, DeriveCsv) {
  const CliRun r = run({"derive", "--function", "t^2", "--t0", "1", "--n", "1", "--eps", "list:0.1,0.05,0.025,0.0125",
                     "--format", "csv"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "t,epsilon,mu,re,im");
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("1,0.10000000000000001,1,", 0), 0u) << line;
  double re = 0.0, im = 0.0;
  ASSERT_EQ(std::sscanf(line.c_str() + 24, "%lf,%lf", &re, &im), 2) << line;
  EXPECT_NEAR(re, 2.0, 1e-14);
  EXPECT_NEAR(im, 0.1, 1e-14);
}

TEST(Cli, DeriveExtractionLabelsAndValues) {
  const auto j = run({"derive", "--function", "sin(t)", "--t0", "0.5", "--n", "1"}).json();
  const auto& e = j["extractions"][0];
  EXPECT_EQ(e["label"], "numerical extraction");
  EXPECT_NEAR(e["value_re"].get<double>(), std::cos(0.5), 1e-9);
  EXPECT_EQ(j["rows"].size(), 8u);
}

TEST(Cli, ReconstructCsvGrid) {
  const CliRun r = run({"reconstruct", "--field", data("linear.field"), "--grid", "3,1", "--format", "csv"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::size_t count = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "q1,p1,H_re,H_im");
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 9u);
}

TEST(Cli, SimulateWritesTrajectoryAndReport) {
  const std::string traj = temp_file("traj.csv");
  const std::string report = temp_file("sim.json");
  const CliRun r = run({"simulate", "--field", data("newton.field"), "--z0", "1,0", "--dt", "1e-3", "--steps", "1000",
                     "--trajectory", traj, "-o", report});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto j = ordered_json::parse(slurp(report));
  EXPECT_EQ(j["integrator"], "leapfrog");
  // m = 2, k = 5: leapfrog energy error is about dt^2 (k/m) E / 8.
  EXPECT_LE(j["energy_drift"].get<double>(), 1e-5);
  EXPECT_LE(j["step_determinant_deviation"].get<double>(), 1e-12);
  std::istringstream lines(slurp(traj));
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "t,q1,p1");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 1001u);
}

TEST(Cli, ElPathFromCsvMatchesExpression) {
  const SampledPath p = sample([](double t) { return std::cos(t); }, 0, 1, 2049);
  std::ostringstream csv;
  write_path_csv(csv, p);
  const std::string path = temp_file("cos.csv", csv.str());
  const auto a = run({"el", "--lagrangian", "0.5*v^2 - 0.5*x^2", "--path", path}).json();
  const auto b = run({"el", "--lagrangian", "0.5*v^2 - 0.5*x^2", "--path", "cos(t)", "--n", "2049"}).json();
  EXPECT_EQ(a["residual"], b["residual"]);
  EXPECT_LE(a["residual"].get<double>(), 1e-4);
}

TEST(Cli, Version) {
  const CliRun r = run({"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(cli::kVersion), std::string::npos);
}

}  // namespace
}  // namespace ndham
