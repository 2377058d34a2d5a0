// Copyright 2026 The lgcert Authors.
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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lgcert/experiment.hpp"

namespace lgcert {
namespace {

ExperimentConfig parse(const char* text) {
  auto v = validate_config(json::parse(text));
  if (!v.ok()) {
    std::string all;
    for (const auto& e : v.errors) all += e + "\n";
    ADD_FAILURE() << all;
    return {};
  }
  return *v.config;
}

bool any_error_contains(const ValidatedConfig& v, const std::string& needle) {
  for (const auto& e : v.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

TEST(Config, Defaults) {
  auto c = parse("{}");
  EXPECT_EQ(c.seed, 0u);
  EXPECT_EQ(c.suite, Suite::all);
  EXPECT_EQ(c.q, 8);
  EXPECT_FALSE(c.structure.has_value());
  EXPECT_DOUBLE_EQ(c.solver.tolerance, 1e-6);
}

TEST(Config, RejectsOutOfRange) {
  auto v = validate_config(json::parse(R"({"witnesses": {"triangle_n": [20]}})"));
  EXPECT_FALSE(v.ok());
  EXPECT_TRUE(any_error_contains(v, "triangle_n = 20"));

  v = validate_config(json::parse(R"({"suite": "arrays", "instance": {"q": 4}})"));
  EXPECT_FALSE(v.ok());
  EXPECT_TRUE(any_error_contains(v, "2|C| = 6"));

  v = validate_config(json::parse(R"({"schema": 2})"));
  EXPECT_TRUE(any_error_contains(v, "schema"));

  v = validate_config(json::parse(R"({"suite": "everything"})"));
  EXPECT_FALSE(v.ok());

  v = validate_config(json::parse(R"({"solver": {"tolerance": -1}})"));
  EXPECT_FALSE(v.ok());

  v = validate_config(json::parse(R"({"suite": "general", "instance": {"p": [3]}})"));
  EXPECT_FALSE(v.ok());

  // every bad field is reported, not only the first
  v = validate_config(json::parse(R"({"fourier": {"delta": 2}, "witnesses": {"triangle_n": [2]}})"));
  EXPECT_EQ(v.errors.size(), 2u);

  EXPECT_FALSE(validate_config(json::parse("[1, 2]")).ok());
}

TEST(Config, HashIgnoresOutput) {
  auto a = parse(R"({"output": {"dir": "x"}})");
  auto b = parse(R"({"output": {"dir": "y"}})");
  auto c = parse(R"({"seed": 1})");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  auto round = parse(a.to_json().dump().c_str());
  EXPECT_EQ(round.hash(), a.hash());
}

TEST(RunSuite, DualityOnSmallStructure) {
  auto c = parse(R"({"suite": "duality", "structure": {"kind": "ksubset", "params": [3, 2]}})");
  auto rep = run_suite(c);
  ASSERT_FALSE(rep.records.empty());
  EXPECT_TRUE(rep.passed()) << rep.csv();
  for (const auto& r : rep.records) EXPECT_FALSE(r.anchor.empty());
}

TEST(RunSuite, TriangleWitnesses) {
  auto c = parse(R"({"suite": "witnesses", "witnesses": {"triangle_n": [5]}})");
  auto rep = run_suite(c);
  EXPECT_TRUE(rep.passed()) << rep.csv();
  bool triangle = false;
  for (const auto& r : rep.records) triangle |= r.id.find("triangle") != std::string::npos;
  EXPECT_TRUE(triangle);
}

TEST(RunSuite, DeterministicAcrossRunsAndThreads) {
  auto c = parse(R"({"suite": "fourier", "fourier": {"p": [101, 257], "seeds": 2}})");
  auto a = run_suite(c).csv();
  auto b = run_suite(c).csv();
  c.parallel = true;
  auto d = run_suite(c).csv();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, d);
}

TEST(RunSuite, ThrowingCheckBecomesFailedRecord) {
  detail::NamedCheck bad{"boom", "never", [] () -> std::vector<CheckRecord> {
                           throw ParameterError("bad input");
                         }};
  auto recs = detail::run_guarded(bad);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_FALSE(recs[0].pass);
  EXPECT_EQ(recs[0].anchor, "never");
  EXPECT_NE(recs[0].note.find("bad input"), std::string::npos);
}

TEST(Check, Relations) {
  EXPECT_TRUE(make_check("a", "x", 1.0, Relation::at_most, 1.0).pass);
  EXPECT_FALSE(make_check("a", "x", 1.1, Relation::at_most, 1.0).pass);
  EXPECT_TRUE(make_check("a", "x", 2.0, Relation::at_least, 1.0).pass);
  EXPECT_FALSE(make_check("a", "x", std::nan(""), Relation::at_least, 1.0).pass);
}

TEST(Report, WritesThreeFiles) {
  auto dir = std::filesystem::temp_directory_path() / "lgcert_report_test";
  std::filesystem::remove_all(dir);
  auto c = parse(R"({"suite": "fourier", "fourier": {"p": [31], "seeds": 1}})");
  c.out_dir = dir.string();
  auto rep = run_suite(c);
  auto out = write_report(rep, c);
  EXPECT_EQ(out.filename().string(), rep.config_hash);
  for (const char* f : {"report.csv", "report.json", "metadata.json"}) {
    EXPECT_TRUE(std::filesystem::exists(out / f)) << f;
  }
  std::ifstream in(out / "report.csv");
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), rep.csv());
  auto meta = json::parse(std::ifstream(out / "metadata.json"));
  EXPECT_EQ(meta["config_hash"], rep.config_hash);
  EXPECT_TRUE(meta.contains("environment"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace lgcert
