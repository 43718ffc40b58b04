// Copyright 2026 The aqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "aqec/bounds.hpp"
#include "aqec/cli/app.hpp"

using namespace aqec;
using namespace aqec::cli;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("aqec_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, Json j) {
    if (!j.contains("output")) j["output"] = (dir_ / name).string();
    const auto path = dir_ / (name + ".cfg.json");
    write_text(path, j.dump(2));
    return path.string();
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    args.insert(args.begin(), "aqec");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return main_entry(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::string cache() const { return (dir_ / "cache").string(); }

  fs::path dir_;
  std::ostringstream out_, err_;
};

Json kl_config() {
  return Json{{"experiment", "kl-check"},
              {"code", {{"family", "repetition"}, {"sizes", {3}}}},
              {"noise", {{"kind", "bit_flip"}}},
              {"p_grid", {0.05, 0.1}}};
}

}  // namespace

TEST(Config, ParsesAndRoundTrips) {
  const auto cfg = parse_config(Json{{"experiment", "threshold-scan"},
                                     {"code", {{"family", "toric"}, {"sizes", {3, 4}}}},
                                     {"noise", {{"kind", "depolarizing"}, {"weight_cap", 3}}},
                                     {"p_grid", {0.1, 0.12}},
                                     {"mode", "mc"},
                                     {"samples", 500},
                                     {"seed", 9}});
  EXPECT_EQ(cfg.code->sizes, (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(cfg.noise->weight_cap, std::optional<std::size_t>(3));
  EXPECT_EQ(cfg.samples, 500u);
  EXPECT_EQ(cfg.threads, 1u);
  EXPECT_EQ(parse_config(to_json(cfg)), cfg);
  EXPECT_EQ(parse_config_text(to_json(cfg).dump()), cfg);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto bad = [](Json j) { EXPECT_THROW(parse_config(j), ConfigError) << j.dump(); };
  Json j = kl_config();
  j["sampels"] = 10;
  bad(j);
  j = kl_config();
  j["code"]["famly"] = "toric";
  bad(j);
  j = kl_config();
  j["noise"]["kind"] = "amplitude_damping";
  bad(j);
  j = kl_config();
  j["experiment"] = "nonsense";
  bad(j);
  j = kl_config();
  j["p_grid"] = {1.5};
  bad(j);
  j = kl_config();
  j["code"]["d"] = 4;
  bad(j);
  j = kl_config();
  j["samples"] = "many";
  bad(j);
  j = kl_config();
  j.erase("code");
  bad(j);
  bad(Json{{"experiment", "replica"},
           {"code", {{"family", "toric"}, {"sizes", {2}}}},
           {"noise", {{"kind", "bit_flip"}}},
           {"p_grid", {0.1}},
           {"replicas", {1}}});
  bad(Json{{"experiment", "imperfect-exact"}, {"lattice_sizes", {2}}, {"beta_grid", {0.0}},
           {"p_grid", {0.1}}});
  EXPECT_THROW(parse_config_text("{not json"), ConfigError);
  EXPECT_THROW(read_config_file("/nonexistent/aqec.json"), ConfigError);
}

TEST(Config, CacheKeyIgnoresThreadsAndOutput) {
  auto a = parse_config(kl_config());
  auto b = a;
  b.threads = 4;
  b.output = "elsewhere";
  EXPECT_EQ(cache_key(a), cache_key(b));
  b.seed = 2;
  EXPECT_NE(cache_key(a), cache_key(b));
  b = a;
  b.p_grid.push_back(0.2);
  EXPECT_NE(cache_key(a), cache_key(b));
}

TEST_F(CliTest, RunWritesRecordAndCsv) {
  const auto cfg = write_config("kl", kl_config());
  ASSERT_EQ(run({"run", cfg, "--cache-dir", cache()}), 0) << err_.str();
  const Json rec = Json::parse(read_text(dir_ / "kl.json"));
  EXPECT_EQ(rec["experiment"], "kl-check");
  EXPECT_EQ(rec["version"], kArtifactVersion);
  ASSERT_EQ(rec["cells"].size(), 2u);
  for (const auto& c : rec["cells"]) {
    EXPECT_TRUE(c["bounds"]["ok"].get<bool>());
    EXPECT_TRUE(c["gram_invariants_ok"].get<bool>());
  }
  EXPECT_FALSE(rec["cache_hit"].get<bool>());
  const std::string csv = read_text(dir_ / "kl.csv");
  EXPECT_EQ(csv.rfind("code_id,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST_F(CliTest, SecondRunHitsCache) {
  const auto cfg = write_config("kl", kl_config());
  ASSERT_EQ(run({"run", cfg, "--cache-dir", cache()}), 0);
  const std::string first = read_text(dir_ / "kl.csv");
  ASSERT_EQ(run({"run", cfg, "--cache-dir", cache()}), 0);
  EXPECT_NE(out_.str().find("cache hit"), std::string::npos);
  EXPECT_TRUE(Json::parse(read_text(dir_ / "kl.json"))["cache_hit"].get<bool>());
  EXPECT_EQ(read_text(dir_ / "kl.csv"), first);
  ASSERT_EQ(run({"run", cfg, "--cache-dir", cache(), "--no-cache"}), 0);
  EXPECT_EQ(out_.str().find("cache hit"), std::string::npos);
}

TEST_F(CliTest, ValidateOnlyDoesNotRun) {
  const auto cfg = write_config("kl", kl_config());
  EXPECT_EQ(run({"--validate-only", "run", cfg}), 0);
  EXPECT_NE(out_.str().find("config ok"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "kl.json"));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  Json j = kl_config();
  j["bogus"] = 1;
  EXPECT_EQ(run({"run", write_config("bad", j)}), 2);
  EXPECT_NE(err_.str().find("bogus"), std::string::npos);
  EXPECT_EQ(run({"run", (dir_ / "missing.json").string()}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
  EXPECT_EQ(run({}), 2);
  // A custom tableau that is not commuting is rejected before any work.
  Json c = kl_config();
  c["code"] = Json{{"family", "custom"}, {"generators", {"100|000", "000|100"}}};
  EXPECT_EQ(run({"--validate-only", "run", write_config("custom", c)}), 2);
}

TEST_F(CliTest, OversizedDenseRunExitsThree) {
  Json j = kl_config();
  j["code"] = Json{{"family", "toric"}, {"sizes", {4}}};
  EXPECT_EQ(run({"run", write_config("big", j), "--no-cache"}), 3);
  EXPECT_NE(err_.str().find("budget"), std::string::npos);
}

// The exit code for a violated bound is reserved for real violations, which
// the engines do not produce; check the reporting path directly.
TEST(BoundViolation, ReportedByChecker) {
  const auto rep = check_bounds_thm1(5.0, 0.999, 2.0, "forced");
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(static_cast<int>(ExitCode::kBoundViolation), 4);
}

TEST_F(CliTest, ThreadCountDoesNotChangeResults) {
  Json j{{"experiment", "threshold-scan"},
         {"code", {{"family", "toric"}, {"sizes", {3}}}},
         {"noise", {{"kind", "bit_flip"}}},
         {"p_grid", {0.08, 0.12}},
         {"mode", "mc"},
         {"samples", 400},
         {"seed", 21}};
  const auto cfg = write_config("scan", j);
  ASSERT_EQ(run({"run", cfg, "--no-cache", "--threads", "1"}), 0) << err_.str();
  const std::string one = read_text(dir_ / "scan.csv");
  ASSERT_EQ(run({"run", cfg, "--no-cache", "--threads", "3"}), 0);
  EXPECT_EQ(read_text(dir_ / "scan.csv"), one);
}

TEST_F(CliTest, ReportSummarizesRecords) {
  const auto cfg = write_config("kl", kl_config());
  ASSERT_EQ(run({"run", cfg, "--no-cache"}), 0);
  ASSERT_EQ(run({"report", (dir_ / "kl.json").string()}), 0);
  EXPECT_NE(out_.str().find("experiment kl-check"), std::string::npos);
  EXPECT_NE(out_.str().find("slack"), std::string::npos);

  write_text(dir_ / "empty.json", Json{{"experiment", "kl-check"}, {"cells", Json::array()}}.dump());
  EXPECT_EQ(run({"report", (dir_ / "empty.json").string()}), 0);
  EXPECT_NE(out_.str().find("no cells in record"), std::string::npos);

  write_text(dir_ / "junk.json", "[1, 2");
  EXPECT_EQ(run({"report", (dir_ / "junk.json").string()}), 2);
}

TEST_F(CliTest, ImperfectExactRun) {
  Json j{{"experiment", "imperfect-exact"},
         {"lattice_sizes", {2}},
         {"beta_grid", {1.0, 2.0}},
         {"p_grid", {0.1}}};
  ASSERT_EQ(run({"run", write_config("imp", j), "--no-cache"}), 0) << err_.str();
  const Json rec = Json::parse(read_text(dir_ / "imp.json"));
  ASSERT_EQ(rec["cells"].size(), 2u);
  for (const auto& c : rec["cells"]) {
    EXPECT_GT(c["exact"]["S"].get<double>(), 0.0);
    EXPECT_NEAR(c["exact"]["S"].get<double>(), c["gram"]["S"].get<double>(), 1e-6);
  }
}

TEST_F(CliTest, BinaryRunsAsSubprocess) {
  const auto cfg = write_config("kl", kl_config());
  const std::string cmd = std::string(AQEC_CLI_PATH) + " run " + cfg + " --no-cache > " +
                          (dir_ / "log.txt").string() + " 2>&1";
  EXPECT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "kl.csv"));
  const std::string bad = std::string(AQEC_CLI_PATH) + " run " + (dir_ / "none.json").string() +
                          " > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
