// Runs the tiltlab executable end to end and inspects its JSON output and exit codes.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#ifndef TILTLAB_CLI_PATH
#error "TILTLAB_CLI_PATH must name the tiltlab executable"
#endif

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out, err;
};

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("tiltlab-cli-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// `env` is prefixed to the command line, e.g. "TILTLAB_CACHE=/tmp/x".
RunResult run(const std::string& args, const std::string& env = "") {
  fs::path err = scratch_dir() / "stderr.txt";
  std::string cmd = (env.empty() ? "" : env + " ") + "'" + std::string(TILTLAB_CLI_PATH) + "' " + args + " 2>'" +
                    err.string() + "'";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err);
  return r;
}

json run_json(const std::string& args, int expected_code = 0) {
  RunResult r = run(args);
  EXPECT_EQ(r.code, expected_code) << args << "\nstderr: " << r.err;
  return json::parse(r.out);
}

}  // namespace

TEST(CliCmin, Examples) {
  EXPECT_EQ(run_json("cmin --ell 3 --module L:3")["degrees"], json::parse(R"({"-1":[1],"0":[3],"1":[1]})"));
  EXPECT_EQ(run_json("cmin --ell 3 --module T:4")["degrees"], json::parse(R"({"0":[4]})"));
  EXPECT_EQ(run_json("cmin --ell 3 --module delta:3")["degrees"], json::parse(R"({"0":[3],"1":[1]})"));
  auto j = run_json("cmin --ell 3 --module L:3");
  EXPECT_EQ(j["ell"], 3);
  EXPECT_EQ(j["module"], "L(3)");
}

TEST(CliCmin, BadModuleSpecsAreUsageErrors) {
  EXPECT_EQ(run("cmin --ell 3 --module Q:3").code, 3);
  EXPECT_EQ(run("cmin --ell 3 --module L3").code, 3);
  EXPECT_EQ(run("cmin --ell 3 --module L:x").code, 3);
  EXPECT_EQ(run("cmin --ell 4 --module L:3").code, 3);
  EXPECT_EQ(run("cmin --ell 3").code, 3);
}

TEST(CliIdeals, Examples) {
  auto e = run_json("ideals enumerate --ell 3 --window 12");
  EXPECT_EQ(e["count"], 3);
  ASSERT_EQ(e["ideals"].size(), 3u);
  EXPECT_EQ(e["ideals"][1]["members"], json({2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}));
  EXPECT_EQ(e["ideals"][1]["prime"], true);
  EXPECT_TRUE(e["ideals"][2]["prime"].is_null());

  auto g = run_json("ideals generate 3 --ell 3 --window 12");
  EXPECT_EQ(g["members"], json({2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}));
  EXPECT_EQ(g["full"], false);

  auto full = run_json("ideals generate 0 --ell 5 --window 12");
  EXPECT_EQ(full["full"], true);
  EXPECT_EQ(full["members"].size(), 13u);
}

TEST(CliIdeals, InvalidArguments) {
  EXPECT_EQ(run("ideals generate 13 --ell 3 --window 12").code, 3);
  EXPECT_EQ(run("ideals generate --ell 3 --window 12").code, 3);
  EXPECT_EQ(run("ideals enumerate --ell 3 --window 3").code, 3);
  EXPECT_EQ(run("ideals frobnicate --ell 3").code, 3);
}

TEST(CliAlcove, Examples) {
  RunResult d = run("alcove d --type A2 --p 5 --lambda 3,3");
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(std::count(d.out.begin(), d.out.end(), '\n'), 1);
  EXPECT_EQ(json::parse(d.out)["result"], 1);
  EXPECT_EQ(json::parse(d.out)["p_regular"], true);
  EXPECT_EQ(run_json("alcove steinberg --type A1 --p 3 --lambda 7")["result"], json::parse("[[1],[2]]"));
  EXPECT_EQ(run_json("alcove negligible --type A2 --p 5 --lambda 1,1")["result"], false);
  EXPECT_EQ(run_json("alcove regular --type A1 --p 3 --lambda 2")["result"], false);
  EXPECT_EQ(run_json("alcove orbit --type A1 --p 3 --lambda 2 --bound 14")["result"], json::parse("[[2],[8],[14]]"));
}

TEST(CliAlcove, MalformedInputsAreUsageErrors) {
  EXPECT_EQ(run("alcove d --type A2 --p 5 --lambda 3,x").code, 3);
  EXPECT_EQ(run("alcove d --type A2 --p 5 --lambda 3").code, 3);
  EXPECT_EQ(run("alcove d --type A2 --p 5 --lambda -1,2").code, 3);
  EXPECT_EQ(run("alcove d --type Q7 --p 5 --lambda 1").code, 3);
  EXPECT_EQ(run("alcove d --type A2 --p 0 --lambda 1,1").code, 3);
}

TEST(CliVerify, BijectionSuitePasses) {
  auto r = run_json("verify --suite bijection --ell 3 --window 12 --budget 50 --seed 7");
  EXPECT_EQ(r["pass"], true);
  EXPECT_EQ(r["seed"], 7);
  EXPECT_TRUE(r["failures"].empty());
  EXPECT_FALSE(r["cases"].empty());
}

TEST(CliVerify, LemmaSuitePassesAtFive) {
  auto r = run_json("verify --suite lemmas --ell 5 --window 10 --budget 30 --seed 1");
  EXPECT_EQ(r["pass"], true);
  EXPECT_EQ(r["ell"], 5);
  bool saw_ses = false;
  for (const auto& c : r["cases"]) saw_ses |= c["id"].get<std::string>().rfind("ses", 0) == 0;
  EXPECT_TRUE(saw_ses);
}

TEST(CliVerify, AlcoveCrossReportsTable) {
  auto r = run_json("verify --suite alcove-cross --ell 3 --window 12");
  EXPECT_EQ(r["pass"], true);
  ASSERT_EQ(r["table"].size(), 13u);
  for (const auto& row : r["table"]) {
    EXPECT_TRUE(row.contains("gfd"));
    EXPECT_TRUE(row.contains("d"));
  }
  EXPECT_EQ(r["table"][6]["gfd"], 2);
  EXPECT_EQ(r["table"][6]["d"], 2);
}

TEST(CliVerify, TwoOutOfThreeReportsEverySequence) {
  auto r = run_json("verify --suite two-out-of-three --ell 3 --window 12 --budget 10 --seed 3");
  EXPECT_EQ(r["pass"], true);
  EXPECT_GE(r["cases"].size(), 10u);
}

TEST(CliVerify, WindowTooSmallExitsWithTwo) {
  RunResult r = run("verify --suite lemmas --ell 3 --window 4 --budget 2");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("window"), std::string::npos) << r.err;
}

TEST(CliVerify, UnknownSuiteIsAUsageError) { EXPECT_EQ(run("verify --suite everything").code, 3); }

TEST(CliVerify, ReportsAreDeterministic) {
  std::string args = "verify --suite two-out-of-three --ell 3 --window 12 --budget 8 --seed 99";
  RunResult a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(CliConfig, FileValuesAreDefaultsAndFlagsOverrideThem) {
  fs::path cfg = scratch_dir() / "run.conf";
  {
    std::ofstream out(cfg);
    out << "# suite settings\nsuite = two-out-of-three\nell = 5\nwindow = 12\nbudget = 4\nseed = 42\n";
  }
  auto r = run_json("verify --config '" + cfg.string() + "'");
  EXPECT_EQ(r["suite"], "two-out-of-three");
  EXPECT_EQ(r["ell"], 5);
  EXPECT_EQ(r["seed"], 42);
  EXPECT_EQ(r["config"]["budget"], 4);
  auto o = run_json("verify --config '" + cfg.string() + "' --seed 43 --ell 3");
  EXPECT_EQ(o["ell"], 3);
  EXPECT_EQ(o["seed"], 43);
  EXPECT_EQ(o["suite"], "two-out-of-three");

  fs::path bad = scratch_dir() / "bad.conf";
  {
    std::ofstream out(bad);
    out << "colour = blue\n";
  }
  EXPECT_EQ(run("verify --config '" + bad.string() + "'").code, 3);
  EXPECT_EQ(run("verify --config '" + (scratch_dir() / "missing.conf").string() + "'").code, 3);
}

TEST(CliOutput, WritesToFile) {
  fs::path out = scratch_dir() / "cmin.json";
  RunResult r = run("cmin --ell 3 --module L:3 --output '" + out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(json::parse(slurp(out))["degrees"], json::parse(R"({"-1":[1],"0":[3],"1":[1]})"));
}

TEST(CliCache, ColdAndWarmRunsAgree) {
  fs::path cache = scratch_dir() / "cache";
  fs::remove_all(cache);
  std::string args = "verify --suite lemmas --ell 3 --window 12 --budget 5 --seed 5 --cache-dir '" + cache.string() + "'";
  RunResult cold = run(args);
  ASSERT_EQ(cold.code, 0) << cold.err;
  ASSERT_TRUE(fs::exists(cache));
  std::size_t entries = std::distance(fs::directory_iterator(cache), fs::directory_iterator{});
  EXPECT_GT(entries, 0u);
  RunResult warm = run(args);
  ASSERT_EQ(warm.code, 0);
  EXPECT_EQ(cold.out, warm.out);

  // environment variable route, then a corrupted entry
  std::string env = "TILTLAB_CACHE='" + cache.string() + "'";
  RunResult viaenv = run("cmin --ell 3 --module L:6", env);
  ASSERT_EQ(viaenv.code, 0);
  for (const auto& e : fs::directory_iterator(cache)) {
    std::ofstream(e.path(), std::ios::trunc) << "garbage";
  }
  RunResult again = run("cmin --ell 3 --module L:6", env);
  EXPECT_EQ(again.code, 0);
  EXPECT_EQ(again.out, viaenv.out);
  EXPECT_NE(again.err.find("warning"), std::string::npos);
}

TEST(CliUsage, HelpAndMissingSubcommand) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 3);
}
