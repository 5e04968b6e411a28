#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the forge binary with `args`, capturing stdout.
Run forge(const std::string& args) {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "forge_cli_test";
    fs::create_directories(d);
    return d;
  }();
  const auto out = dir / "stdout.txt";
  const std::string cmd =
      std::string(FORGE_BIN) + " " + args + " > " + out.string() + " 2> " + (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

fs::path work(const std::string& name) {
  auto d = fs::temp_directory_path() / "forge_cli_test";
  fs::create_directories(d);
  return d / name;
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(forge("").code == 2);
  CHECK(forge("frobnicate").code == 2);
  CHECK(forge("simulate").code == 2);  // --out is required
  CHECK(forge("simulate --count 0 --out x.jsonl").code == 2);
  CHECK(forge("eval --dataset x.jsonl").code == 2);
  CHECK(forge("attn-check").code == 2);
}

TEST_CASE("bad inputs exit with 1") {
  CHECK(forge("validate --dataset /nonexistent.jsonl --sessions /nonexistent.jsonl").code == 1);
  auto bad = work("bad.jsonl");
  std::ofstream(bad) << "{not json\n";
  CHECK(forge("stats --dataset " + bad.string()).code == 1);
  CHECK(forge("split --dataset " + bad.string() + " --ratios 0.5,0.5,0.5 --out " +
              work("o.jsonl").string())
            .code == 1);
}

TEST_CASE("attention check on random fixtures") {
  auto r = forge("attn-check --random 50 --seed 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("50 fixtures checked") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("small pipeline end to end") {
  const auto sessions = work("sessions.jsonl");
  const auto raw = work("raw.jsonl");
  const auto split = work("split.jsonl");
  const auto stats = work("stats.json");
  const auto report = work("eval.json");
  REQUIRE(forge("simulate --count 4 --seed 5 --out " + sessions.string()).code == 0);
  REQUIRE(forge("generate --sessions " + sessions.string() + " --seed 5 --out " + raw.string()).code == 0);
  CHECK(forge("validate --dataset " + raw.string() + " --sessions " + sessions.string()).code == 0);
  REQUIRE(forge("split --dataset " + raw.string() + " --seed 5 --out " + split.string()).code == 0);
  CHECK(forge("stats --dataset " + split.string() + " --sessions " + sessions.string() + " --out " +
              stats.string())
            .code == 0);
  CHECK(fs::exists(work("stats.csv")));

  // Evaluating an unsplit dataset has no test examples.
  CHECK(forge("eval --dataset " + raw.string() + " --baseline most-frequent").code == 1);

  auto r = forge("eval --dataset " + split.string() + " --baseline most-frequent --out " +
                 report.string());
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(std::ifstream(report));
  CHECK(j["accuracy"]["overall"].contains("ALL"));
  CHECK(j.contains("random_guess"));

  // Predictions for ids outside the test split are rejected.
  const auto preds = work("preds.jsonl");
  std::ofstream(preds) << "{\"id\": 123456789, \"answer\": \"Goomba\"}\n";
  CHECK(forge("eval --dataset " + split.string() + " --predictions " + preds.string()).code == 1);
}
