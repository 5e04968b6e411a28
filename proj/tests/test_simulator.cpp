#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "forge/errors.hpp"
#include "forge/simulator.hpp"

using namespace forge;

namespace {

SimulatorConfig default_config() { return SimulatorConfig::load(fx::data("simulator.json")); }

nlohmann::json jump_only(double rate) {
  return {{"duration_ms", 60000},
          {"stage_types", {{"overground", 1.0}}},
          {"initial_state", {{"small", 1.0}}},
          {"events", {{"jump", {{"rate_per_min", rate}}}}}};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / ("forge_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST_CASE("default config is valid against the lexicon") {
  auto c = default_config();
  CHECK_NOTHROW(c.validate(fx::lexicon()));
  CHECK(c.total_rate_per_min() > 0.0);
}

TEST_CASE("simulation is deterministic in the seed") {
  auto c = default_config();
  c.seed = 123;
  auto a = simulate_session(c, 4);
  auto b = simulate_session(c, 4);
  CHECK(a == b);
  c.seed = 124;
  CHECK_FALSE(simulate_session(c, 4) == a);

  auto batch1 = simulate_batch(c, 9, 6);
  auto batch2 = simulate_batch(c, 9, 6);
  CHECK(batch1 == batch2);
  for (std::size_t i = 0; i < batch1.size(); ++i) CHECK(batch1[i].id == static_cast<SessionId>(i));
}

TEST_CASE("simulated sessions satisfy every invariant and rule") {
  auto c = default_config();
  auto sessions = simulate_batch(c, 2024, 20);
  for (const auto& s : sessions) {
    CHECK_NOTHROW(check_session_structure(s));
    CHECK_NOTHROW(fx::lexicon().validate_session(s));
    CHECK(check_rules(s, c.rules).empty());
    for (std::size_t i = 0; i < s.events.size(); ++i) {
      CHECK(s.events[i].id == static_cast<EventId>(i + 1));
    }
  }
}

TEST_CASE("empirical rate within 10% of the configured rate") {
  auto c = SimulatorConfig::from_json(jump_only(30));
  auto sessions = simulate_batch(c, 77, 100);
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.events.size();
  const double expected = 30.0 * 100;  // 100 one-minute sessions
  CHECK(std::abs(static_cast<double>(n) - expected) <= 0.1 * expected);

  // Rule-free event types in the default config.
  auto d = default_config();
  auto many = simulate_batch(d, 5, 100);
  for (EventType t : {EventType::Hit, EventType::Appear, EventType::Eat}) {
    std::size_t count = 0;
    for (const auto& s : many) {
      for (const auto& e : s.events) count += e.type == t;
    }
    const double want = d.events.at(t).rate_per_min * 100;
    CAPTURE(to_string(t));
    CHECK(std::abs(static_cast<double>(count) - want) <= 0.1 * want);
  }
}

TEST_CASE("causal rules shape the log") {
  auto c = default_config();
  auto sessions = simulate_batch(c, 31, 30);
  std::size_t stomps = 0;
  for (const auto& s : sessions) {
    for (const auto& e : s.events) {
      if (e.type == EventType::Shoot) CHECK(state_at(s, e.time_ms) == MarioState::FireForm);
      if (e.type == EventType::Kill && e.arg(Role::Means) == EntityId{"stomping"}) {
        ++stomps;
        bool jumped = false;
        for (const auto& p : s.events) {
          jumped |= p.type == EventType::Jump && p.time_ms < e.time_ms && p.time_ms >= e.time_ms - 500;
        }
        CHECK(jumped);
      }
    }
  }
  CHECK(stomps > 0);

  auto bad = fx::SessionBuilder(5000).event(1000, EventType::Shoot, fx::args({{Role::Means, "fireball"}})).build();
  CHECK(check_rules(bad, c.rules).size() == 1);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(SimulatorConfig::from_json(jump_only(-1)), ConfigError);

  auto j = jump_only(10);
  j["stage_types"] = {{"overground", 0.5}, {"cave", 0.4}};
  CHECK_THROWS_AS(SimulatorConfig::from_json(j), ConfigError);

  j = jump_only(10);
  j["events"]["hit"] = {{"rate_per_min", 5}, {"args", {{"patient", {{"values", {{"coin_block", 1.0}}}}}}}};
  CHECK_NOTHROW(SimulatorConfig::from_json(j).validate(fx::lexicon()));
  j["events"]["hit"]["args"]["patient"]["values"] = {{"star", 1.0}};
  CHECK_THROWS_AS(SimulatorConfig::from_json(j).validate(fx::lexicon()), ConfigError);

  j = jump_only(10);
  j["events"]["kill"] = {{"rate_per_min", 5}, {"args", {{"patient", {{"values", {{"Goomba", 1.0}}}}}}}};
  CHECK_THROWS_AS(SimulatorConfig::from_json(j).validate(fx::lexicon()), ConfigError);

  j = jump_only(10);
  j["rules"] = {{{"kind", "sometimes"}, {"event", {{"type", "jump"}}}}};
  CHECK_THROWS_AS(SimulatorConfig::from_json(j), ConfigError);
}

TEST_CASE("session log ingestion") {
  const auto good = session_to_json(fx::counting_example()).dump();
  auto path = temp_file("good.jsonl", good + "\n");
  auto sessions = ingest_log(path, fx::lexicon());
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0] == fx::counting_example());

  path = temp_file("broken.jsonl", good + "\n{\"id\": 2, \n");
  try {
    ingest_log(path, fx::lexicon());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  auto other = fx::counting_example();
  other.id = 1;
  auto missing = session_to_json(other);
  missing.erase("duration_ms");
  path = temp_file("missing.jsonl", good + "\n" + missing.dump() + "\n");
  try {
    ingest_log(path, fx::lexicon());
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }

  path = temp_file("dup.jsonl", good + "\n" + good + "\n");
  CHECK_THROWS_AS(ingest_log(path, fx::lexicon()), ValidationError);

  auto unknown = session_to_json(fx::counting_example());
  unknown["events"][0]["type"] = "fly";
  path = temp_file("unknown.jsonl", unknown.dump() + "\n");
  CHECK_THROWS_AS(ingest_log(path, fx::lexicon()), ParseError);

  auto bad_args = session_to_json(fx::counting_example());
  bad_args["events"][1]["args"] = nlohmann::json::object();
  path = temp_file("badargs.jsonl", bad_args.dump() + "\n");
  CHECK_THROWS_AS(ingest_log(path, fx::lexicon()), ValidationError);
}
