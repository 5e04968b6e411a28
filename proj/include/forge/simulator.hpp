#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "forge/lexicon.hpp"
#include "forge/model.hpp"

namespace forge {

struct RoleDistribution {
  double presence = 1.0;  // probability the role is filled at all
  std::vector<std::pair<EntityId, double>> values;
};

struct EventSpec {
  double rate_per_min = 0.0;
  std::map<Role, RoleDistribution> args;
};

/// Declarative precondition on emitted events.
///   preceded_by:    every event matching `event` has an event matching
///                   `required` in [t - within_ms, t)
///   requires_state: every event matching `event` happens while Mario is in
///                   one of `states`
struct CausalRule {
  enum class Kind { PrecededBy, RequiresState };

  Kind kind = Kind::PrecededBy;
  EventPattern event;
  EventPattern required;
  TimeMs within_ms = 0;
  std::vector<MarioState> states;
};

struct SimulatorConfig {
  TimeMs duration_ms = 60000;
  std::uint64_t seed = 0;
  std::map<EventType, EventSpec> events;
  std::vector<std::pair<std::string, double>> stage_types;
  std::vector<std::pair<MarioState, double>> initial_state;
  double state_change_rate_per_min = 0.0;
  std::vector<CausalRule> rules;

  static SimulatorConfig from_json(const nlohmann::json& j);
  static SimulatorConfig load(const std::filesystem::path& path);

  /// Throws ConfigError for negative rates or distributions that do not sum
  /// to 1 within 1e-9.
  void validate() const;
  /// Additionally checks entities, stage types and mandatory-role coverage
  /// against the lexicon.
  void validate(const Lexicon& lexicon) const;

  /// Sum of configured event rates.
  double total_rate_per_min() const;
};

/// Deterministic in (config, config.seed). Never uses platform-default
/// randomness.
GameplaySession simulate_session(const SimulatorConfig& config, SessionId id = 0);

/// Sessions 0..count-1, each seeded from (seed, index); runs in parallel
/// but the result does not depend on scheduling.
std::vector<GameplaySession> simulate_batch(const SimulatorConfig& config, std::uint64_t seed,
                                            std::size_t count);

/// Human-readable description of every rule violation (empty when sound).
std::vector<std::string> check_rules(const GameplaySession& session,
                                     const std::vector<CausalRule>& rules);

/// Parses and validates a session JSON Lines file. Malformed lines raise
/// ParseError with the line number; invariant violations raise
/// ValidationError naming the session.
std::vector<GameplaySession> ingest_log(const std::filesystem::path& path, const Lexicon& lexicon);

void write_sessions(const std::filesystem::path& path, const std::vector<GameplaySession>& sessions);

}  // namespace forge
