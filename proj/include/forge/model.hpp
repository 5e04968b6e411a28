#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace forge {

using TimeMs = std::int64_t;
using EventId = std::int64_t;
using SessionId = std::int64_t;

enum class EventType : std::uint8_t {
  Kill,
  Die,
  Jump,
  Hit,
  Break,
  Appear,
  Shoot,
  Throw,
  Kick,
  Hold,
  Eat,
};

inline constexpr std::array<EventType, 11> kAllEventTypes = {
    EventType::Kill,  EventType::Die,   EventType::Jump, EventType::Hit,
    EventType::Break, EventType::Appear, EventType::Shoot, EventType::Throw,
    EventType::Kick,  EventType::Hold,  EventType::Eat};

enum class Role : std::uint8_t { Agent, Patient, Means, Location };

inline constexpr std::array<Role, 4> kAllRoles = {Role::Agent, Role::Patient, Role::Means,
                                                  Role::Location};

enum class MarioState : std::uint8_t { Small, Super, FireForm };

inline constexpr std::array<MarioState, 3> kAllMarioStates = {MarioState::Small, MarioState::Super,
                                                              MarioState::FireForm};

std::string_view to_string(EventType type);
std::string_view to_string(Role role);
std::string_view to_string(MarioState state);

// Closed-set parsers; throw ParseError on unknown tokens.
EventType parse_event_type(std::string_view token);
Role parse_role(std::string_view token);
MarioState parse_mario_state(std::string_view token);

std::optional<EventType> try_parse_event_type(std::string_view token);

/// Symbolic entity identifier such as `PGoomba`, `shell` or `hill`.
struct EntityId {
  std::string token;

  auto operator<=>(const EntityId&) const = default;
};

using ArgMap = std::map<Role, EntityId>;

struct Event {
  EventId id = 0;
  EventType type = EventType::Jump;
  TimeMs time_ms = 0;
  ArgMap args;

  std::optional<EntityId> arg(Role role) const;

  bool operator==(const Event&) const = default;
};

// Half-open [start_ms, end_ms).
struct MarioStateInterval {
  MarioState state = MarioState::Small;
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;

  bool operator==(const MarioStateInterval&) const = default;
};

struct GameplaySession {
  SessionId id = 0;
  std::string stage_type;
  TimeMs duration_ms = 0;
  std::vector<Event> events;  // sorted by (time_ms, id)
  std::vector<MarioStateInterval> state_timeline;

  const Event* find_event(EventId id) const;

  bool operator==(const GameplaySession&) const = default;
};

/// Event type plus a partial argument map; matches events of that type whose
/// arguments agree on every specified role.
struct EventPattern {
  EventType type = EventType::Jump;
  ArgMap args;

  bool matches(const Event& e) const;

  bool operator==(const EventPattern&) const = default;
};

// Closed window [start_ms, end_ms] anchored on a target event.
struct Clip {
  SessionId session_id = 0;
  TimeMs start_ms = 0;
  TimeMs end_ms = 0;
  EventId target_event_id = 0;

  TimeMs duration_ms() const { return end_ms - start_ms; }
  bool contains(TimeMs t) const { return start_ms <= t && t <= end_ms; }

  bool operator==(const Clip&) const = default;
};

inline constexpr TimeMs kMinClipMs = 3000;
inline constexpr TimeMs kMaxClipMs = 6000;

/// View of the session events inside the closed clip window (no identity check).
std::span<const Event> clip_events(const Clip& clip, const GameplaySession& session);

/// Events of `session` inside the closed clip window, time-sorted.
/// Throws IdentityError when the clip belongs to another session.
std::vector<Event> events_in(const Clip& clip, const GameplaySession& session);

/// Mario's state at `t_ms`. Throws RangeError outside [0, duration_ms).
MarioState state_at(const GameplaySession& session, TimeMs t_ms);

/// Distinct states overlapping the closed window, in timeline order.
std::vector<MarioState> states_during(const GameplaySession& session, TimeMs start_ms,
                                      TimeMs end_ms);

/// Checks the lexicon-independent session invariants (ordering, unique ids,
/// timestamps inside the session, state partition). Throws ValidationError.
void check_session_structure(const GameplaySession& session);

/// Checks the clip duration and target-containment invariants against its
/// session. Throws ValidationError.
void check_clip(const Clip& clip, const GameplaySession& session);

// Session JSON Lines schema.
nlohmann::json session_to_json(const GameplaySession& session);
GameplaySession session_from_json(const nlohmann::json& j);
nlohmann::json args_to_json(const ArgMap& args);
ArgMap args_from_json(const nlohmann::json& j);
nlohmann::json pattern_to_json(const EventPattern& p);
EventPattern pattern_from_json(const nlohmann::json& j);

}  // namespace forge
