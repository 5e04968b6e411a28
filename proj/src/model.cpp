#include "forge/model.hpp"

#include <algorithm>
#include <set>

#include "forge/errors.hpp"

namespace forge {

namespace {

constexpr std::array<std::string_view, 11> kEventTypeNames = {
    "kill", "die", "jump", "hit", "break", "appear", "shoot", "throw", "kick", "hold", "eat"};
constexpr std::array<std::string_view, 4> kRoleNames = {"agent", "patient", "means", "location"};
constexpr std::array<std::string_view, 3> kStateNames = {"small", "super", "fire_form"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view token) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == token) return static_cast<Enum>(i);
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(EventType type) { return kEventTypeNames[static_cast<std::size_t>(type)]; }
std::string_view to_string(Role role) { return kRoleNames[static_cast<std::size_t>(role)]; }
std::string_view to_string(MarioState state) { return kStateNames[static_cast<std::size_t>(state)]; }

std::optional<EventType> try_parse_event_type(std::string_view token) {
  return lookup<EventType>(kEventTypeNames, token);
}

EventType parse_event_type(std::string_view token) {
  if (auto t = try_parse_event_type(token)) return *t;
  throw ParseError("unknown event type '" + std::string(token) + "'");
}

Role parse_role(std::string_view token) {
  if (auto r = lookup<Role>(kRoleNames, token)) return *r;
  throw ParseError("unknown role '" + std::string(token) + "'");
}

MarioState parse_mario_state(std::string_view token) {
  if (auto s = lookup<MarioState>(kStateNames, token)) return *s;
  throw ParseError("unknown Mario state '" + std::string(token) + "'");
}

std::optional<EntityId> Event::arg(Role role) const {
  auto it = args.find(role);
  if (it == args.end()) return std::nullopt;
  return it->second;
}

bool EventPattern::matches(const Event& e) const {
  if (e.type != type) return false;
  for (const auto& [role, entity] : args) {
    auto it = e.args.find(role);
    if (it == e.args.end() || it->second != entity) return false;
  }
  return true;
}

const Event* GameplaySession::find_event(EventId event_id) const {
  for (const auto& e : events) {
    if (e.id == event_id) return &e;
  }
  return nullptr;
}

std::span<const Event> clip_events(const Clip& clip, const GameplaySession& session) {
  // Events are time-sorted, so the window is a contiguous range.
  auto lo = std::lower_bound(session.events.begin(), session.events.end(), clip.start_ms,
                             [](const Event& e, TimeMs t) { return e.time_ms < t; });
  auto hi = std::upper_bound(lo, session.events.end(), clip.end_ms,
                             [](TimeMs t, const Event& e) { return t < e.time_ms; });
  return {lo, hi};
}

std::vector<Event> events_in(const Clip& clip, const GameplaySession& session) {
  if (clip.session_id != session.id) {
    throw IdentityError("clip references session " + std::to_string(clip.session_id) +
                        " but was given session " + std::to_string(session.id));
  }
  const auto view = clip_events(clip, session);
  return {view.begin(), view.end()};
}

MarioState state_at(const GameplaySession& session, TimeMs t_ms) {
  if (t_ms < 0 || t_ms >= session.duration_ms) {
    throw RangeError("time " + std::to_string(t_ms) + " ms outside session " +
                     std::to_string(session.id) + " of duration " +
                     std::to_string(session.duration_ms) + " ms");
  }
  for (const auto& interval : session.state_timeline) {
    if (interval.start_ms <= t_ms && t_ms < interval.end_ms) return interval.state;
  }
  throw RangeError("state timeline of session " + std::to_string(session.id) + " does not cover " +
                   std::to_string(t_ms) + " ms");
}

std::vector<MarioState> states_during(const GameplaySession& session, TimeMs start_ms,
                                      TimeMs end_ms) {
  std::vector<MarioState> out;
  for (const auto& interval : session.state_timeline) {
    if (interval.end_ms <= start_ms || interval.start_ms > end_ms) continue;
    if (std::find(out.begin(), out.end(), interval.state) == out.end()) {
      out.push_back(interval.state);
    }
  }
  return out;
}

void check_session_structure(const GameplaySession& s) {
  const std::string who = "session " + std::to_string(s.id) + ": ";
  if (s.duration_ms < 0) throw ValidationError(who + "negative duration");
  std::set<EventId> ids;
  for (std::size_t i = 0; i < s.events.size(); ++i) {
    const Event& e = s.events[i];
    if (!ids.insert(e.id).second) {
      throw ValidationError(who + "duplicate event id " + std::to_string(e.id));
    }
    if (e.time_ms < 0 || e.time_ms >= s.duration_ms) {
      throw ValidationError(who + "event " + std::to_string(e.id) + " at " +
                            std::to_string(e.time_ms) + " ms lies outside the session");
    }
    if (i > 0) {
      const Event& prev = s.events[i - 1];
      if (std::pair(prev.time_ms, prev.id) >= std::pair(e.time_ms, e.id)) {
        throw ValidationError(who + "events not sorted by (time, id) at event " +
                              std::to_string(e.id));
      }
    }
  }
  TimeMs cursor = 0;
  for (const auto& interval : s.state_timeline) {
    if (interval.start_ms != cursor) {
      throw ValidationError(who + "state timeline has a gap or overlap at " +
                            std::to_string(interval.start_ms) + " ms");
    }
    if (interval.end_ms <= interval.start_ms) {
      throw ValidationError(who + "empty state interval at " + std::to_string(interval.start_ms) +
                            " ms");
    }
    cursor = interval.end_ms;
  }
  if (cursor != s.duration_ms) {
    throw ValidationError(who + "state timeline ends at " + std::to_string(cursor) +
                          " ms, session lasts " + std::to_string(s.duration_ms) + " ms");
  }
}

void check_clip(const Clip& clip, const GameplaySession& session) {
  if (clip.session_id != session.id) {
    throw IdentityError("clip session " + std::to_string(clip.session_id) + " != " +
                        std::to_string(session.id));
  }
  const TimeMs d = clip.duration_ms();
  if (d < kMinClipMs || d > kMaxClipMs) {
    throw ValidationError("clip duration " + std::to_string(d) + " ms outside [3000, 6000]");
  }
  if (clip.start_ms < 0 || clip.end_ms > session.duration_ms) {
    throw ValidationError("clip exceeds session bounds");
  }
  const Event* target = session.find_event(clip.target_event_id);
  if (target == nullptr || !clip.contains(target->time_ms)) {
    throw ValidationError("clip target event " + std::to_string(clip.target_event_id) +
                          " is not inside the clip");
  }
}

nlohmann::json args_to_json(const ArgMap& args) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [role, entity] : args) j[std::string(to_string(role))] = entity.token;
  return j;
}

ArgMap args_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("args must be an object");
  ArgMap out;
  for (const auto& [key, value] : j.items()) {
    out[parse_role(key)] = EntityId{value.get<std::string>()};
  }
  return out;
}

nlohmann::json pattern_to_json(const EventPattern& p) {
  return {{"type", std::string(to_string(p.type))}, {"args", args_to_json(p.args)}};
}

EventPattern pattern_from_json(const nlohmann::json& j) {
  try {
    EventPattern p;
    p.type = parse_event_type(j.at("type").get<std::string>());
    if (j.contains("args")) p.args = args_from_json(j.at("args"));
    return p;
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(ex.what());
  }
}

nlohmann::json session_to_json(const GameplaySession& s) {
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : s.events) {
    events.push_back({{"id", e.id},
                      {"type", std::string(to_string(e.type))},
                      {"t", e.time_ms},
                      {"args", args_to_json(e.args)}});
  }
  nlohmann::json states = nlohmann::json::array();
  for (const auto& st : s.state_timeline) {
    states.push_back(
        {{"state", std::string(to_string(st.state))}, {"start", st.start_ms}, {"end", st.end_ms}});
  }
  return {{"id", s.id},
          {"stage_type", s.stage_type},
          {"duration_ms", s.duration_ms},
          {"events", std::move(events)},
          {"states", std::move(states)}};
}

GameplaySession session_from_json(const nlohmann::json& j) {
  GameplaySession s;
  try {
    s.id = j.at("id").get<SessionId>();
    s.stage_type = j.at("stage_type").get<std::string>();
    s.duration_ms = j.at("duration_ms").get<TimeMs>();
    for (const auto& je : j.at("events")) {
      Event e;
      e.id = je.at("id").get<EventId>();
      e.type = parse_event_type(je.at("type").get<std::string>());
      e.time_ms = je.at("t").get<TimeMs>();
      if (je.contains("args")) e.args = args_from_json(je.at("args"));
      s.events.push_back(std::move(e));
    }
    for (const auto& js : j.at("states")) {
      s.state_timeline.push_back({parse_mario_state(js.at("state").get<std::string>()),
                                  js.at("start").get<TimeMs>(), js.at("end").get<TimeMs>()});
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(ex.what());
  }
  return s;
}

}  // namespace forge
