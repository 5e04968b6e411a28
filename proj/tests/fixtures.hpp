#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "forge/lexicon.hpp"
#include "forge/model.hpp"
#include "forge/templates.hpp"

namespace fx {

inline std::filesystem::path data(const std::string& name) {
  return std::filesystem::path(FORGE_DATA_DIR) / name;
}

inline const forge::Lexicon& lexicon() {
  static const forge::Lexicon lex = forge::Lexicon::load(data("lexicon.json"));
  return lex;
}

inline const forge::TemplatePool& pool() {
  static const forge::TemplatePool p = forge::TemplatePool::load(data("templates.json"), lexicon());
  return p;
}

inline forge::ArgMap args(std::initializer_list<std::pair<forge::Role, const char*>> list) {
  forge::ArgMap out;
  for (const auto& [role, token] : list) out[role] = forge::EntityId{token};
  return out;
}

// Builds a session by hand. Events must be added in time order; ids are
// assigned 1, 2, ... in insertion order.
class SessionBuilder {
 public:
  explicit SessionBuilder(forge::TimeMs duration, std::string stage = "overground",
                          forge::MarioState initial = forge::MarioState::Small) {
    s_.duration_ms = duration;
    s_.stage_type = std::move(stage);
    s_.state_timeline.push_back({initial, 0, duration});
  }

  SessionBuilder& id(forge::SessionId id) {
    s_.id = id;
    return *this;
  }

  SessionBuilder& event(forge::TimeMs t, forge::EventType type, forge::ArgMap a = {}) {
    forge::Event e;
    e.id = static_cast<forge::EventId>(s_.events.size() + 1);
    e.type = type;
    e.time_ms = t;
    e.args = std::move(a);
    s_.events.push_back(std::move(e));
    return *this;
  }

  // Mario switches to `state` at `t` (until the end of the session).
  SessionBuilder& state(forge::MarioState state, forge::TimeMs t) {
    s_.state_timeline.back().end_ms = t;
    s_.state_timeline.push_back({state, t, s_.duration_ms});
    return *this;
  }

  forge::GameplaySession build() const { return s_; }

 private:
  forge::GameplaySession s_;
};

inline forge::Clip whole(const forge::GameplaySession& s, forge::EventId target) {
  return forge::Clip{s.id, 0, s.duration_ms, target};
}

// The counting example: jumps at 500/1500/2000 ms, a shell thrown at 1000 ms
// and a Para Goomba stomped at 2500 ms, in a 3 s session.
//   ids: 1 jump@500, 2 throw@1000, 3 jump@1500, 4 jump@2000, 5 kill@2500
inline forge::GameplaySession counting_example() {
  using forge::EventType;
  using forge::Role;
  return SessionBuilder(3000)
      .event(500, EventType::Jump)
      .event(1000, EventType::Throw, args({{Role::Patient, "shell"}}))
      .event(1500, EventType::Jump)
      .event(2000, EventType::Jump)
      .event(2500, EventType::Kill, args({{Role::Patient, "PGoomba"}, {Role::Means, "stomping"}}))
      .build();
}

}  // namespace fx
