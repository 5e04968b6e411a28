#include "forge/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <thread>

#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/rng.hpp"

namespace forge {

namespace {

constexpr TimeMs kEventTickMs = 10;
constexpr TimeMs kStateTickMs = 100;
constexpr double kSumTolerance = 1e-9;

template <typename Key>
void check_distribution(const std::vector<std::pair<Key, double>>& dist, const std::string& what) {
  double total = 0.0;
  for (const auto& [key, w] : dist) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError(what + ": negative or non-finite weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw ConfigError(what + ": weights sum to " + std::to_string(total) + ", expected 1");
  }
}

template <typename Key>
const Key& draw(Rng& rng, const std::vector<std::pair<Key, double>>& dist) {
  std::vector<double> weights;
  weights.reserve(dist.size());
  for (const auto& [key, w] : dist) weights.push_back(w);
  return dist[rng.categorical(weights)].first;
}

ArgMap sample_args(Rng& rng, const EventSpec& spec, const ArgMap& fixed = {}) {
  ArgMap args = fixed;
  for (const auto& [role, dist] : spec.args) {
    if (args.contains(role)) continue;
    if (dist.presence < 1.0 && !rng.bernoulli(dist.presence)) continue;
    args[role] = draw(rng, dist.values);
  }
  return args;
}

std::vector<MarioStateInterval> simulate_states(Rng& rng, const SimulatorConfig& c) {
  std::vector<MarioStateInterval> timeline;
  if (c.duration_ms <= 0) return timeline;
  MarioState current = draw(rng, c.initial_state);
  TimeMs start = 0;
  const double p = c.state_change_rate_per_min * static_cast<double>(kStateTickMs) / 60000.0;
  for (TimeMs t = kStateTickMs; t < c.duration_ms; t += kStateTickMs) {
    if (!rng.bernoulli(p)) continue;
    // Next state: initial distribution restricted to the other states.
    std::vector<std::pair<MarioState, double>> others;
    for (const auto& [s, w] : c.initial_state) {
      if (s != current && w > 0.0) others.emplace_back(s, w);
    }
    if (others.empty()) continue;
    const MarioState next = draw(rng, others);
    timeline.push_back({current, start, t});
    current = next;
    start = t;
  }
  timeline.push_back({current, start, c.duration_ms});
  return timeline;
}

MarioState state_in(const std::vector<MarioStateInterval>& timeline, TimeMs t) {
  for (const auto& iv : timeline) {
    if (iv.start_ms <= t && t < iv.end_ms) return iv.state;
  }
  return timeline.back().state;
}

bool state_allowed(const std::vector<CausalRule>& rules, const Event& e,
                   const std::vector<MarioStateInterval>& timeline) {
  for (const auto& rule : rules) {
    if (rule.kind != CausalRule::Kind::RequiresState || !rule.event.matches(e)) continue;
    const MarioState s = state_in(timeline, e.time_ms);
    if (std::find(rule.states.begin(), rule.states.end(), s) == rule.states.end()) return false;
  }
  return true;
}

bool has_precursor(const std::vector<Event>& events, const CausalRule& rule, TimeMs t) {
  return std::any_of(events.begin(), events.end(), [&](const Event& other) {
    return other.time_ms < t && other.time_ms >= t - rule.within_ms && rule.required.matches(other);
  });
}

struct Pending {
  Event event;
  std::size_t sequence = 0;
};

}  // namespace

SimulatorConfig SimulatorConfig::from_json(const nlohmann::json& j) {
  SimulatorConfig c;
  try {
    c.duration_ms = j.value("duration_ms", TimeMs{60000});
    c.seed = j.value("seed", std::uint64_t{0});
    c.state_change_rate_per_min = j.value("state_change_rate_per_min", 0.0);
    for (const auto& [stage, w] : j.at("stage_types").items()) {
      c.stage_types.emplace_back(stage, w.get<double>());
    }
    for (const auto& [state, w] : j.at("initial_state").items()) {
      c.initial_state.emplace_back(parse_mario_state(state), w.get<double>());
    }
    for (const auto& [type, je] : j.at("events").items()) {
      EventSpec spec;
      spec.rate_per_min = je.value("rate_per_min", 0.0);
      if (je.contains("args")) {
        for (const auto& [role, jr] : je.at("args").items()) {
          RoleDistribution dist;
          dist.presence = jr.value("presence", 1.0);
          for (const auto& [entity, w] : jr.at("values").items()) {
            dist.values.emplace_back(EntityId{entity}, w.get<double>());
          }
          spec.args[parse_role(role)] = std::move(dist);
        }
      }
      c.events[parse_event_type(type)] = std::move(spec);
    }
    for (const auto& jr : j.value("rules", nlohmann::json::array())) {
      CausalRule rule;
      const auto kind = jr.at("kind").get<std::string>();
      rule.event = pattern_from_json(jr.at("event"));
      if (kind == "preceded_by") {
        rule.kind = CausalRule::Kind::PrecededBy;
        rule.required = pattern_from_json(jr.at("required"));
        rule.within_ms = jr.at("within_ms").get<TimeMs>();
      } else if (kind == "requires_state") {
        rule.kind = CausalRule::Kind::RequiresState;
        for (const auto& s : jr.at("states")) rule.states.push_back(parse_mario_state(s.get<std::string>()));
      } else {
        throw ConfigError("unknown rule kind '" + kind + "'");
      }
      c.rules.push_back(std::move(rule));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed simulator config: ") + ex.what());
  } catch (const ParseError& ex) {
    throw ConfigError(std::string("malformed simulator config: ") + ex.what());
  }
  c.validate();
  return c;
}

SimulatorConfig SimulatorConfig::load(const std::filesystem::path& path) {
  return from_json(io::read_json_file(path));
}

void SimulatorConfig::validate() const {
  if (duration_ms < 0) throw ConfigError("duration_ms must be non-negative");
  if (!(state_change_rate_per_min >= 0.0)) throw ConfigError("state change rate must be >= 0");
  check_distribution(stage_types, "stage_types");
  check_distribution(initial_state, "initial_state");
  for (const auto& [type, spec] : events) {
    const std::string where = "events." + std::string(to_string(type));
    if (!(spec.rate_per_min >= 0.0) || !std::isfinite(spec.rate_per_min)) {
      throw ConfigError(where + ": rate must be >= 0");
    }
    if (spec.rate_per_min * kEventTickMs / 60000.0 > 1.0) {
      throw ConfigError(where + ": rate exceeds one event per " + std::to_string(kEventTickMs) +
                        " ms");
    }
    for (const auto& [role, dist] : spec.args) {
      if (!(dist.presence >= 0.0 && dist.presence <= 1.0)) {
        throw ConfigError(where + "." + std::string(to_string(role)) + ": presence not in [0,1]");
      }
      check_distribution(dist.values, where + "." + std::string(to_string(role)));
    }
  }
  for (const auto& rule : rules) {
    if (rule.kind == CausalRule::Kind::PrecededBy && rule.within_ms <= 0) {
      throw ConfigError("preceded_by rule needs a positive within_ms");
    }
    if (rule.kind == CausalRule::Kind::RequiresState && rule.states.empty()) {
      throw ConfigError("requires_state rule needs at least one state");
    }
  }
}

void SimulatorConfig::validate(const Lexicon& lexicon) const {
  validate();
  for (const auto& [stage, w] : stage_types) {
    if (w > 0.0) lexicon.stage_class(stage);
  }
  for (const auto& [type, spec] : events) {
    const RoleSchema& schema = lexicon.schema(type);
    const std::string where = "events." + std::string(to_string(type));
    for (const auto& [role, dist] : spec.args) {
      if (!schema.allows(role)) {
        throw ConfigError(where + ": role " + std::string(to_string(role)) + " not allowed");
      }
      if (schema.is_mandatory(role) && dist.presence < 1.0) {
        throw ConfigError(where + ": mandatory role " + std::string(to_string(role)) +
                          " must have presence 1");
      }
      for (const auto& [entity, w] : dist.values) {
        if (!lexicon.has_entity(entity)) {
          throw ConfigError(where + ": unknown entity '" + entity.token + "'");
        }
      }
    }
    if (spec.rate_per_min > 0.0) {
      for (Role r : schema.mandatory) {
        if (!spec.args.contains(r)) {
          throw ConfigError(where + ": no distribution for mandatory role " +
                            std::string(to_string(r)));
        }
      }
    }
  }
}

double SimulatorConfig::total_rate_per_min() const {
  double total = 0.0;
  for (const auto& [type, spec] : events) total += spec.rate_per_min;
  return total;
}

GameplaySession simulate_session(const SimulatorConfig& config, SessionId id) {
  config.validate();
  Rng rng(config.seed);
  GameplaySession session;
  session.id = id;
  session.duration_ms = config.duration_ms;
  session.stage_type = draw(rng, config.stage_types);
  session.state_timeline = simulate_states(rng, config);

  std::vector<Pending> pool;
  std::size_t sequence = 0;
  const TimeMs ticks = (config.duration_ms + kEventTickMs - 1) / kEventTickMs;
  for (EventType type : kAllEventTypes) {
    auto it = config.events.find(type);
    if (it == config.events.end() || it->second.rate_per_min <= 0.0) continue;
    const EventSpec& spec = it->second;
    const double p = spec.rate_per_min * static_cast<double>(kEventTickMs) / 60000.0;
    for (TimeMs tick = 0; tick < ticks; ++tick) {
      if (!rng.bernoulli(p)) continue;
      const TimeMs t = tick * kEventTickMs + static_cast<TimeMs>(rng.uniform_below(kEventTickMs));
      if (t >= config.duration_ms) continue;
      Event e;
      e.type = type;
      e.time_ms = t;
      e.args = sample_args(rng, spec);
      pool.push_back({std::move(e), sequence++});
    }
  }

  // State preconditions drop events outright.
  std::erase_if(pool, [&](const Pending& p) {
    return !state_allowed(config.rules, p.event, session.state_timeline);
  });

  // Temporal preconditions insert the missing precursor when possible,
  // otherwise the dependent event is dropped. Inserted events are checked too.
  std::vector<Event> accepted;
  std::sort(pool.begin(), pool.end(), [](const Pending& a, const Pending& b) {
    return std::tie(a.event.time_ms, a.sequence) < std::tie(b.event.time_ms, b.sequence);
  });
  for (const auto& p : pool) accepted.push_back(p.event);
  std::vector<std::size_t> seq;
  for (const auto& p : pool) seq.push_back(p.sequence);

  std::deque<std::size_t> work;
  for (std::size_t i = 0; i < accepted.size(); ++i) work.push_back(i);
  std::vector<bool> dropped(accepted.size(), false);
  std::size_t budget = accepted.size() * 4 + 16;
  while (!work.empty() && budget-- > 0) {
    const std::size_t idx = work.front();
    work.pop_front();
    if (dropped[idx]) continue;
    for (const auto& rule : config.rules) {
      if (rule.kind != CausalRule::Kind::PrecededBy || !rule.event.matches(accepted[idx])) continue;
      std::vector<Event> live;
      for (std::size_t k = 0; k < accepted.size(); ++k) {
        if (!dropped[k]) live.push_back(accepted[k]);
      }
      const TimeMs t = accepted[idx].time_ms;
      if (has_precursor(live, rule, t)) continue;
      bool inserted = false;
      if (t > 0) {
        Event pre;
        pre.type = rule.required.type;
        pre.time_ms = rng.uniform_int(std::max<TimeMs>(0, t - rule.within_ms), t - 1);
        auto spec = config.events.find(pre.type);
        pre.args = spec == config.events.end() ? rule.required.args
                                               : sample_args(rng, spec->second, rule.required.args);
        if (state_allowed(config.rules, pre, session.state_timeline)) {
          accepted.push_back(std::move(pre));
          seq.push_back(sequence++);
          dropped.push_back(false);
          work.push_back(accepted.size() - 1);
          inserted = true;
        }
      }
      if (!inserted) {
        dropped[idx] = true;
        break;
      }
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < accepted.size(); ++k) {
    if (!dropped[k]) order.push_back(k);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tuple(accepted[a].time_ms, static_cast<int>(accepted[a].type), seq[a]) <
           std::tuple(accepted[b].time_ms, static_cast<int>(accepted[b].type), seq[b]);
  });
  EventId next_id = 1;
  for (std::size_t k : order) {
    Event e = accepted[k];
    e.id = next_id++;
    session.events.push_back(std::move(e));
  }
  return session;
}

std::vector<GameplaySession> simulate_batch(const SimulatorConfig& config, std::uint64_t seed,
                                            std::size_t count) {
  config.validate();
  std::vector<GameplaySession> out(count);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        SimulatorConfig c = config;
        c.seed = Rng::derive(seed, i);
        out[i] = simulate_session(c, static_cast<SessionId>(i));
      }
    });
  }
  for (auto& t : threads) t.join();
  return out;
}

std::vector<std::string> check_rules(const GameplaySession& session,
                                     const std::vector<CausalRule>& rules) {
  std::vector<std::string> violations;
  for (const auto& e : session.events) {
    for (const auto& rule : rules) {
      if (!rule.event.matches(e)) continue;
      if (rule.kind == CausalRule::Kind::RequiresState) {
        const MarioState s = state_at(session, e.time_ms);
        if (std::find(rule.states.begin(), rule.states.end(), s) == rule.states.end()) {
          violations.push_back("event " + std::to_string(e.id) + " (" +
                               std::string(to_string(e.type)) + ") in disallowed state " +
                               std::string(to_string(s)));
        }
      } else if (!has_precursor(session.events, rule, e.time_ms)) {
        violations.push_back("event " + std::to_string(e.id) + " (" +
                             std::string(to_string(e.type)) + ") lacks a preceding " +
                             std::string(to_string(rule.required.type)) + " within " +
                             std::to_string(rule.within_ms) + " ms");
      }
    }
  }
  return violations;
}

std::vector<GameplaySession> ingest_log(const std::filesystem::path& path, const Lexicon& lexicon) {
  std::vector<GameplaySession> sessions;
  std::set<SessionId> ids;
  io::for_each_jsonl(path, [&](std::size_t line, const nlohmann::json& j) {
    GameplaySession s;
    try {
      s = session_from_json(j);
    } catch (const ParseError& ex) {
      throw ParseError(line, ex.what());
    }
    check_session_structure(s);
    lexicon.validate_session(s);
    if (!ids.insert(s.id).second) {
      throw ValidationError("session " + std::to_string(s.id) + ": duplicate session id");
    }
    sessions.push_back(std::move(s));
  });
  return sessions;
}

void write_sessions(const std::filesystem::path& path, const std::vector<GameplaySession>& sessions) {
  std::vector<nlohmann::json> rows;
  rows.reserve(sessions.size());
  for (const auto& s : sessions) rows.push_back(session_to_json(s));
  io::write_jsonl(path, rows);
}

}  // namespace forge
