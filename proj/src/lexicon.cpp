#include "forge/lexicon.hpp"

#include <algorithm>
#include <set>

#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/text.hpp"

namespace forge {

namespace {

std::vector<Role> parse_roles(const nlohmann::json& j) {
  std::vector<Role> out;
  for (const auto& r : j) out.push_back(parse_role(r.get<std::string>()));
  return out;
}

bool contains(const std::vector<Role>& roles, Role role) {
  return std::find(roles.begin(), roles.end(), role) != roles.end();
}

// Role referenced by a clause slot `{role}` or `{role:form}`.
Role clause_slot_role(const text::Segment& slot, std::string_view where) {
  if (slot.parts.empty() || slot.parts.size() > 2) {
    throw LexiconError("bad clause slot in " + std::string(where));
  }
  return parse_role(slot.parts[0]);
}

}  // namespace

bool RoleSchema::allows(Role role) const {
  return contains(mandatory, role) || contains(optional, role);
}

bool RoleSchema::is_mandatory(Role role) const { return contains(mandatory, role); }

Lexicon Lexicon::load(const std::filesystem::path& path) {
  try {
    return from_json(io::read_json_file(path));
  } catch (const LexiconError& ex) {
    throw LexiconError(path.string() + ": " + ex.what());
  }
}

Lexicon Lexicon::from_json(const nlohmann::json& j) {
  Lexicon lex;
  try {
    lex.max_count_ = j.value("max_count", 10);
    if (lex.max_count_ < 0) throw LexiconError("max_count must be non-negative");

    for (const auto& [token, je] : j.at("entities").items()) {
      EntityEntry e;
      e.id = EntityId{token};
      e.answer_class = je.at("class").get<std::string>();
      e.name = je.value("name", e.answer_class);
      if (je.contains("forms")) e.forms = je.at("forms").get<std::map<std::string, std::string>>();
      if (je.contains("roles")) {
        for (const auto& [role, phrase] : je.at("roles").items()) {
          e.role_phrases[parse_role(role)] = phrase.get<std::string>();
        }
      }
      lex.entities_.emplace(e.id, std::move(e));
    }

    std::set<std::string> forms_seen;
    for (const auto& [token, jev] : j.at("events").items()) {
      const EventType type = parse_event_type(token);
      RoleSchema schema;
      schema.mandatory = parse_roles(jev.value("mandatory", nlohmann::json::array()));
      schema.optional = parse_roles(jev.value("optional", nlohmann::json::array()));
      lex.schemas_[type] = schema;

      std::optional<std::vector<Role>> roles;
      for (const auto& [form, surface] : jev.at("clause").items()) {
        const std::string where = token + ".clause." + form;
        std::vector<Role> used;
        for (const auto& seg : text::split_slots(surface.get<std::string>())) {
          if (!seg.is_slot) continue;
          const Role r = clause_slot_role(seg, where);
          if (!schema.is_mandatory(r)) {
            throw LexiconError(where + " names non-mandatory role " + std::string(to_string(r)));
          }
          if (!contains(used, r)) used.push_back(r);
        }
        std::sort(used.begin(), used.end());
        if (roles && *roles != used) {
          throw LexiconError(where + " names a different role set than the other forms");
        }
        roles = used;
        lex.clauses_[type][form] = surface.get<std::string>();
        forms_seen.insert(form);
      }
      lex.clause_roles_[type] = roles.value_or(std::vector<Role>{});
    }
    for (EventType t : kAllEventTypes) {
      if (!lex.schemas_.contains(t)) {
        throw LexiconError("missing event entry '" + std::string(to_string(t)) + "'");
      }
    }
    // Every form must be available for every event type so any template can
    // reference any event.
    for (const auto& form : forms_seen) {
      for (EventType t : kAllEventTypes) {
        if (!lex.clauses_[t].contains(form)) {
          throw LexiconError("event '" + std::string(to_string(t)) + "' lacks clause form '" +
                             form + "'");
        }
      }
    }
    lex.clause_forms_.assign(forms_seen.begin(), forms_seen.end());

    for (const auto& [token, cls] : j.at("states").items()) {
      lex.states_[parse_mario_state(token)] = cls.get<std::string>();
    }
    for (MarioState s : kAllMarioStates) {
      if (!lex.states_.contains(s)) {
        throw LexiconError("missing state class for '" + std::string(to_string(s)) + "'");
      }
    }
    for (const auto& [token, cls] : j.at("stage_types").items()) {
      lex.stages_[token] = cls.get<std::string>();
      lex.stage_order_.push_back(token);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw LexiconError(std::string("malformed lexicon: ") + ex.what());
  } catch (const ParseError& ex) {
    throw LexiconError(std::string("malformed lexicon: ") + ex.what());
  }
  return lex;
}

const RoleSchema& Lexicon::schema(EventType type) const { return schemas_.at(type); }

bool Lexicon::has_entity(const EntityId& id) const { return entities_.contains(id); }

const EntityEntry& Lexicon::entity(const EntityId& id) const {
  auto it = entities_.find(id);
  if (it == entities_.end()) throw LexiconError("unknown entity '" + id.token + "'");
  return it->second;
}

const std::string& Lexicon::answer_class(const EntityId& id) const {
  return entity(id).answer_class;
}

const std::string& Lexicon::state_class(MarioState state) const { return states_.at(state); }

const std::string& Lexicon::stage_class(const std::string& stage_type) const {
  auto it = stages_.find(stage_type);
  if (it == stages_.end()) throw LexiconError("unknown stage type '" + stage_type + "'");
  return it->second;
}

std::string Lexicon::count_class(long count) const {
  if (count < 0 || count > max_count_) {
    throw LexiconError("count " + std::to_string(count) + " outside the answer vocabulary");
  }
  return std::to_string(count);
}

std::string Lexicon::render(const EntityId& id, std::string_view form) const {
  const EntityEntry& e = entity(id);
  if (form.empty() || form == "name") return e.name;
  if (form == "class") return e.answer_class;
  if (auto it = e.forms.find(std::string(form)); it != e.forms.end()) return it->second;
  if (form == "indef") return std::string(text::indefinite_article(e.name)) + " " + e.name;
  if (form == "plural") return e.name + "s";
  throw LexiconError("entity '" + id.token + "' has no form '" + std::string(form) + "'");
}

std::string Lexicon::role_phrase(const EntityId& id, Role role) const {
  const EntityEntry& e = entity(id);
  if (auto it = e.role_phrases.find(role); it != e.role_phrases.end()) return it->second;
  return e.name;
}

const std::vector<Role>& Lexicon::clause_roles(EventType type) const {
  return clause_roles_.at(type);
}

bool Lexicon::has_clause_form(std::string_view form) const {
  return std::find(clause_forms_.begin(), clause_forms_.end(), form) != clause_forms_.end();
}

std::string Lexicon::render_clause(EventType type, const ArgMap& args,
                                   std::string_view form) const {
  const auto& forms = clauses_.at(type);
  auto it = forms.find(std::string(form));
  if (it == forms.end()) {
    throw LexiconError("no clause form '" + std::string(form) + "' for event '" +
                       std::string(to_string(type)) + "'");
  }
  std::string out;
  for (const auto& seg : text::split_slots(it->second)) {
    if (!seg.is_slot) {
      out += seg.literal;
      continue;
    }
    const Role role = parse_role(seg.parts[0]);
    auto arg = args.find(role);
    if (arg == args.end()) {
      throw LexiconError("clause for '" + std::string(to_string(type)) + "' needs role " +
                         std::string(to_string(role)));
    }
    out += render(arg->second, seg.parts.size() > 1 ? seg.parts[1] : "");
  }
  return out;
}

std::vector<std::string> Lexicon::answer_vocabulary() const {
  std::set<std::string> classes;
  for (const auto& [id, e] : entities_) classes.insert(e.answer_class);
  for (const auto& [s, cls] : states_) classes.insert(cls);
  for (const auto& [s, cls] : stages_) classes.insert(cls);
  for (int n = 0; n <= max_count_; ++n) classes.insert(std::to_string(n));
  return {classes.begin(), classes.end()};
}

void Lexicon::validate_session(const GameplaySession& s) const {
  const std::string who = "session " + std::to_string(s.id) + ": ";
  if (!stages_.contains(s.stage_type)) {
    throw ValidationError(who + "unknown stage type '" + s.stage_type + "'");
  }
  for (const auto& e : s.events) {
    const RoleSchema& schema = this->schema(e.type);
    for (Role r : schema.mandatory) {
      if (!e.args.contains(r)) {
        throw ValidationError(who + "event " + std::to_string(e.id) + " (" +
                              std::string(to_string(e.type)) + ") lacks mandatory role " +
                              std::string(to_string(r)));
      }
    }
    for (const auto& [role, entity] : e.args) {
      if (!schema.allows(role)) {
        throw ValidationError(who + "event " + std::to_string(e.id) + " has role " +
                              std::string(to_string(role)) + " not allowed for " +
                              std::string(to_string(e.type)));
      }
      if (!has_entity(entity)) {
        throw ValidationError(who + "event " + std::to_string(e.id) + " uses unknown entity '" +
                              entity.token + "'");
      }
    }
  }
}

}  // namespace forge
