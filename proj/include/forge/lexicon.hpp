#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/model.hpp"

namespace forge {

struct RoleSchema {
  std::vector<Role> mandatory;
  std::vector<Role> optional;

  bool allows(Role role) const;
  bool is_mandatory(Role role) const;
};

struct EntityEntry {
  EntityId id;
  std::string answer_class;                  // "Para Goomba"
  std::string name;                          // in-sentence name, defaults to the class
  std::map<std::string, std::string> forms;  // "plural", "passive", "indef", ...
  std::map<Role, std::string> role_phrases;  // means -> "by stomping"
};

/// Entity vocabulary, event role schema and linguistic realization forms.
///
/// Loaded from JSON so the answer vocabulary can be changed without code.
/// Rendering forms understood everywhere:
///   ""/"name"  in-sentence name
///   "class"    answer-class string
///   "indef"    name with an a/an article (or the "indef" override)
///   "plural"   "plural" override, else name + "s"
///   other      the entity's named form; LexiconError when missing
class Lexicon {
 public:
  static Lexicon from_json(const nlohmann::json& j);
  static Lexicon load(const std::filesystem::path& path);

  const RoleSchema& schema(EventType type) const;

  bool has_entity(const EntityId& id) const;
  const EntityEntry& entity(const EntityId& id) const;
  const std::map<EntityId, EntityEntry>& entities() const { return entities_; }

  const std::string& answer_class(const EntityId& id) const;
  const std::string& state_class(MarioState state) const;
  const std::string& stage_class(const std::string& stage_type) const;
  std::string count_class(long count) const;
  int max_count() const { return max_count_; }
  const std::vector<std::string>& stage_types() const { return stage_order_; }

  /// Entity rendered in the given form (see class comment).
  std::string render(const EntityId& id, std::string_view form) const;
  /// Phrase realizing `id` as the filler of `role`, e.g. "by stomping";
  /// falls back to the name.
  std::string role_phrase(const EntityId& id, Role role) const;

  /// Roles named by the reference clauses of `type`; a temporal reference to
  /// an event of this type is identified by exactly these arguments.
  const std::vector<Role>& clause_roles(EventType type) const;
  /// Reference clause such as "throwing a shell" or "Mario hit a coin block".
  std::string render_clause(EventType type, const ArgMap& args, std::string_view form) const;
  bool has_clause_form(std::string_view form) const;

  /// Sorted, de-duplicated set of every answer class the lexicon can emit.
  std::vector<std::string> answer_vocabulary() const;

  /// Schema checks that need the lexicon: known stage type, known
  /// entities, allowed and mandatory roles. Throws ValidationError naming
  /// the session.
  void validate_session(const GameplaySession& session) const;

 private:
  std::map<EventType, RoleSchema> schemas_;
  std::map<EventType, std::map<std::string, std::string>> clauses_;
  std::map<EventType, std::vector<Role>> clause_roles_;
  std::map<EntityId, EntityEntry> entities_;
  std::map<MarioState, std::string> states_;
  std::map<std::string, std::string> stages_;
  std::vector<std::string> stage_order_;
  std::vector<std::string> clause_forms_;
  int max_count_ = 10;
};

}  // namespace forge
