#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/model.hpp"

namespace forge {

enum class Subset : std::uint8_t { NT, ET, HT };
enum class QuestionType : std::uint8_t { EventCentric, Counting, State };
enum class Relation : std::uint8_t { Before, After, When };
enum class StateProbe : std::uint8_t { MarioState, StageType };
enum class Split : std::uint8_t { Train, Valid, Test };

inline constexpr std::array<Subset, 3> kAllSubsets = {Subset::NT, Subset::ET, Subset::HT};
inline constexpr std::array<QuestionType, 3> kAllQuestionTypes = {
    QuestionType::EventCentric, QuestionType::Counting, QuestionType::State};

std::string_view to_string(Subset s);
std::string_view to_string(QuestionType q);
std::string_view to_string(Relation r);
std::string_view to_string(StateProbe p);
std::string_view to_string(Split s);
Subset parse_subset(std::string_view token);
QuestionType parse_question_type(std::string_view token);
Relation parse_relation(std::string_view token);
Split parse_split(std::string_view token);

/// Half-width of the window in which an event "when" reference counts as
/// simultaneous with a candidate event.
inline constexpr TimeMs kWhenToleranceMs = 250;

struct TemporalConstraint {
  Relation relation = Relation::After;
  EventPattern reference;

  bool operator==(const TemporalConstraint&) const = default;
};

/// Machine-readable meaning of a question: a predicate with one role
/// eliminated (event-centric), a count pattern (counting) or a state probe.
struct SemanticChunk {
  QuestionType qtype = QuestionType::EventCentric;
  EventType predicate = EventType::Kill;  // event-centric and counting
  StateProbe probe = StateProbe::MarioState;  // state
  std::optional<Role> hole;  // event-centric only
  ArgMap args;               // the specified (non-hole) arguments
  std::optional<TemporalConstraint> constraint;
  EventId target_event_id = 0;
  // Token behind the hole as known to the generator: entity id, count,
  // state or stage token. Used for realization only; the oracle never reads it.
  std::string filler;

  EventPattern pattern() const { return {predicate, args}; }
  std::string predicate_name() const;

  bool operator==(const SemanticChunk&) const = default;
};

/// Throws ConsistencyError when the chunk violates its per-type shape rules.
void check_chunk(const SemanticChunk& chunk);

struct QAPair {
  std::int64_t id = 0;
  std::string question;
  std::string answer;
  SemanticChunk chunk;
  Subset subset = Subset::NT;
  QuestionType qtype = QuestionType::EventCentric;
  Clip clip;
  std::string template_id;
  SessionId session_id = 0;
  std::optional<Split> split;

  bool operator==(const QAPair&) const = default;
};

nlohmann::json chunk_to_json(const SemanticChunk& chunk);
SemanticChunk chunk_from_json(const nlohmann::json& j);
nlohmann::json qa_to_json(const QAPair& qa);
QAPair qa_from_json(const nlohmann::json& j);

}  // namespace forge
