#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "forge/chunk.hpp"
#include "forge/lexicon.hpp"
#include "forge/text.hpp"

namespace forge {

/// What a template can express: question type, predicate, eliminated role,
/// the set of specified roles it names, and whether it carries a temporal
/// clause.
struct ChunkSignature {
  QuestionType qtype = QuestionType::EventCentric;
  std::string predicate;
  std::optional<Role> hole;
  std::vector<Role> given;  // sorted
  bool constrained = false;

  std::string describe() const;
  bool operator==(const ChunkSignature&) const = default;
};

ChunkSignature signature_of(const SemanticChunk& chunk);

/// Question template. Surface slots:
///   {arg:ROLE}             role phrase of the argument ("by stomping")
///   {arg:ROLE:FORM}        argument in a lexicon form ("indef", "plural", ...)
///   {temporal_clause}      relation word + gerund reference clause
///   {temporal_clause:FORM} relation word + clause in the named form
struct Template {
  std::string id;
  ChunkSignature signature;
  std::string surface;
  std::vector<text::Segment> segments;
};

class TemplatePool {
 public:
  /// Parses and validates templates against the lexicon. Errors name the
  /// template id and, when loading from a file, its line.
  static TemplatePool from_json(const nlohmann::json& j, const Lexicon& lexicon);
  static TemplatePool load(const std::filesystem::path& path, const Lexicon& lexicon);

  const std::vector<Template>& templates() const { return templates_; }
  std::vector<const Template*> matching(const SemanticChunk& chunk) const;
  bool covers(const SemanticChunk& chunk) const;
  const Template& by_id(const std::string& id) const;

 private:
  std::vector<Template> templates_;
};

/// Seeded uniform choice among templates matching the chunk's signature.
/// Throws CoverageError naming the signature when none matches.
const Template& select_template(const TemplatePool& pool, const SemanticChunk& chunk,
                                std::uint64_t seed);

struct Realization {
  std::string question;
  std::string answer;
};

/// Fills the template from the chunk and renders the answer class.
/// Throws LexiconError for missing lexicon entries.
Realization realize(const Template& tmpl, const SemanticChunk& chunk, const Lexicon& lexicon);

/// Result of parsing a question back through a template's slot grammar.
struct RecoveredSlots {
  ArgMap args;
  std::optional<std::string> temporal_clause;
};

/// Inverse of realize for the argument slots: matches `question` against the
/// template and maps each captured phrase back to the entity that renders to
/// it. Empty when the question does not fit the template.
std::optional<RecoveredSlots> recover_slots(const Template& tmpl, const std::string& question,
                                            const Lexicon& lexicon);

/// Words that mark a temporal clause; never present in NT questions.
inline constexpr std::array<std::string_view, 3> kTemporalMarkers = {"before", "after", "when"};

bool has_temporal_marker(std::string_view sentence);

}  // namespace forge
