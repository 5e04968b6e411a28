#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

#include "forge/chunk.hpp"
#include "forge/lexicon.hpp"
#include "forge/model.hpp"
#include "forge/templates.hpp"

namespace forge {

using RelationMap = std::map<QuestionType, std::vector<Relation>>;

/// before/after for event-centric and counting questions, when for state.
RelationMap default_relations();

struct GeneratorConfig {
  double target_probability = 1.0;
  std::size_t per_subset_per_clip = 1;
  std::map<QuestionType, double> qtype_weights = {
      {QuestionType::EventCentric, 0.6}, {QuestionType::Counting, 0.3}, {QuestionType::State, 0.1}};
  RelationMap relations = default_relations();
  std::size_t max_same_qa = 50;  // 0 disables duplicate capping

  static GeneratorConfig from_json(const nlohmann::json& j);
  static GeneratorConfig load(const std::filesystem::path& path);
};

/// Candidate semantic chunks for a target event inside its clip:
///   * one event-centric chunk per filled role of the target (the other
///     filled roles stay specified; a variant without optional roles is added)
///   * counting chunks for every event type present, wildcarded and per
///     observed argument value
///   * the stage probe and the Mario-state probe
/// each unconstrained and, for every relation allowed for its question type,
/// constrained by every other clip event as reference. Fillers are computed
/// from the log directly, independently of the oracle.
std::vector<SemanticChunk> form_chunks(const Event& target, const Clip& clip,
                                       const GameplaySession& session, const Lexicon& lexicon,
                                       const RelationMap& relations = default_relations());

struct Candidate {
  SemanticChunk chunk;
  Subset subset = Subset::NT;
};

/// Chunks that survive every generation check: unambiguous reference,
/// template coverage, oracle uniqueness (agreeing with the filler), count
/// within the answer vocabulary, and no type-level distractor for NT
/// event-centric questions. Throws ConsistencyError if the oracle and the
/// generator disagree on an answer.
std::vector<Candidate> enumerate_candidates(const Event& target, const Clip& clip,
                                            const GameplaySession& session,
                                            const Lexicon& lexicon, const TemplatePool& pool,
                                            const RelationMap& relations = default_relations());

/// Full pipeline over sessions: pick targets, sample clips, enumerate
/// candidates, choose per subset, select templates, realize. Deterministic in
/// (inputs, seed); ids are assigned in session/target order. Duplicate capping
/// is applied when config.max_same_qa > 0.
std::vector<QAPair> generate_dataset(const std::vector<GameplaySession>& sessions,
                                     const TemplatePool& pool, const Lexicon& lexicon,
                                     const GeneratorConfig& config, std::uint64_t seed);

}  // namespace forge
