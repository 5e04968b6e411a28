#pragma once

#include <set>
#include <string>
#include <vector>

#include "forge/chunk.hpp"
#include "forge/lexicon.hpp"
#include "forge/model.hpp"

namespace forge::oracle {

/// Answer classes for a chunk. Counting chunks always yield one element.
using AnswerSet = std::set<std::string>;

/// Placeholder class for a matched event that lacks the hole role. It never
/// belongs to the answer vocabulary, so a set containing it is not valid.
inline constexpr std::string_view kMissingAnswer = "<missing>";

/// Clip events matching the pattern, time-sorted.
std::vector<Event> match_events(const EventPattern& pattern, const Clip& clip,
                                const GameplaySession& session);

/// The single clip event the constraint's reference pattern denotes.
/// No match raises DanglingReferenceError; several raise ConsistencyError.
Event resolve_reference(const TemporalConstraint& constraint, const Clip& clip,
                        const GameplaySession& session);

/// Number of clip events matching the reference pattern.
std::size_t reference_matches(const TemporalConstraint& constraint, const Clip& clip,
                              const GameplaySession& session);

/// Keeps candidates strictly after / strictly before the reference event, or
/// within kWhenToleranceMs of it for `when`.
std::vector<Event> apply_constraint(const std::vector<Event>& candidates,
                                    const TemporalConstraint& constraint, const Clip& clip,
                                    const GameplaySession& session);

/// Brute-force answer by scanning the clip's event log.
AnswerSet answer(const SemanticChunk& chunk, const Clip& clip, const GameplaySession& session,
                 const Lexicon& lexicon);

bool is_unique(const SemanticChunk& chunk, const Clip& clip, const GameplaySession& session,
               const Lexicon& lexicon);

}  // namespace forge::oracle
