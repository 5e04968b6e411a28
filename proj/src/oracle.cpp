#include "forge/oracle.hpp"

#include <algorithm>
#include <cstdlib>

#include "forge/errors.hpp"

namespace forge::oracle {

namespace {

std::span<const Event> checked_view(const Clip& clip, const GameplaySession& session) {
  if (clip.session_id != session.id) {
    throw IdentityError("clip references session " + std::to_string(clip.session_id) +
                        " but was given session " + std::to_string(session.id));
  }
  return clip_events(clip, session);
}

std::vector<const Event*> matching(const EventPattern& pattern, std::span<const Event> view) {
  std::vector<const Event*> out;
  for (const Event& e : view) {
    if (pattern.matches(e)) out.push_back(&e);
  }
  return out;
}

const Event& unique_reference(const TemporalConstraint& c, std::span<const Event> view) {
  const auto refs = matching(c.reference, view);
  if (refs.empty()) {
    throw DanglingReferenceError("reference " + std::string(to_string(c.reference.type)) +
                                 " matches no event in the clip");
  }
  if (refs.size() > 1) {
    throw ConsistencyError("reference " + std::string(to_string(c.reference.type)) + " matches " +
                           std::to_string(refs.size()) + " events in the clip");
  }
  return *refs.front();
}

bool satisfies(Relation relation, TimeMs t, TimeMs ref) {
  switch (relation) {
    case Relation::After:
      return t > ref;
    case Relation::Before:
      return t < ref;
    case Relation::When:
      return std::llabs(t - ref) <= kWhenToleranceMs;
  }
  return false;
}

}  // namespace

std::vector<Event> match_events(const EventPattern& pattern, const Clip& clip,
                                const GameplaySession& session) {
  std::vector<Event> out;
  for (const Event* e : matching(pattern, checked_view(clip, session))) out.push_back(*e);
  return out;
}

std::size_t reference_matches(const TemporalConstraint& constraint, const Clip& clip,
                              const GameplaySession& session) {
  return matching(constraint.reference, checked_view(clip, session)).size();
}

Event resolve_reference(const TemporalConstraint& constraint, const Clip& clip,
                        const GameplaySession& session) {
  return unique_reference(constraint, checked_view(clip, session));
}

std::vector<Event> apply_constraint(const std::vector<Event>& candidates,
                                    const TemporalConstraint& constraint, const Clip& clip,
                                    const GameplaySession& session) {
  const TimeMs ref = unique_reference(constraint, checked_view(clip, session)).time_ms;
  std::vector<Event> out;
  for (const Event& e : candidates) {
    if (satisfies(constraint.relation, e.time_ms, ref)) out.push_back(e);
  }
  return out;
}

AnswerSet answer(const SemanticChunk& chunk, const Clip& clip, const GameplaySession& session,
                 const Lexicon& lexicon) {
  check_chunk(chunk);
  const auto view = checked_view(clip, session);
  AnswerSet out;
  if (chunk.qtype == QuestionType::State) {
    if (chunk.probe == StateProbe::StageType) {
      out.insert(lexicon.stage_class(session.stage_type));
      return out;
    }
    if (chunk.constraint) {
      const Event& ref = unique_reference(*chunk.constraint, view);
      out.insert(lexicon.state_class(state_at(session, ref.time_ms)));
      return out;
    }
    const TimeMs last = std::min(clip.end_ms, session.duration_ms - 1);
    for (MarioState s : states_during(session, clip.start_ms, last)) {
      out.insert(lexicon.state_class(s));
    }
    return out;
  }

  auto matched = matching(chunk.pattern(), view);
  if (chunk.constraint) {
    const TimeMs ref = unique_reference(*chunk.constraint, view).time_ms;
    std::erase_if(matched, [&](const Event* e) {
      return !satisfies(chunk.constraint->relation, e->time_ms, ref);
    });
  }

  if (chunk.qtype == QuestionType::Counting) {
    out.insert(std::to_string(matched.size()));
    return out;
  }
  for (const Event* e : matched) {
    auto it = e->args.find(*chunk.hole);
    out.insert(it != e->args.end() ? lexicon.answer_class(it->second)
                                   : std::string(kMissingAnswer));
  }
  return out;
}

bool is_unique(const SemanticChunk& chunk, const Clip& clip, const GameplaySession& session,
               const Lexicon& lexicon) {
  return answer(chunk, clip, session, lexicon).size() == 1;
}

}  // namespace forge::oracle
