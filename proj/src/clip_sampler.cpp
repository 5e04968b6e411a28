#include "forge/clip_sampler.hpp"

#include <algorithm>

#include "forge/errors.hpp"
#include "forge/oracle.hpp"
#include "forge/rng.hpp"

namespace forge {

Clip sample_clip(const GameplaySession& session, const Event& target, std::uint64_t seed) {
  if (session.duration_ms < kMinClipMs) {
    throw UnsampleableError("session " + std::to_string(session.id) + " lasts " +
                            std::to_string(session.duration_ms) + " ms, shorter than a clip");
  }
  const Event* found = session.find_event(target.id);
  if (found == nullptr || found->time_ms != target.time_ms) {
    throw IdentityError("target event " + std::to_string(target.id) + " is not in session " +
                        std::to_string(session.id));
  }
  Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(session.id),
                      static_cast<std::uint64_t>(target.id)));
  const TimeMs length = std::min(rng.uniform_int(kMinClipMs, kMaxClipMs), session.duration_ms);
  const TimeMs lo = std::max<TimeMs>(0, target.time_ms - length);
  const TimeMs hi = std::min(target.time_ms, session.duration_ms - length);
  const TimeMs start = rng.uniform_int(lo, hi);
  return Clip{session.id, start, start + length, target.id};
}

std::vector<Event> find_distractors(const Clip& clip, const GameplaySession& session,
                                    const Event& target) {
  std::vector<Event> out;
  for (const Event& e : events_in(clip, session)) {
    if (e.type == target.type && e.id != target.id) out.push_back(e);
  }
  return out;
}

Subset classify_subset(const Clip& clip, const GameplaySession& session,
                       const SemanticChunk& chunk) {
  const auto in_clip = events_in(clip, session);
  auto target = std::find_if(in_clip.begin(), in_clip.end(),
                             [&](const Event& e) { return e.id == chunk.target_event_id; });
  if (target == in_clip.end()) {
    throw ConsistencyError("chunk target event " + std::to_string(chunk.target_event_id) +
                           " is not inside the clip");
  }
  if (!chunk.constraint) return Subset::NT;

  switch (chunk.qtype) {
    case QuestionType::EventCentric:
      return find_distractors(clip, session, *target).empty() ? Subset::ET : Subset::HT;
    case QuestionType::Counting: {
      const auto all = oracle::match_events(chunk.pattern(), clip, session);
      const auto kept = oracle::apply_constraint(all, *chunk.constraint, clip, session);
      return kept.size() == all.size() ? Subset::ET : Subset::HT;
    }
    case QuestionType::State: {
      const TimeMs last = std::min(clip.end_ms, session.duration_ms - 1);
      return states_during(session, clip.start_ms, last).size() <= 1 ? Subset::ET : Subset::HT;
    }
  }
  return Subset::NT;
}

}  // namespace forge
