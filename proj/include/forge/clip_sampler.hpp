#pragma once

#include <cstdint>
#include <vector>

#include "forge/chunk.hpp"
#include "forge/model.hpp"

namespace forge {

/// Samples a clip containing `target`: duration uniform in [3000, 6000] ms
/// (capped by the session), placement uniform among windows that contain the
/// target and stay inside the session. Throws UnsampleableError for sessions
/// shorter than 3000 ms.
Clip sample_clip(const GameplaySession& session, const Event& target, std::uint64_t seed);

/// In-clip events sharing the target's type, excluding the target; arguments
/// are ignored.
std::vector<Event> find_distractors(const Clip& clip, const GameplaySession& session,
                                    const Event& target);

/// Temporal-difficulty subset of a chunk asked about a clip.
///
/// No constraint is NT. With a constraint:
///   event-centric  ET iff the target has no type-level distractor
///   counting       ET iff the constraint leaves the counted set unchanged
///   mario state    ET iff Mario's state is constant over the clip
/// and HT otherwise. Throws ConsistencyError when the chunk's target event is
/// not inside the clip.
Subset classify_subset(const Clip& clip, const GameplaySession& session,
                       const SemanticChunk& chunk);

}  // namespace forge
