#include "forge/chunk.hpp"

#include "forge/errors.hpp"

namespace forge {

namespace {

constexpr std::array<std::string_view, 3> kSubsetNames = {"NT", "ET", "HT"};
constexpr std::array<std::string_view, 3> kQuestionTypeNames = {"event_centric", "counting",
                                                                "state"};
constexpr std::array<std::string_view, 3> kRelationNames = {"before", "after", "when"};
constexpr std::array<std::string_view, 2> kProbeNames = {"mario_state", "stage_type"};
constexpr std::array<std::string_view, 3> kSplitNames = {"train", "valid", "test"};

template <typename Enum, std::size_t N>
Enum lookup(const std::array<std::string_view, N>& names, std::string_view token,
            std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (names[i] == token) return static_cast<Enum>(i);
  }
  throw ParseError("unknown " + std::string(what) + " '" + std::string(token) + "'");
}

}  // namespace

std::string_view to_string(Subset s) { return kSubsetNames[static_cast<std::size_t>(s)]; }
std::string_view to_string(QuestionType q) { return kQuestionTypeNames[static_cast<std::size_t>(q)]; }
std::string_view to_string(Relation r) { return kRelationNames[static_cast<std::size_t>(r)]; }
std::string_view to_string(StateProbe p) { return kProbeNames[static_cast<std::size_t>(p)]; }
std::string_view to_string(Split s) { return kSplitNames[static_cast<std::size_t>(s)]; }

Subset parse_subset(std::string_view t) { return lookup<Subset>(kSubsetNames, t, "subset"); }
QuestionType parse_question_type(std::string_view t) {
  return lookup<QuestionType>(kQuestionTypeNames, t, "question type");
}
Relation parse_relation(std::string_view t) { return lookup<Relation>(kRelationNames, t, "relation"); }
Split parse_split(std::string_view t) { return lookup<Split>(kSplitNames, t, "split"); }

std::string SemanticChunk::predicate_name() const {
  if (qtype == QuestionType::State) return std::string(to_string(probe));
  return std::string(to_string(predicate));
}

void check_chunk(const SemanticChunk& c) {
  switch (c.qtype) {
    case QuestionType::EventCentric:
      if (!c.hole) throw ConsistencyError("event-centric chunk needs a hole");
      if (c.args.contains(*c.hole)) {
        throw ConsistencyError("event-centric chunk specifies its own hole role");
      }
      break;
    case QuestionType::Counting:
      if (c.hole) throw ConsistencyError("counting chunk must not have a hole");
      break;
    case QuestionType::State:
      if (c.hole || !c.args.empty()) {
        throw ConsistencyError("state chunk takes no arguments");
      }
      if (c.probe == StateProbe::StageType && c.constraint) {
        throw ConsistencyError("stage probe takes no temporal constraint");
      }
      if (c.probe == StateProbe::MarioState && c.constraint &&
          c.constraint->relation != Relation::When) {
        throw ConsistencyError("state probe only supports a 'when' constraint");
      }
      break;
  }
}

nlohmann::json chunk_to_json(const SemanticChunk& c) {
  nlohmann::json j = {{"qtype", std::string(to_string(c.qtype))},
                      {"predicate", c.predicate_name()},
                      {"args", args_to_json(c.args)},
                      {"target", c.target_event_id},
                      {"filler", c.filler}};
  j["hole"] = c.hole ? nlohmann::json(std::string(to_string(*c.hole))) : nlohmann::json(nullptr);
  if (c.constraint) {
    j["constraint"] = {{"relation", std::string(to_string(c.constraint->relation))},
                       {"reference", pattern_to_json(c.constraint->reference)}};
  } else {
    j["constraint"] = nullptr;
  }
  return j;
}

SemanticChunk chunk_from_json(const nlohmann::json& j) {
  SemanticChunk c;
  try {
    c.qtype = parse_question_type(j.at("qtype").get<std::string>());
    const auto predicate = j.at("predicate").get<std::string>();
    if (c.qtype == QuestionType::State) {
      if (predicate == "mario_state") {
        c.probe = StateProbe::MarioState;
      } else if (predicate == "stage_type") {
        c.probe = StateProbe::StageType;
      } else {
        throw ParseError("unknown state probe '" + predicate + "'");
      }
    } else {
      c.predicate = parse_event_type(predicate);
    }
    if (j.contains("args")) c.args = args_from_json(j.at("args"));
    if (j.contains("hole") && !j.at("hole").is_null()) {
      c.hole = parse_role(j.at("hole").get<std::string>());
    }
    if (j.contains("constraint") && !j.at("constraint").is_null()) {
      const auto& jc = j.at("constraint");
      c.constraint = TemporalConstraint{parse_relation(jc.at("relation").get<std::string>()),
                                        pattern_from_json(jc.at("reference"))};
    }
    c.target_event_id = j.value("target", EventId{0});
    c.filler = j.value("filler", std::string());
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed chunk: ") + ex.what());
  }
  return c;
}

nlohmann::json qa_to_json(const QAPair& qa) {
  nlohmann::json j = {{"id", qa.id},
                      {"q", qa.question},
                      {"a", qa.answer},
                      {"subset", std::string(to_string(qa.subset))},
                      {"qtype", std::string(to_string(qa.qtype))},
                      {"session", qa.session_id},
                      {"clip", {qa.clip.start_ms, qa.clip.end_ms}},
                      {"target", qa.clip.target_event_id},
                      {"template", qa.template_id},
                      {"chunk", chunk_to_json(qa.chunk)}};
  if (qa.split) j["split"] = std::string(to_string(*qa.split));
  return j;
}

QAPair qa_from_json(const nlohmann::json& j) {
  QAPair qa;
  try {
    qa.id = j.at("id").get<std::int64_t>();
    qa.question = j.at("q").get<std::string>();
    qa.answer = j.at("a").get<std::string>();
    qa.subset = parse_subset(j.at("subset").get<std::string>());
    qa.qtype = parse_question_type(j.at("qtype").get<std::string>());
    qa.session_id = j.at("session").get<SessionId>();
    const auto& clip = j.at("clip");
    if (!clip.is_array() || clip.size() != 2) throw ParseError("clip must be [start, end]");
    qa.clip = Clip{qa.session_id, clip[0].get<TimeMs>(), clip[1].get<TimeMs>(),
                   j.at("target").get<EventId>()};
    qa.template_id = j.value("template", std::string());
    qa.chunk = chunk_from_json(j.at("chunk"));
    if (j.contains("split") && !j.at("split").is_null()) {
      qa.split = parse_split(j.at("split").get<std::string>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("malformed QA pair: ") + ex.what());
  }
  return qa;
}

}  // namespace forge
