#include "forge/validation.hpp"

#include <set>

#include "forge/clip_sampler.hpp"
#include "forge/errors.hpp"
#include "forge/oracle.hpp"

namespace forge {

namespace {

class Recorder {
 public:
  Recorder(ValidationReport& report, std::size_t max_messages)
      : report_(report), max_messages_(max_messages) {}

  void check(const QAPair& qa, const std::string& name, bool passed, const std::string& detail = {}) {
    ++report_.checked[name];
    if (passed) return;
    ++report_.failures[name];
    if (report_.messages.size() < max_messages_) {
      std::string msg = "example " + std::to_string(qa.id) + ": " + name;
      if (!detail.empty()) msg += " (" + detail + ")";
      report_.messages.push_back(std::move(msg));
    }
  }

 private:
  ValidationReport& report_;
  std::size_t max_messages_;
};

std::string join(const oracle::AnswerSet& answers) {
  std::string out = "{";
  for (const auto& a : answers) out += (out.size() > 1 ? ", " : "") + a;
  return out + "}";
}

void validate_one(const QAPair& qa, const GameplaySession& session, const Lexicon& lexicon,
                  const TemplatePool* templates, const std::set<std::string>& vocabulary,
                  Recorder& rec) {
  try {
    check_clip(qa.clip, session);
    check_chunk(qa.chunk);
  } catch (const Error& e) {
    rec.check(qa, "structure", false, e.what());
    return;
  }
  rec.check(qa, "structure", true);
  rec.check(qa, "qtype", qa.qtype == qa.chunk.qtype);

  const Event* target = session.find_event(qa.chunk.target_event_id);
  if (target == nullptr || !qa.clip.contains(target->time_ms)) {
    rec.check(qa, "target_in_clip", false);
    return;
  }
  rec.check(qa, "target_in_clip", true);

  if (qa.chunk.constraint) {
    const auto n = oracle::reference_matches(*qa.chunk.constraint, qa.clip, session);
    rec.check(qa, "reference_unique", n == 1, std::to_string(n) + " matches");
    if (n != 1) return;
  }

  const auto answers = oracle::answer(qa.chunk, qa.clip, session, lexicon);
  rec.check(qa, "oracle_singleton", answers.size() == 1, join(answers));
  rec.check(qa, "oracle_answer", answers.size() == 1 && *answers.begin() == qa.answer,
            "stored '" + qa.answer + "', oracle " + join(answers));
  rec.check(qa, "answer_vocabulary", vocabulary.contains(qa.answer), qa.answer);

  const Subset subset = classify_subset(qa.clip, session, qa.chunk);
  rec.check(qa, "subset", subset == qa.subset,
            "stored " + std::string(to_string(qa.subset)) + ", recomputed " +
                std::string(to_string(subset)));

  const bool marked = has_temporal_marker(qa.question);
  rec.check(qa, "temporal_marker", marked == (qa.subset != Subset::NT), qa.question);

  if (qa.qtype == QuestionType::EventCentric) {
    const auto distractors = find_distractors(qa.clip, session, *target).size();
    const bool expected = qa.subset == Subset::HT ? distractors >= 1 : distractors == 0;
    rec.check(qa, "distractors", expected, std::to_string(distractors) + " distractors");
  }

  if (qa.qtype == QuestionType::Counting && qa.chunk.constraint) {
    SemanticChunk plain = qa.chunk;
    plain.constraint.reset();
    const auto unconstrained = oracle::answer(plain, qa.clip, session, lexicon);
    const bool differs = unconstrained != answers;
    rec.check(qa, "count_constraint_effect", differs == (qa.subset == Subset::HT),
              "constrained " + join(answers) + ", unconstrained " + join(unconstrained));
  }

  if (templates != nullptr) {
    try {
      const Template& tmpl = templates->by_id(qa.template_id);
      const Realization r = realize(tmpl, qa.chunk, lexicon);
      rec.check(qa, "realization", r.question == qa.question && r.answer == qa.answer,
                "template gives '" + r.question + "' / '" + r.answer + "'");
    } catch (const Error& e) {
      rec.check(qa, "realization", false, e.what());
    }
  }
}

}  // namespace

ValidationReport validate_dataset(const std::vector<QAPair>& examples,
                                  const std::vector<GameplaySession>& sessions,
                                  const Lexicon& lexicon, const TemplatePool* templates,
                                  std::size_t max_messages) {
  ValidationReport report;
  Recorder rec(report, max_messages);
  std::map<SessionId, const GameplaySession*> by_id;
  for (const auto& s : sessions) by_id.emplace(s.id, &s);
  const auto vocab_list = lexicon.answer_vocabulary();
  const std::set<std::string> vocabulary(vocab_list.begin(), vocab_list.end());

  std::set<std::int64_t> ids;
  for (const auto& qa : examples) {
    ++report.examples;
    rec.check(qa, "unique_id", ids.insert(qa.id).second);
    auto it = by_id.find(qa.session_id);
    rec.check(qa, "session_known", it != by_id.end(), "session " + std::to_string(qa.session_id));
    if (it == by_id.end()) continue;
    try {
      validate_one(qa, *it->second, lexicon, templates, vocabulary, rec);
    } catch (const Error& e) {
      rec.check(qa, "replay", false, e.what());
    }
  }
  return report;
}

nlohmann::json validation_to_json(const ValidationReport& report) {
  return {{"examples", report.examples},
          {"ok", report.ok()},
          {"checked", report.checked},
          {"failures", report.failures},
          {"messages", report.messages}};
}

}  // namespace forge
