#include "doctest.h"
#include "fixtures.hpp"
#include "forge/qa_generator.hpp"
#include "forge/simulator.hpp"
#include "forge/validation.hpp"

using namespace forge;

namespace {

struct Corpus {
  std::vector<GameplaySession> sessions;
  std::vector<QAPair> data;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    out.sessions = simulate_batch(SimulatorConfig::load(fx::data("simulator.json")), 12, 6);
    out.data = generate_dataset(out.sessions, fx::pool(), fx::lexicon(), GeneratorConfig{}, 12);
    return out;
  }();
  return c;
}

ValidationReport run(const std::vector<QAPair>& data) {
  return validate_dataset(data, corpus().sessions, fx::lexicon(), &fx::pool());
}

const QAPair& first(QuestionType q, bool constrained) {
  for (const auto& qa : corpus().data) {
    if (qa.qtype == q && qa.chunk.constraint.has_value() == constrained) return qa;
  }
  throw std::runtime_error("no such example in the corpus");
}

}  // namespace

TEST_CASE("a generated corpus validates") {
  auto r = run(corpus().data);
  CHECK(r.ok());
  CHECK(r.examples == corpus().data.size());
  CHECK(r.checked.at("oracle_answer") == r.examples);
  CHECK(r.checked.at("realization") == r.examples);
}

TEST_CASE("tampering is caught") {
  auto wrong_answer = first(QuestionType::Counting, false);
  wrong_answer.answer = wrong_answer.answer == "1" ? "2" : "1";
  auto r = run({wrong_answer});
  CHECK(r.failures.contains("oracle_answer"));
  CHECK(r.failures.contains("realization"));

  auto wrong_subset = first(QuestionType::EventCentric, true);
  wrong_subset.subset = Subset::NT;
  r = run({wrong_subset});
  CHECK(r.failures.contains("subset"));
  CHECK(r.failures.contains("temporal_marker"));

  auto lost_session = first(QuestionType::State, false);
  lost_session.session_id = 999;
  r = run({lost_session});
  CHECK(r.failures.contains("session_known"));

  auto moved_clip = first(QuestionType::Counting, true);
  moved_clip.clip.start_ms = moved_clip.clip.end_ms - 100;
  r = run({moved_clip});
  CHECK(r.failures.contains("structure"));

  auto twice = corpus().data.front();
  r = run({twice, twice});
  CHECK(r.failures.at("unique_id") == 1);

  auto j = validation_to_json(r);
  CHECK(j["ok"] == false);
  CHECK(!j["messages"].empty());
}
