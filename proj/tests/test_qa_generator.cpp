#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "forge/clip_sampler.hpp"
#include "forge/errors.hpp"
#include "forge/oracle.hpp"
#include "forge/qa_generator.hpp"
#include "forge/simulator.hpp"

using namespace forge;

namespace {

bool has_chunk(const std::vector<SemanticChunk>& chunks, QuestionType q, EventType p, std::optional<Role> hole,
               const ArgMap& args, bool constrained = false) {
  return std::any_of(chunks.begin(), chunks.end(), [&](const SemanticChunk& c) {
    return c.qtype == q && c.predicate == p && c.hole == hole && c.args == args &&
           c.constraint.has_value() == constrained;
  });
}

std::vector<GameplaySession> corpus(std::size_t n, std::uint64_t seed) {
  auto config = SimulatorConfig::load(fx::data("simulator.json"));
  return simulate_batch(config, seed, n);
}

}  // namespace

TEST_CASE("chunks for the stomp target") {
  const auto s = fx::counting_example();
  const auto chunks = form_chunks(s.events[4], fx::whole(s, 5), s, fx::lexicon());
  CHECK(has_chunk(chunks, QuestionType::EventCentric, EventType::Kill, Role::Patient,
                  fx::args({{Role::Means, "stomping"}})));
  CHECK(has_chunk(chunks, QuestionType::EventCentric, EventType::Kill, Role::Means,
                  fx::args({{Role::Patient, "PGoomba"}})));
  CHECK_FALSE(has_chunk(chunks, QuestionType::EventCentric, EventType::Kill, Role::Location,
                        fx::args({{Role::Patient, "PGoomba"}, {Role::Means, "stomping"}})));
  const auto unconstrained_ec = std::count_if(chunks.begin(), chunks.end(), [](const SemanticChunk& c) {
    return c.qtype == QuestionType::EventCentric && !c.constraint;
  });
  CHECK(unconstrained_ec == 2);
  for (const auto& c : chunks) CHECK_NOTHROW(check_chunk(c));
}

TEST_CASE("optional roles give an extra chunk without them") {
  auto s = fx::SessionBuilder(4000)
               .event(1000, EventType::Kill,
                      fx::args({{Role::Patient, "GKoopa"}, {Role::Means, "stomping"}, {Role::Location, "hill"}}))
               .build();
  auto chunks = form_chunks(s.events[0], fx::whole(s, 1), s, fx::lexicon());
  CHECK(has_chunk(chunks, QuestionType::EventCentric, EventType::Kill, Role::Patient,
                  fx::args({{Role::Means, "stomping"}, {Role::Location, "hill"}})));
  CHECK(has_chunk(chunks, QuestionType::EventCentric, EventType::Kill, Role::Patient,
                  fx::args({{Role::Means, "stomping"}})));
  CHECK(has_chunk(chunks, QuestionType::EventCentric, EventType::Kill, Role::Location,
                  fx::args({{Role::Patient, "GKoopa"}, {Role::Means, "stomping"}})));
}

TEST_CASE("single mandatory role gives one event-centric chunk") {
  auto s = fx::SessionBuilder(4000).event(1000, EventType::Hit, fx::args({{Role::Patient, "coin_block"}})).build();
  auto chunks = form_chunks(s.events[0], fx::whole(s, 1), s, fx::lexicon());
  auto ec = std::count_if(chunks.begin(), chunks.end(),
                          [](const SemanticChunk& c) { return c.qtype == QuestionType::EventCentric; });
  CHECK(ec == 1);
}

TEST_CASE("five fireballs") {
  fx::SessionBuilder b(6000, "overground", MarioState::FireForm);
  for (TimeMs t : {400, 900, 1400, 2500, 3300}) b.event(t, EventType::Shoot, fx::args({{Role::Means, "fireball"}}));
  auto s = b.build();
  auto candidates = enumerate_candidates(s.events[0], fx::whole(s, 1), s, fx::lexicon(), fx::pool());
  auto it = std::find_if(candidates.begin(), candidates.end(), [](const Candidate& c) {
    return c.chunk.qtype == QuestionType::Counting && c.chunk.args == fx::args({{Role::Means, "fireball"}}) &&
           !c.chunk.constraint;
  });
  REQUIRE(it != candidates.end());
  CHECK(it->chunk.filler == "5");
  CHECK(it->subset == Subset::NT);
  auto r = realize(fx::pool().by_id("cnt-shoot-means-1"), it->chunk, fx::lexicon());
  CHECK(r.question == "How many fireballs did Mario shoot?");
  CHECK(r.answer == "5");

  // Every shoot has the same type, so no NT event-centric question survives.
  CHECK(std::none_of(candidates.begin(), candidates.end(), [](const Candidate& c) {
    return c.chunk.qtype == QuestionType::EventCentric && c.subset == Subset::NT;
  }));
}

TEST_CASE("counts beyond the vocabulary are not asked") {
  fx::SessionBuilder b(6000);
  for (int i = 0; i < 12; ++i) b.event(200 + 400 * i, EventType::Jump);
  auto s = b.build();
  auto candidates = enumerate_candidates(s.events[0], fx::whole(s, 1), s, fx::lexicon(), fx::pool());
  for (const auto& c : candidates) {
    if (c.chunk.qtype == QuestionType::Counting) CHECK(std::stol(c.chunk.filler) <= 10);
  }
}

TEST_CASE("target must be inside the clip") {
  auto s = fx::SessionBuilder(10000).event(500, EventType::Jump).event(8000, EventType::Jump).build();
  CHECK_THROWS_AS(form_chunks(s.events[1], Clip{0, 0, 3000, 2}, s, fx::lexicon()), ConsistencyError);
}

TEST_CASE("generated corpus agrees with the oracle") {
  const auto sessions = corpus(12, 3);
  GeneratorConfig config;
  const auto data = generate_dataset(sessions, fx::pool(), fx::lexicon(), config, 3);
  REQUIRE(data.size() > 500);
  std::map<Subset, std::size_t> subsets;
  for (const auto& qa : data) {
    const auto& s = sessions.at(static_cast<std::size_t>(qa.session_id));
    auto answers = oracle::answer(qa.chunk, qa.clip, s, fx::lexicon());
    REQUIRE(answers.size() == 1);
    CHECK(*answers.begin() == qa.answer);
    CHECK(has_temporal_marker(qa.question) == (qa.subset != Subset::NT));
    CHECK(classify_subset(qa.clip, s, qa.chunk) == qa.subset);
    ++subsets[qa.subset];
  }
  CHECK(subsets.size() == 3);
}

TEST_CASE("realized arguments survive a round trip through the template") {
  const auto sessions = corpus(6, 8);
  const auto data = generate_dataset(sessions, fx::pool(), fx::lexicon(), GeneratorConfig{}, 8);
  REQUIRE(!data.empty());
  for (const auto& qa : data) {
    const auto& t = fx::pool().by_id(qa.template_id);
    auto got = recover_slots(t, qa.question, fx::lexicon());
    REQUIRE(got.has_value());
    CAPTURE(qa.question);
    CHECK(got->args == qa.chunk.args);
    CHECK(got->temporal_clause.has_value() == qa.chunk.constraint.has_value());
  }
}

TEST_CASE("generation is deterministic") {
  const auto sessions = corpus(5, 21);
  auto a = generate_dataset(sessions, fx::pool(), fx::lexicon(), GeneratorConfig{}, 21);
  auto b = generate_dataset(sessions, fx::pool(), fx::lexicon(), GeneratorConfig{}, 21);
  CHECK(a == b);
  auto c = generate_dataset(sessions, fx::pool(), fx::lexicon(), GeneratorConfig{}, 22);
  CHECK_FALSE(a == c);
  for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i - 1].id < a[i].id);
}

TEST_CASE("generator config") {
  auto c = GeneratorConfig::load(fx::data("generator.json"));
  CHECK(c.max_same_qa == 50);
  CHECK(c.relations.at(QuestionType::State) == std::vector{Relation::When});
  CHECK_THROWS_AS(GeneratorConfig::from_json({{"target_probability", 1.5}}), ConfigError);
  CHECK_THROWS_AS(GeneratorConfig::from_json({{"relations", {{"state", {"before"}}}}}), ConfigError);
  CHECK_THROWS_AS(GeneratorConfig::from_json({{"qtype_weights", {{"yes_no", 1.0}}}}), ConfigError);

  // Only state questions when the other weights are zero.
  auto only_state = GeneratorConfig::from_json({{"qtype_weights", {{"event_centric", 0}, {"counting", 0}, {"state", 1}}}});
  auto data = generate_dataset(corpus(2, 1), fx::pool(), fx::lexicon(), only_state, 1);
  REQUIRE(!data.empty());
  for (const auto& qa : data) CHECK(qa.qtype == QuestionType::State);
}
