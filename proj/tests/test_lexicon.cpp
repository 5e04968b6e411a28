#include "doctest.h"
#include "fixtures.hpp"
#include "forge/errors.hpp"
#include "forge/lexicon.hpp"

using namespace forge;

namespace {

nlohmann::json minimal_lexicon() {
  auto j = nlohmann::json::parse(R"({
    "max_count": 3,
    "events": {},
    "entities": {"Goomba": {"class": "Goomba"}, "shell": {"class": "Shell", "name": "shell"}},
    "states": {"small": "Small", "super": "Super", "fire_form": "Fire form"},
    "stage_types": {"cave": "Cave"}
  })");
  for (EventType t : kAllEventTypes) {
    j["events"][std::string(to_string(t))] = {
        {"clause", {{"gerund", "doing"}, {"past", "Mario did"}, {"present", "Mario does"}}}};
  }
  return j;
}

}  // namespace

TEST_CASE("answer vocabulary of the shipped lexicon") {
  const auto& lex = fx::lexicon();
  auto vocab = lex.answer_vocabulary();
  // 24 entity classes, 3 states, 3 stage types, counts 0..10.
  CHECK(vocab.size() == 41);
  CHECK(std::is_sorted(vocab.begin(), vocab.end()));
  for (const char* c : {"Para Goomba", "Green Koopa Troopa", "Hill", "Fire form", "Cave", "0", "10"}) {
    CHECK(std::find(vocab.begin(), vocab.end(), c) != vocab.end());
  }
  CHECK(lex.count_class(5) == "5");
  CHECK_THROWS_AS(lex.count_class(11), LexiconError);
}

TEST_CASE("entity forms") {
  const auto& lex = fx::lexicon();
  CHECK(lex.answer_class(EntityId{"PGoomba"}) == "Para Goomba");
  CHECK(lex.role_phrase(EntityId{"stomping"}, Role::Means) == "by stomping");
  CHECK(lex.role_phrase(EntityId{"GKoopa"}, Role::Patient) == "Green Koopa Troopa");
  CHECK(lex.render(EntityId{"stomping"}, "passive") == "stomped");
  CHECK(lex.render(EntityId{"stomping"}, "agentive") == "Mario's stomp");
  CHECK(lex.render(EntityId{"fireball"}, "plural") == "fireballs");
  CHECK(lex.render(EntityId{"Spiny"}, "plural") == "Spinies");
  CHECK(lex.render(EntityId{"item_block"}, "indef") == "an item block");
  CHECK(lex.render(EntityId{"coin_block"}, "class") == "Coin block");
  CHECK_THROWS_AS(lex.render(EntityId{"Goomba"}, "passive"), LexiconError);
  CHECK_THROWS_AS(lex.answer_class(EntityId{"Bowser"}), LexiconError);
}

TEST_CASE("reference clauses") {
  const auto& lex = fx::lexicon();
  auto coin_block = fx::args({{Role::Patient, "coin_block"}});
  CHECK(lex.render_clause(EventType::Hit, coin_block, "past") == "Mario hit a coin block");
  CHECK(lex.render_clause(EventType::Kill, fx::args({{Role::Patient, "Goomba"}}), "gerund") ==
        "killing Goomba");
  CHECK(lex.render_clause(EventType::Appear, fx::args({{Role::Agent, "RKoopaPara"}}), "present") ==
        "a Red Koopa Paratroopa appears");
  CHECK(lex.render_clause(EventType::Appear, fx::args({{Role::Agent, "GKoopaPara"}}), "past") ==
        "Green Koopa Paratroopa appeared");
  CHECK(lex.render_clause(EventType::Throw, fx::args({{Role::Patient, "shell"}}), "gerund") ==
        "throwing a shell");
  CHECK(lex.render_clause(EventType::Jump, {}, "gerund") == "jumping");
  CHECK_THROWS_AS(lex.render_clause(EventType::Hit, {}, "past"), LexiconError);
  CHECK_THROWS_AS(lex.render_clause(EventType::Hit, coin_block, "future"), LexiconError);

  CHECK(lex.clause_roles(EventType::Kill) == std::vector{Role::Patient});
  CHECK(lex.clause_roles(EventType::Jump).empty());
}

TEST_CASE("role schemas") {
  const auto& kill = fx::lexicon().schema(EventType::Kill);
  CHECK(kill.is_mandatory(Role::Patient));
  CHECK(kill.is_mandatory(Role::Means));
  CHECK_FALSE(kill.is_mandatory(Role::Location));
  CHECK(kill.allows(Role::Location));
  CHECK_FALSE(kill.allows(Role::Agent));
  CHECK(fx::lexicon().schema(EventType::Jump).mandatory.empty());
}

TEST_CASE("session validation against the lexicon") {
  const auto& lex = fx::lexicon();
  CHECK_NOTHROW(lex.validate_session(fx::counting_example()));

  auto missing_means = fx::SessionBuilder(3000)
                           .event(100, EventType::Kill, fx::args({{Role::Patient, "Goomba"}}))
                           .build();
  CHECK_THROWS_AS(lex.validate_session(missing_means), ValidationError);

  auto bad_role = fx::SessionBuilder(3000)
                      .event(100, EventType::Jump, fx::args({{Role::Agent, "Goomba"}}))
                      .build();
  CHECK_THROWS_AS(lex.validate_session(bad_role), ValidationError);

  auto unknown_entity = fx::SessionBuilder(3000)
                            .event(100, EventType::Eat, fx::args({{Role::Patient, "star"}}))
                            .build();
  CHECK_THROWS_AS(lex.validate_session(unknown_entity), ValidationError);

  auto bad_stage = fx::SessionBuilder(3000, "underwater").build();
  CHECK_THROWS_AS(lex.validate_session(bad_stage), ValidationError);
}

TEST_CASE("lexicon load errors") {
  CHECK_NOTHROW(Lexicon::from_json(minimal_lexicon()));

  auto j = minimal_lexicon();
  j["events"].erase("eat");
  CHECK_THROWS_AS(Lexicon::from_json(j), LexiconError);

  j = minimal_lexicon();
  j["events"]["kill"] = {{"mandatory", {"patient"}},
                         {"optional", {"location"}},
                         {"clause", {{"gerund", "killing {location}"}, {"past", "x"}, {"present", "y"}}}};
  CHECK_THROWS_AS(Lexicon::from_json(j), LexiconError);

  j = minimal_lexicon();
  j["events"]["hit"] = {{"mandatory", {"patient"}},
                        {"clause", {{"gerund", "hitting {patient}"}, {"past", "Mario hit"}, {"present", "z"}}}};
  CHECK_THROWS_AS(Lexicon::from_json(j), LexiconError);

  j = minimal_lexicon();
  j["events"]["hit"]["clause"].erase("present");
  CHECK_THROWS_AS(Lexicon::from_json(j), LexiconError);

  j = minimal_lexicon();
  j["states"].erase("super");
  CHECK_THROWS_AS(Lexicon::from_json(j), LexiconError);
}
