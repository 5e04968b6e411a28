#include "doctest.h"
#include "forge/errors.hpp"
#include "forge/text.hpp"

using namespace forge;

TEST_CASE("slot splitting") {
  auto segs = text::split_slots("Where was the {arg:patient} {arg:means:passive}?");
  REQUIRE(segs.size() == 5);
  CHECK(segs[0].literal == "Where was the ");
  CHECK(segs[1].is_slot);
  CHECK(segs[1].parts == std::vector<std::string>{"arg", "patient"});
  CHECK(segs[3].parts == std::vector<std::string>{"arg", "means", "passive"});
  CHECK(segs[4].literal == "?");

  CHECK(text::split_slots("no slots").size() == 1);
  CHECK_THROWS_AS(text::split_slots("open {arg:patient"), ParseError);
  CHECK_THROWS_AS(text::split_slots("stray } brace"), ParseError);
  CHECK_THROWS_AS(text::split_slots("empty {}"), ParseError);
}

TEST_CASE("indefinite article") {
  CHECK(text::indefinite_article("coin block") == "a");
  CHECK(text::indefinite_article("item block") == "an");
  CHECK(text::indefinite_article("Red Koopa Paratroopa") == "a");
  CHECK(text::indefinite_article("Goomba") == "a");
}

TEST_CASE("sentence tidying") {
  CHECK(text::tidy_sentence("what  did Mario hit ?") == "What did Mario hit?");
  CHECK(text::tidy_sentence("  how many coins , exactly ?  ") == "How many coins, exactly?");
}

TEST_CASE("word tokens") {
  CHECK(text::words("What was Mario's state when it rained?") ==
        std::vector<std::string>{"what", "was", "mario's", "state", "when", "it", "rained"});
  CHECK(text::words("Whenever") == std::vector<std::string>{"whenever"});
}
