#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace forge::text {

// A surface string is literal text interleaved with `{a:b:c}` slots.
struct Segment {
  bool is_slot = false;
  std::string literal;             // when !is_slot
  std::vector<std::string> parts;  // slot name split on ':'
};

/// Splits a surface string into literal and slot segments. Throws
/// ParseError on unbalanced braces or empty slots.
std::vector<Segment> split_slots(std::string_view surface);

/// "a" or "an" for the given noun phrase.
std::string_view indefinite_article(std::string_view phrase);

/// Post-realization cleanup: collapses runs of spaces, drops spaces before
/// punctuation, trims, and upper-cases the first letter.
std::string tidy_sentence(std::string_view sentence);

/// Lower-cased word tokens (letters, digits, apostrophes, hyphens).
std::vector<std::string> words(std::string_view sentence);

}  // namespace forge::text
