#include "forge/text.hpp"

#include <cctype>

#include "forge/errors.hpp"

namespace forge::text {

std::vector<Segment> split_slots(std::string_view surface) {
  std::vector<Segment> out;
  std::string literal;
  std::size_t i = 0;
  while (i < surface.size()) {
    const char c = surface[i];
    if (c == '}') throw ParseError("unbalanced '}' in \"" + std::string(surface) + "\"");
    if (c != '{') {
      literal.push_back(c);
      ++i;
      continue;
    }
    const auto close = surface.find('}', i);
    if (close == std::string_view::npos) {
      throw ParseError("unterminated slot in \"" + std::string(surface) + "\"");
    }
    const std::string_view body = surface.substr(i + 1, close - i - 1);
    if (body.empty() || body.find('{') != std::string_view::npos) {
      throw ParseError("malformed slot in \"" + std::string(surface) + "\"");
    }
    if (!literal.empty()) {
      out.push_back({false, std::move(literal), {}});
      literal.clear();
    }
    Segment slot{true, {}, {}};
    std::size_t start = 0;
    while (true) {
      const auto colon = body.find(':', start);
      slot.parts.emplace_back(body.substr(start, colon - start));
      if (colon == std::string_view::npos) break;
      start = colon + 1;
    }
    out.push_back(std::move(slot));
    i = close + 1;
  }
  if (!literal.empty()) out.push_back({false, std::move(literal), {}});
  return out;
}

std::string_view indefinite_article(std::string_view phrase) {
  for (char c : phrase) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    switch (std::tolower(static_cast<unsigned char>(c))) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return "an";
      default:
        return "a";
    }
  }
  return "a";
}

std::string tidy_sentence(std::string_view sentence) {
  std::string out;
  out.reserve(sentence.size());
  for (char c : sentence) {
    const bool space = c == ' ';
    if (space && (out.empty() || out.back() == ' ')) continue;
    if ((c == '?' || c == ',' || c == '.' || c == '!') && !out.empty() && out.back() == ' ') {
      out.pop_back();
    }
    out.push_back(c);
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::vector<std::string> words(std::string_view sentence) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : sentence) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'' || c == '-') {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace forge::text
