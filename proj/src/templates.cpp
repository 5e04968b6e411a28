#include "forge/templates.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>

#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/rng.hpp"

namespace forge {

namespace {

bool is_arg_slot(const text::Segment& s) { return s.is_slot && s.parts[0] == "arg"; }
bool is_clause_slot(const text::Segment& s) {
  return s.is_slot && s.parts[0] == "temporal_clause";
}

std::string render_arg(const text::Segment& slot, const EntityId& id, const Lexicon& lexicon) {
  const Role role = parse_role(slot.parts[1]);
  if (slot.parts.size() == 2) return lexicon.role_phrase(id, role);
  return lexicon.render(id, slot.parts[2]);
}

std::string render_temporal(const text::Segment& slot, const TemporalConstraint& c,
                            const Lexicon& lexicon) {
  const std::string form = slot.parts.size() > 1 ? slot.parts[1] : "gerund";
  return std::string(to_string(c.relation)) + " " +
         lexicon.render_clause(c.reference.type, c.reference.args, form);
}

Template parse_template(const nlohmann::json& jt, const Lexicon& lexicon) {
  Template t;
  t.id = jt.at("id").get<std::string>();
  t.surface = jt.at("surface").get<std::string>();
  t.signature.qtype = parse_question_type(jt.at("qtype").get<std::string>());
  t.signature.predicate = jt.at("predicate").get<std::string>();
  if (jt.contains("hole") && !jt.at("hole").is_null()) {
    t.signature.hole = parse_role(jt.at("hole").get<std::string>());
  }
  t.signature.constrained = jt.value("constraint", false);
  t.segments = text::split_slots(t.surface);

  std::set<Role> given;
  bool has_clause = false;
  for (const auto& seg : t.segments) {
    if (!seg.is_slot) continue;
    if (is_arg_slot(seg)) {
      if (seg.parts.size() < 2 || seg.parts.size() > 3) {
        throw LexiconError("slot {arg:...} needs a role and an optional form");
      }
      given.insert(parse_role(seg.parts[1]));
    } else if (is_clause_slot(seg)) {
      if (seg.parts.size() > 2) throw LexiconError("slot {temporal_clause:...} takes one form");
      const std::string form = seg.parts.size() > 1 ? seg.parts[1] : "gerund";
      if (!lexicon.has_clause_form(form)) {
        throw LexiconError("unknown clause form '" + form + "'");
      }
      has_clause = true;
    } else {
      throw LexiconError("unknown slot {" + seg.parts[0] + "}");
    }
  }
  t.signature.given.assign(given.begin(), given.end());

  const ChunkSignature& sig = t.signature;
  if (has_clause != sig.constrained) {
    throw LexiconError(sig.constrained ? "constrained template lacks {temporal_clause}"
                                       : "unconstrained template has {temporal_clause}");
  }
  if (!sig.constrained && has_temporal_marker(t.surface)) {
    throw LexiconError("unconstrained template uses a temporal marker word");
  }
  switch (sig.qtype) {
    case QuestionType::EventCentric: {
      if (!sig.hole) throw LexiconError("event-centric template needs a hole role");
      const RoleSchema& schema = lexicon.schema(parse_event_type(sig.predicate));
      if (!schema.allows(*sig.hole)) throw LexiconError("hole role not allowed for predicate");
      if (given.contains(*sig.hole)) throw LexiconError("template names its own hole");
      for (Role r : given) {
        if (!schema.allows(r)) throw LexiconError("slot role not allowed for predicate");
      }
      break;
    }
    case QuestionType::Counting: {
      if (sig.hole) throw LexiconError("counting template must not have a hole");
      const RoleSchema& schema = lexicon.schema(parse_event_type(sig.predicate));
      for (Role r : given) {
        if (!schema.allows(r)) throw LexiconError("slot role not allowed for predicate");
      }
      break;
    }
    case QuestionType::State:
      if (sig.hole || !given.empty()) throw LexiconError("state template takes no arguments");
      if (sig.predicate == "stage_type") {
        if (sig.constrained) throw LexiconError("stage template takes no temporal clause");
      } else if (sig.predicate != "mario_state") {
        throw LexiconError("unknown state probe '" + sig.predicate + "'");
      }
      break;
  }
  return t;
}

std::size_t line_of(const std::string& content, const std::string& id) {
  const auto pos = content.find("\"" + id + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(content.begin(), content.begin() + pos, '\n'));
}

}  // namespace

std::string ChunkSignature::describe() const {
  std::string out = std::string(to_string(qtype)) + "/" + predicate + "/hole=";
  out += hole ? std::string(to_string(*hole)) : "-";
  out += "/given=[";
  for (std::size_t i = 0; i < given.size(); ++i) {
    if (i) out += ",";
    out += to_string(given[i]);
  }
  out += "]/constraint=";
  out += constrained ? "yes" : "no";
  return out;
}

ChunkSignature signature_of(const SemanticChunk& chunk) {
  ChunkSignature sig;
  sig.qtype = chunk.qtype;
  sig.predicate = chunk.predicate_name();
  sig.hole = chunk.hole;
  for (const auto& [role, entity] : chunk.args) sig.given.push_back(role);
  sig.constrained = chunk.constraint.has_value();
  return sig;
}

bool has_temporal_marker(std::string_view sentence) {
  for (const auto& w : text::words(sentence)) {
    for (auto marker : kTemporalMarkers) {
      if (w == marker) return true;
    }
  }
  return false;
}

TemplatePool TemplatePool::from_json(const nlohmann::json& j, const Lexicon& lexicon) {
  TemplatePool pool;
  std::set<std::string> ids;
  try {
    for (const auto& jt : j.at("templates")) {
      const std::string id = jt.value("id", std::string("<no id>"));
      try {
        pool.templates_.push_back(parse_template(jt, lexicon));
      } catch (const Error& ex) {
        throw LexiconError("template '" + id + "': " + ex.what());
      } catch (const nlohmann::json::exception& ex) {
        throw LexiconError("template '" + id + "': " + ex.what());
      }
      if (!ids.insert(id).second) throw LexiconError("template '" + id + "': duplicate id");
    }
  } catch (const nlohmann::json::exception& ex) {
    throw LexiconError(std::string("malformed template pool: ") + ex.what());
  }
  return pool;
}

TemplatePool TemplatePool::load(const std::filesystem::path& path, const Lexicon& lexicon) {
  const nlohmann::json j = io::read_json_file(path);
  try {
    return from_json(j, lexicon);
  } catch (const LexiconError& ex) {
    // Point at the offending template in the file when its id can be found.
    std::string what = ex.what();
    const auto open = what.find("template '");
    if (open != std::string::npos) {
      const auto start = open + 10;
      const auto close = what.find('\'', start);
      std::ifstream in(path);
      std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
      const auto line = line_of(content, what.substr(start, close - start));
      if (line > 0) throw ParseError(line, path.string() + ": " + what);
    }
    throw LexiconError(path.string() + ": " + what);
  }
}

std::vector<const Template*> TemplatePool::matching(const SemanticChunk& chunk) const {
  const ChunkSignature sig = signature_of(chunk);
  std::vector<const Template*> out;
  for (const auto& t : templates_) {
    if (t.signature == sig) out.push_back(&t);
  }
  return out;
}

bool TemplatePool::covers(const SemanticChunk& chunk) const { return !matching(chunk).empty(); }

const Template& TemplatePool::by_id(const std::string& id) const {
  for (const auto& t : templates_) {
    if (t.id == id) return t;
  }
  throw CoverageError("no template with id '" + id + "'");
}

const Template& select_template(const TemplatePool& pool, const SemanticChunk& chunk,
                                std::uint64_t seed) {
  const auto candidates = pool.matching(chunk);
  if (candidates.empty()) {
    throw CoverageError("no template for signature " + signature_of(chunk).describe());
  }
  Rng rng(seed);
  return *candidates[rng.uniform_below(candidates.size())];
}

Realization realize(const Template& tmpl, const SemanticChunk& chunk, const Lexicon& lexicon) {
  if (tmpl.signature != signature_of(chunk)) {
    throw ConsistencyError("template '" + tmpl.id + "' does not match chunk signature " +
                           signature_of(chunk).describe());
  }
  std::string question;
  for (const auto& seg : tmpl.segments) {
    if (!seg.is_slot) {
      question += seg.literal;
    } else if (is_arg_slot(seg)) {
      question += render_arg(seg, chunk.args.at(parse_role(seg.parts[1])), lexicon);
    } else {
      question += render_temporal(seg, *chunk.constraint, lexicon);
    }
  }

  Realization out;
  out.question = text::tidy_sentence(question);
  switch (chunk.qtype) {
    case QuestionType::EventCentric:
      out.answer = lexicon.answer_class(EntityId{chunk.filler});
      break;
    case QuestionType::Counting:
      try {
        out.answer = lexicon.count_class(std::stol(chunk.filler));
      } catch (const std::logic_error&) {
        throw LexiconError("count filler '" + chunk.filler + "' is not a number");
      }
      break;
    case QuestionType::State:
      if (chunk.probe == StateProbe::StageType) {
        out.answer = lexicon.stage_class(chunk.filler);
      } else {
        try {
          out.answer = lexicon.state_class(parse_mario_state(chunk.filler));
        } catch (const ParseError& ex) {
          throw LexiconError(ex.what());
        }
      }
      break;
  }
  return out;
}

namespace {

bool same_text(std::string_view a, std::string_view b, bool first_ci) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (i == 0 && first_ci &&
        std::tolower(static_cast<unsigned char>(a[0])) == std::tolower(static_cast<unsigned char>(b[0]))) {
      continue;
    }
    return false;
  }
  return true;
}

// Depth-first match of segments[i..] against question[pos..]. Argument slots
// only accept phrases that some lexicon entity renders to, so multi-word
// names cannot be split the wrong way.
bool match_from(const std::vector<text::Segment>& segs, std::size_t i, const std::string& q,
                std::size_t pos, const Lexicon& lexicon, RecoveredSlots& out) {
  if (i == segs.size()) return pos == q.size();
  const auto& seg = segs[i];
  const std::string_view rest = std::string_view(q).substr(pos);
  if (!seg.is_slot) {
    if (rest.size() < seg.literal.size() ||
        !same_text(rest.substr(0, seg.literal.size()), seg.literal, pos == 0)) {
      return false;
    }
    return match_from(segs, i + 1, q, pos + seg.literal.size(), lexicon, out);
  }
  if (is_clause_slot(seg)) {
    const bool marked = std::any_of(kTemporalMarkers.begin(), kTemporalMarkers.end(), [&](auto w) {
      return rest.size() > w.size() && rest.substr(0, w.size()) == w && rest[w.size()] == ' ';
    });
    if (!marked) return false;
    for (std::size_t len = 1; len <= rest.size(); ++len) {
      out.temporal_clause = std::string(rest.substr(0, len));
      if (match_from(segs, i + 1, q, pos + len, lexicon, out)) return true;
    }
    out.temporal_clause.reset();
    return false;
  }
  const Role role = parse_role(seg.parts[1]);
  for (const auto& [id, entry] : lexicon.entities()) {
    std::string rendered;
    try {
      rendered = render_arg(seg, id, lexicon);
    } catch (const LexiconError&) {
      continue;
    }
    if (rendered.empty() || rest.size() < rendered.size() ||
        !same_text(rest.substr(0, rendered.size()), rendered, pos == 0)) {
      continue;
    }
    out.args[role] = id;
    if (match_from(segs, i + 1, q, pos + rendered.size(), lexicon, out)) return true;
    out.args.erase(role);
  }
  return false;
}

}  // namespace

std::optional<RecoveredSlots> recover_slots(const Template& tmpl, const std::string& question,
                                            const Lexicon& lexicon) {
  RecoveredSlots out;
  if (!match_from(tmpl.segments, 0, question, 0, lexicon, out)) return std::nullopt;
  return out;
}

}  // namespace forge
