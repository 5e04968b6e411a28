#include "forge/qa_generator.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <thread>

#include "forge/clip_sampler.hpp"
#include "forge/dataset.hpp"
#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/oracle.hpp"
#include "forge/rng.hpp"

namespace forge {

namespace {

bool holds(Relation relation, TimeMs t, TimeMs ref) {
  switch (relation) {
    case Relation::After:
      return t > ref;
    case Relation::Before:
      return t < ref;
    case Relation::When:
      return std::llabs(t - ref) <= kWhenToleranceMs;
  }
  return false;
}

struct Reference {
  const Event* event;
  EventPattern pattern;
};

std::string expected_class(const SemanticChunk& c, const Lexicon& lexicon) {
  switch (c.qtype) {
    case QuestionType::EventCentric:
      return lexicon.answer_class(EntityId{c.filler});
    case QuestionType::Counting:
      return c.filler;
    case QuestionType::State:
      return c.probe == StateProbe::StageType ? lexicon.stage_class(c.filler)
                                              : lexicon.state_class(parse_mario_state(c.filler));
  }
  return {};
}

std::vector<Relation> parse_relations(const nlohmann::json& j) {
  std::vector<Relation> out;
  for (const auto& r : j) out.push_back(parse_relation(r.get<std::string>()));
  return out;
}

// Per-clip selection: for each subset pick up to `per_subset` candidates,
// drawing the question type by weight first and the chunk uniformly second.
std::vector<const Candidate*> choose(const std::vector<Candidate>& candidates,
                                     const GeneratorConfig& config, Rng& rng) {
  std::vector<const Candidate*> chosen;
  for (Subset subset : kAllSubsets) {
    std::vector<const Candidate*> remaining;
    for (const auto& c : candidates) {
      if (c.subset == subset) remaining.push_back(&c);
    }
    for (std::size_t k = 0; k < config.per_subset_per_clip && !remaining.empty(); ++k) {
      std::vector<QuestionType> types;
      std::vector<double> weights;
      for (QuestionType q : kAllQuestionTypes) {
        auto w = config.qtype_weights.find(q);
        if (w == config.qtype_weights.end() || w->second <= 0.0) continue;
        if (std::none_of(remaining.begin(), remaining.end(),
                         [&](const Candidate* c) { return c->chunk.qtype == q; })) {
          continue;
        }
        types.push_back(q);
        weights.push_back(w->second);
      }
      if (types.empty()) break;
      const QuestionType q = types[rng.categorical(weights)];
      std::vector<std::size_t> of_type;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (remaining[i]->chunk.qtype == q) of_type.push_back(i);
      }
      const std::size_t pick = of_type[rng.uniform_below(of_type.size())];
      chosen.push_back(remaining[pick]);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }
  return chosen;
}

std::vector<QAPair> generate_for_session(const GameplaySession& session, const TemplatePool& pool,
                                         const Lexicon& lexicon, const GeneratorConfig& config,
                                         std::uint64_t seed) {
  std::vector<QAPair> out;
  if (session.duration_ms < kMinClipMs) return out;
  for (const Event& target : session.events) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(session.id),
                        static_cast<std::uint64_t>(target.id)));
    if (!rng.bernoulli(config.target_probability)) continue;
    const Clip clip = sample_clip(session, target, seed);
    const auto candidates =
        enumerate_candidates(target, clip, session, lexicon, pool, config.relations);
    for (const Candidate* c : choose(candidates, config, rng)) {
      const Template& tmpl = select_template(pool, c->chunk, rng.next_u64());
      const Realization r = realize(tmpl, c->chunk, lexicon);
      QAPair qa;
      qa.question = r.question;
      qa.answer = r.answer;
      qa.chunk = c->chunk;
      qa.subset = c->subset;
      qa.qtype = c->chunk.qtype;
      qa.clip = clip;
      qa.template_id = tmpl.id;
      qa.session_id = session.id;
      out.push_back(std::move(qa));
    }
  }
  return out;
}

}  // namespace

RelationMap default_relations() {
  return {{QuestionType::EventCentric, {Relation::Before, Relation::After}},
          {QuestionType::Counting, {Relation::Before, Relation::After}},
          {QuestionType::State, {Relation::When}}};
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  try {
    c.target_probability = j.value("target_probability", c.target_probability);
    c.per_subset_per_clip = j.value("per_subset_per_clip", c.per_subset_per_clip);
    c.max_same_qa = j.value("max_same_qa", c.max_same_qa);
    if (j.contains("qtype_weights")) {
      c.qtype_weights.clear();
      for (const auto& [q, w] : j.at("qtype_weights").items()) {
        c.qtype_weights[parse_question_type(q)] = w.get<double>();
      }
    }
    if (j.contains("relations")) {
      c.relations.clear();
      for (const auto& [q, rs] : j.at("relations").items()) {
        c.relations[parse_question_type(q)] = parse_relations(rs);
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("malformed generator config: ") + ex.what());
  } catch (const ParseError& ex) {
    throw ConfigError(std::string("malformed generator config: ") + ex.what());
  }
  if (!(c.target_probability >= 0.0 && c.target_probability <= 1.0)) {
    throw ConfigError("target_probability must lie in [0, 1]");
  }
  for (const auto& [q, w] : c.qtype_weights) {
    if (!(w >= 0.0)) throw ConfigError("question type weights must be non-negative");
  }
  for (Relation r : c.relations[QuestionType::State]) {
    if (r != Relation::When) throw ConfigError("state questions only support 'when'");
  }
  return c;
}

GeneratorConfig GeneratorConfig::load(const std::filesystem::path& path) {
  return from_json(io::read_json_file(path));
}

std::vector<SemanticChunk> form_chunks(const Event& target, const Clip& clip,
                                       const GameplaySession& session, const Lexicon& lexicon,
                                       const RelationMap& relations) {
  const auto in_clip = events_in(clip, session);
  if (!clip.contains(target.time_ms) ||
      std::none_of(in_clip.begin(), in_clip.end(), [&](const Event& e) { return e.id == target.id; })) {
    throw ConsistencyError("target event " + std::to_string(target.id) + " is not in the clip");
  }

  std::vector<SemanticChunk> base;
  auto make = [&](QuestionType q) {
    SemanticChunk c;
    c.qtype = q;
    c.target_event_id = target.id;
    return c;
  };

  const RoleSchema& schema = lexicon.schema(target.type);
  for (const auto& [hole, filler] : target.args) {
    ArgMap given = target.args;
    given.erase(hole);
    ArgMap mandatory_only;
    for (const auto& [role, entity] : given) {
      if (schema.is_mandatory(role)) mandatory_only.emplace(role, entity);
    }
    for (const ArgMap* args : {&given, &mandatory_only}) {
      if (args == &mandatory_only && mandatory_only == given) break;
      SemanticChunk c = make(QuestionType::EventCentric);
      c.predicate = target.type;
      c.hole = hole;
      c.args = *args;
      c.filler = filler.token;
      base.push_back(std::move(c));
    }
  }

  for (EventType type : kAllEventTypes) {
    std::vector<const Event*> of_type;
    for (const Event& e : in_clip) {
      if (e.type == type) of_type.push_back(&e);
    }
    if (of_type.empty()) continue;
    SemanticChunk all = make(QuestionType::Counting);
    all.predicate = type;
    all.filler = std::to_string(of_type.size());
    base.push_back(all);
    for (Role role : kAllRoles) {
      std::set<EntityId> values;
      for (const Event* e : of_type) {
        if (auto v = e->arg(role)) values.insert(*v);
      }
      for (const EntityId& v : values) {
        SemanticChunk c = make(QuestionType::Counting);
        c.predicate = type;
        c.args[role] = v;
        c.filler = std::to_string(std::count_if(of_type.begin(), of_type.end(), [&](const Event* e) {
          return e->arg(role) == v;
        }));
        base.push_back(std::move(c));
      }
    }
  }

  SemanticChunk stage = make(QuestionType::State);
  stage.probe = StateProbe::StageType;
  stage.filler = session.stage_type;
  base.push_back(stage);
  SemanticChunk mario = make(QuestionType::State);
  mario.probe = StateProbe::MarioState;
  mario.filler = std::string(to_string(state_at(session, target.time_ms)));
  base.push_back(mario);

  // Reference patterns name the reference event by its clause roles only.
  std::vector<Reference> refs;
  for (const Event& e : in_clip) {
    if (e.id == target.id) continue;
    EventPattern pattern{e.type, {}};
    for (Role r : lexicon.clause_roles(e.type)) {
      if (auto v = e.arg(r)) pattern.args[r] = *v;
    }
    const bool seen = std::any_of(refs.begin(), refs.end(),
                                  [&](const Reference& other) { return other.pattern == pattern; });
    if (!seen) refs.push_back({&e, std::move(pattern)});
  }

  std::vector<SemanticChunk> out = base;
  for (const SemanticChunk& b : base) {
    if (b.qtype == QuestionType::State && b.probe == StateProbe::StageType) continue;
    auto allowed = relations.find(b.qtype);
    if (allowed == relations.end()) continue;
    for (Relation relation : allowed->second) {
      if (b.qtype == QuestionType::State && relation != Relation::When) continue;
      for (const Reference& ref : refs) {
        if (b.qtype != QuestionType::State && ref.event->type == b.predicate) continue;
        SemanticChunk c = b;
        c.constraint = TemporalConstraint{relation, ref.pattern};
        switch (b.qtype) {
          case QuestionType::EventCentric:
            if (!holds(relation, target.time_ms, ref.event->time_ms)) continue;
            break;
          case QuestionType::Counting: {
            const auto pattern = b.pattern();
            c.filler = std::to_string(std::count_if(in_clip.begin(), in_clip.end(), [&](const Event& e) {
              return pattern.matches(e) && holds(relation, e.time_ms, ref.event->time_ms);
            }));
            break;
          }
          case QuestionType::State:
            c.filler = std::string(to_string(state_at(session, ref.event->time_ms)));
            break;
        }
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::vector<Candidate> enumerate_candidates(const Event& target, const Clip& clip,
                                            const GameplaySession& session,
                                            const Lexicon& lexicon, const TemplatePool& pool,
                                            const RelationMap& relations) {
  std::vector<Candidate> out;
  const bool target_has_distractors = !find_distractors(clip, session, target).empty();
  for (SemanticChunk& chunk : form_chunks(target, clip, session, lexicon, relations)) {
    if (chunk.constraint && oracle::reference_matches(*chunk.constraint, clip, session) != 1) {
      continue;
    }
    if (chunk.qtype == QuestionType::Counting && std::stol(chunk.filler) > lexicon.max_count()) {
      continue;
    }
    if (!pool.covers(chunk)) continue;
    const auto answers = oracle::answer(chunk, clip, session, lexicon);
    if (answers.size() != 1) continue;
    const std::string expected = expected_class(chunk, lexicon);
    if (*answers.begin() != expected) {
      throw ConsistencyError("oracle answers '" + *answers.begin() + "' but generator expected '" +
                             expected + "' for " + signature_of(chunk).describe());
    }
    const Subset subset = classify_subset(clip, session, chunk);
    if (chunk.qtype == QuestionType::EventCentric && subset == Subset::NT &&
        target_has_distractors) {
      continue;
    }
    out.push_back({std::move(chunk), subset});
  }
  return out;
}

std::vector<QAPair> generate_dataset(const std::vector<GameplaySession>& sessions,
                                     const TemplatePool& pool, const Lexicon& lexicon,
                                     const GeneratorConfig& config, std::uint64_t seed) {
  std::vector<std::vector<QAPair>> per_session(sessions.size());
  const std::size_t workers = std::max<std::size_t>(
      1, std::min<std::size_t>(sessions.size(), std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < sessions.size(); i += workers) {
          per_session[i] = generate_for_session(sessions[i], pool, lexicon, config, seed);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<QAPair> out;
  std::int64_t next_id = 0;
  for (auto& batch : per_session) {
    for (auto& qa : batch) {
      qa.id = next_id++;
      out.push_back(std::move(qa));
    }
  }
  if (config.max_same_qa > 0) out = cap_duplicates(out, config.max_same_qa, seed);
  return out;
}

}  // namespace forge
