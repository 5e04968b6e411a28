#include "forge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/rng.hpp"
#include "forge/text.hpp"

namespace forge {

std::vector<QAPair> cap_duplicates(const std::vector<QAPair>& examples, std::size_t max_count,
                                   std::uint64_t seed) {
  if (max_count == 0) throw ConfigError("duplicate cap must be at least 1");
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    groups[{examples[i].question, examples[i].answer}].push_back(i);
  }
  std::vector<bool> keep(examples.size(), true);
  Rng rng(Rng::derive(seed, 0xCA9));
  for (const auto& [key, members] : groups) {
    if (members.size() <= max_count) continue;
    const auto order = rng.permutation(members.size());
    for (std::size_t k = max_count; k < order.size(); ++k) keep[members[order[k]]] = false;
  }
  std::vector<QAPair> out;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (keep[i]) out.push_back(examples[i]);
  }
  return out;
}

SplitSizes split_sizes(std::size_t n, const SplitRatios& r) {
  if (r.train < 0 || r.valid < 0 || r.test < 0 ||
      std::abs(r.train + r.valid + r.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  // The epsilon absorbs representation error in products like 0.6 * 5.
  constexpr double eps = 1e-9;
  SplitSizes s;
  s.train = std::min(n, static_cast<std::size_t>(std::floor(r.train * static_cast<double>(n) + eps)));
  const std::size_t rest = n - s.train;
  const double valid_share = r.valid + r.test > 0.0 ? r.valid / (r.valid + r.test) : 0.0;
  s.valid = std::min(rest, static_cast<std::size_t>(
                               std::ceil(static_cast<double>(rest) * valid_share - eps)));
  s.test = rest - s.valid;
  return s;
}

std::vector<QAPair> assign_splits(std::vector<QAPair> examples, std::uint64_t seed,
                                  const SplitRatios& ratios) {
  for (Subset subset : kAllSubsets) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (examples[i].subset == subset) members.push_back(i);
    }
    const SplitSizes sizes = split_sizes(members.size(), ratios);
    Rng rng(Rng::derive(seed, 0x5B17, static_cast<std::uint64_t>(subset)));
    const auto order = rng.permutation(members.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      Split s = Split::Test;
      if (k < sizes.train) {
        s = Split::Train;
      } else if (k < sizes.train + sizes.valid) {
        s = Split::Valid;
      }
      examples[members[order[k]]].split = s;
    }
  }
  return examples;
}

StatsReport compute_stats(const std::vector<QAPair>& examples,
                          const std::vector<GameplaySession>* sessions) {
  StatsReport report;
  for (Subset s : kAllSubsets) report.subsets[s];

  std::map<SessionId, const GameplaySession*> by_id;
  if (sessions != nullptr) {
    for (const auto& s : *sessions) by_id[s.id] = &s;
  }

  std::set<std::pair<std::string, std::string>> unique;
  std::set<std::string> answers;
  std::set<std::tuple<SessionId, TimeMs, TimeMs>> clips;
  std::map<Subset, std::set<std::string>> vocab;
  std::map<SessionId, std::set<Split>> session_splits;
  std::size_t events_seen = 0;

  for (const QAPair& qa : examples) {
    ++report.total;
    unique.insert({qa.question, qa.answer});
    answers.insert(qa.answer);
    SubsetStats& sub = report.subsets[qa.subset];
    ++sub.total;
    QuestionTypeTally& qt = sub.qtypes[qa.qtype];
    ++qt.count;
    AnswerTally& pred = qt.predicates[qa.chunk.predicate_name()];
    ++pred.count;
    ++pred.answers[qa.answer];
    for (auto& w : text::words(qa.question)) vocab[qa.subset].insert(std::move(w));
    if (qa.split) {
      ++sub.splits[*qa.split];
      session_splits[qa.session_id].insert(*qa.split);
    }

    if (sessions != nullptr) {
      auto it = by_id.find(qa.session_id);
      if (it == by_id.end()) {
        throw IntegrityError("example " + std::to_string(qa.id) + " references unknown session " +
                             std::to_string(qa.session_id));
      }
      if (clips.insert({qa.session_id, qa.clip.start_ms, qa.clip.end_ms}).second) {
        events_seen += forge::clip_events(qa.clip, *it->second).size();
      }
    } else {
      clips.insert({qa.session_id, qa.clip.start_ms, qa.clip.end_ms});
    }
  }

  report.unique_qa = unique.size();
  report.distinct_answers = answers.size();
  report.distinct_clips = clips.size();
  for (auto& [subset, words] : vocab) report.subsets[subset].vocabulary_size = words.size();
  for (const auto& [session, splits] : session_splits) {
    if (splits.size() > 1) ++report.sessions_in_multiple_splits;
  }
  if (sessions != nullptr) {
    report.mean_events_per_clip =
        clips.empty() ? 0.0 : static_cast<double>(events_seen) / static_cast<double>(clips.size());
  }
  return report;
}

nlohmann::json stats_to_json(const StatsReport& r) {
  nlohmann::json subsets = nlohmann::json::object();
  for (const auto& [subset, s] : r.subsets) {
    nlohmann::json qtypes = nlohmann::json::object();
    for (const auto& [q, tally] : s.qtypes) {
      nlohmann::json preds = nlohmann::json::object();
      for (const auto& [name, a] : tally.predicates) {
        preds[name] = {{"count", a.count}, {"answers", a.answers}};
      }
      qtypes[std::string(to_string(q))] = {{"count", tally.count}, {"predicates", preds}};
    }
    nlohmann::json splits = nlohmann::json::object();
    for (const auto& [split, n] : s.splits) splits[std::string(to_string(split))] = n;
    subsets[std::string(to_string(subset))] = {{"total", s.total},
                                               {"qtypes", qtypes},
                                               {"vocabulary_size", s.vocabulary_size},
                                               {"splits", splits}};
  }
  nlohmann::json j = {{"total", r.total},
                      {"unique_qa", r.unique_qa},
                      {"distinct_answers", r.distinct_answers},
                      {"distinct_clips", r.distinct_clips},
                      {"sessions_in_multiple_splits", r.sessions_in_multiple_splits},
                      {"subsets", subsets}};
  j["mean_events_per_clip"] =
      r.mean_events_per_clip ? nlohmann::json(*r.mean_events_per_clip) : nlohmann::json(nullptr);
  return j;
}

std::string stats_to_csv(const StatsReport& r) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::ostringstream out;
  out << "subset,qtype,predicate,answer,count\n";
  for (const auto& [subset, s] : r.subsets) {
    for (const auto& [q, tally] : s.qtypes) {
      for (const auto& [name, a] : tally.predicates) {
        for (const auto& [answer, n] : a.answers) {
          out << to_string(subset) << ',' << to_string(q) << ',' << quote(name) << ','
              << quote(answer) << ',' << n << '\n';
        }
      }
    }
  }
  return out.str();
}

std::vector<QAPair> read_dataset(const std::filesystem::path& path) {
  std::vector<QAPair> out;
  io::for_each_jsonl(path, [&](std::size_t line, const nlohmann::json& j) {
    try {
      out.push_back(qa_from_json(j));
    } catch (const ParseError& ex) {
      throw ParseError(line, ex.what());
    }
  });
  return out;
}

void write_dataset(const std::filesystem::path& path, const std::vector<QAPair>& examples) {
  std::vector<nlohmann::json> rows;
  rows.reserve(examples.size());
  for (const auto& qa : examples) rows.push_back(qa_to_json(qa));
  io::write_jsonl(path, rows);
}

}  // namespace forge
