#include "forge/evaluation.hpp"

#include <set>

#include "forge/errors.hpp"
#include "forge/io.hpp"

namespace forge {

namespace {

constexpr Subset kSubsets[] = {Subset::NT, Subset::ET, Subset::HT};
constexpr QuestionType kQuestionTypes[] = {QuestionType::EventCentric, QuestionType::Counting,
                                           QuestionType::State};

bool is_test(const QAPair& qa) { return qa.split == Split::Test; }
bool is_train(const QAPair& qa) { return qa.split == Split::Train; }

std::string modal(const std::map<std::string, std::size_t>& counts) {
  // std::map iterates in lexicographic order, so the first maximum wins ties.
  std::string best;
  std::size_t best_count = 0;
  for (const auto& [answer, n] : counts) {
    if (n > best_count) {
      best = answer;
      best_count = n;
    }
  }
  return best;
}

nlohmann::json tally_json(const Tally& t) {
  nlohmann::json j = {{"correct", t.correct}, {"total", t.total}};
  auto acc = t.accuracy();
  j["accuracy"] = acc ? nlohmann::json(*acc) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::optional<double> Tally::accuracy() const {
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

PredictionFile read_predictions(const std::filesystem::path& path) {
  PredictionFile preds;
  io::for_each_jsonl(path, [&](std::size_t line, const nlohmann::json& row) {
    if (!row.is_object() || !row.contains("id") || !row.contains("answer") ||
        !row["id"].is_number_integer() || !row["answer"].is_string()) {
      throw ParseError(line, "prediction rows need an integer \"id\" and a string \"answer\"");
    }
    auto id = row["id"].get<std::int64_t>();
    if (!preds.emplace(id, row["answer"].get<std::string>()).second) {
      throw IntegrityError("line " + std::to_string(line) + ": duplicate prediction for id " +
                           std::to_string(id));
    }
  });
  return preds;
}

void write_predictions(const std::filesystem::path& path, const PredictionFile& preds) {
  std::vector<nlohmann::json> rows;
  rows.reserve(preds.size());
  for (const auto& [id, answer] : preds) rows.push_back({{"id", id}, {"answer", answer}});
  io::write_jsonl(path, rows);
}

AccuracyReport accuracy(const PredictionFile& preds, const std::vector<QAPair>& dataset) {
  std::map<std::int64_t, const QAPair*> by_id;
  for (const auto& qa : dataset) by_id.emplace(qa.id, &qa);
  for (const auto& [id, answer] : preds) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw IntegrityError("prediction for unknown example id " + std::to_string(id));
    if (!is_test(*it->second)) {
      throw IntegrityError("prediction for example " + std::to_string(id) + " outside the test split");
    }
  }

  AccuracyReport report;
  for (auto s : kSubsets) {
    report.subsets[s];
    for (auto q : kQuestionTypes) report.by_qtype[q][s];
  }
  for (auto q : kQuestionTypes) report.qtype_all[q];

  for (const auto& qa : dataset) {
    if (!is_test(qa)) continue;
    auto it = preds.find(qa.id);
    bool correct = false;
    if (it == preds.end()) {
      ++report.missing;
    } else {
      correct = it->second == qa.answer;
    }
    for (Tally* t : {&report.subsets[qa.subset], &report.all, &report.by_qtype[qa.qtype][qa.subset],
                     &report.qtype_all[qa.qtype]}) {
      ++t->total;
      if (correct) ++t->correct;
    }
  }
  return report;
}

nlohmann::json report_to_json(const AccuracyReport& report) {
  nlohmann::json j;
  nlohmann::json overall;
  for (const auto& [s, t] : report.subsets) overall[std::string(to_string(s))] = tally_json(t);
  overall["ALL"] = tally_json(report.all);
  j["overall"] = overall;
  nlohmann::json qtypes;
  for (const auto& [q, row] : report.by_qtype) {
    nlohmann::json r;
    for (const auto& [s, t] : row) r[std::string(to_string(s))] = tally_json(t);
    r["ALL"] = tally_json(report.qtype_all.at(q));
    qtypes[std::string(to_string(q))] = r;
  }
  j["qtypes"] = qtypes;
  j["missing"] = report.missing;
  return j;
}

std::map<Subset, std::string> modal_train_answers(const std::vector<QAPair>& dataset) {
  std::map<Subset, std::map<std::string, std::size_t>> per_subset;
  std::map<std::string, std::size_t> overall;
  for (const auto& qa : dataset) {
    if (!is_train(qa)) continue;
    ++per_subset[qa.subset][qa.answer];
    ++overall[qa.answer];
  }
  if (overall.empty()) throw ValidationError("most-frequent baseline needs a non-empty train split");
  std::map<Subset, std::string> out;
  const std::string fallback = modal(overall);
  for (auto s : kSubsets) {
    auto it = per_subset.find(s);
    out[s] = it == per_subset.end() ? fallback : modal(it->second);
  }
  return out;
}

PredictionFile most_frequent_baseline(const std::vector<QAPair>& dataset) {
  auto modal_answers = modal_train_answers(dataset);
  PredictionFile preds;
  for (const auto& qa : dataset) {
    if (is_test(qa)) preds[qa.id] = modal_answers.at(qa.subset);
  }
  return preds;
}

std::map<Subset, double> random_guess_expectation(const std::vector<QAPair>& dataset) {
  std::map<Subset, std::set<std::string>> support;
  for (const auto& qa : dataset) {
    if (is_test(qa)) support[qa.subset].insert(qa.answer);
  }
  if (support.empty()) throw ValidationError("random-guess expectation needs a non-empty test split");
  std::map<Subset, double> out;
  for (const auto& [s, answers] : support) out[s] = 1.0 / static_cast<double>(answers.size());
  return out;
}

}  // namespace forge
