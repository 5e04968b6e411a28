#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/chunk.hpp"
#include "json.hpp"

namespace forge {

/// Example id -> predicted answer class.
using PredictionFile = std::map<std::int64_t, std::string>;

/// JSONL rows {"id": ..., "answer": "..."}. Duplicate ids are an
/// IntegrityError; malformed rows a ParseError with the line number.
PredictionFile read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const PredictionFile& preds);

struct Tally {
  std::size_t correct = 0;
  std::size_t total = 0;

  /// Undefined (nullopt) when total is zero.
  std::optional<double> accuracy() const;
};

struct AccuracyReport {
  std::map<Subset, Tally> subsets;  // every subset present, possibly empty
  Tally all;
  std::map<QuestionType, std::map<Subset, Tally>> by_qtype;
  std::map<QuestionType, Tally> qtype_all;
  std::size_t missing = 0;  // test examples without a prediction, counted wrong

  bool empty() const { return all.total == 0; }
};

/// Exact-match accuracy over the test split. Predictions for ids that are
/// unknown or not in the test split raise IntegrityError.
AccuracyReport accuracy(const PredictionFile& preds, const std::vector<QAPair>& dataset);

nlohmann::json report_to_json(const AccuracyReport& report);

/// Modal train answer per subset, ties broken lexicographically. A subset
/// absent from train falls back to the modal answer over all of train.
/// Throws ValidationError when the train split is empty.
std::map<Subset, std::string> modal_train_answers(const std::vector<QAPair>& dataset);

/// Predicts the subset's modal train answer for every test example.
PredictionFile most_frequent_baseline(const std::vector<QAPair>& dataset);

/// 1 / (number of distinct answers among the subset's test examples), for
/// every subset with test examples. Throws ValidationError when the test
/// split is empty.
std::map<Subset, double> random_guess_expectation(const std::vector<QAPair>& dataset);

}  // namespace forge
