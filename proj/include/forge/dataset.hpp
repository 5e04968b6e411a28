#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/chunk.hpp"
#include "forge/model.hpp"

namespace forge {

/// Keeps at most `max_count` examples per identical (question, answer) pair.
/// Survivors are a seeded uniform sample of each group; relative order is
/// preserved. Idempotent.
std::vector<QAPair> cap_duplicates(const std::vector<QAPair>& examples, std::size_t max_count,
                                   std::uint64_t seed);

struct SplitRatios {
  double train = 0.6;
  double valid = 0.2;
  double test = 0.2;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;

  bool operator==(const SplitSizes&) const = default;
};

/// |train| = floor(r_train N), |valid| = ceil(rest * r_valid / (r_valid +
/// r_test)), |test| = the remainder. With the default 60/20/20 ratios this
/// gives (46978, 15660, 15659) for N = 78297. Throws ConfigError unless the
/// ratios are non-negative and sum to 1.
SplitSizes split_sizes(std::size_t n, const SplitRatios& ratios = {});

/// Assigns train/valid/test per subset by a seeded shuffle, using
/// split_sizes for each subset's count.
std::vector<QAPair> assign_splits(std::vector<QAPair> examples, std::uint64_t seed,
                                  const SplitRatios& ratios = {});

struct AnswerTally {
  std::size_t count = 0;
  std::map<std::string, std::size_t> answers;
};

struct QuestionTypeTally {
  std::size_t count = 0;
  std::map<std::string, AnswerTally> predicates;  // event type or state probe
};

struct SubsetStats {
  std::size_t total = 0;
  std::map<QuestionType, QuestionTypeTally> qtypes;
  std::size_t vocabulary_size = 0;
  std::map<Split, std::size_t> splits;
};

struct StatsReport {
  std::size_t total = 0;
  std::size_t unique_qa = 0;
  std::size_t distinct_answers = 0;
  std::size_t distinct_clips = 0;
  std::optional<double> mean_events_per_clip;  // needs the sessions
  std::size_t sessions_in_multiple_splits = 0;
  std::map<Subset, SubsetStats> subsets;
};

/// Distribution report. When `sessions` is given every referenced session
/// must exist (IntegrityError otherwise) and the mean number of events per
/// distinct clip is filled in.
StatsReport compute_stats(const std::vector<QAPair>& examples,
                          const std::vector<GameplaySession>* sessions = nullptr);

nlohmann::json stats_to_json(const StatsReport& report);
/// Rows of subset,qtype,predicate,answer,count.
std::string stats_to_csv(const StatsReport& report);

std::vector<QAPair> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const std::vector<QAPair>& examples);

}  // namespace forge
