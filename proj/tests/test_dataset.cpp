#include <fstream>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "forge/dataset.hpp"
#include "forge/errors.hpp"
#include "forge/qa_generator.hpp"
#include "forge/simulator.hpp"

using namespace forge;

namespace {

QAPair qa(std::int64_t id, std::string q, std::string a, Subset subset = Subset::NT) {
  QAPair p;
  p.id = id;
  p.question = std::move(q);
  p.answer = std::move(a);
  p.subset = subset;
  p.session_id = 0;
  p.clip = Clip{0, 0, 3000, 1};
  p.chunk.qtype = QuestionType::Counting;
  p.chunk.predicate = EventType::Jump;
  p.chunk.target_event_id = 1;
  p.chunk.filler = p.answer;
  p.qtype = QuestionType::Counting;
  p.template_id = "cnt-jump-none-1";
  return p;
}

}  // namespace

TEST_CASE("split sizes reproduce the published table") {
  CHECK(split_sizes(78297) == SplitSizes{46978, 15660, 15659});
  CHECK(split_sizes(64619) == SplitSizes{38771, 12924, 12924});
  CHECK(split_sizes(44841) == SplitSizes{26904, 8969, 8968});
}

TEST_CASE("split sizes in general") {
  for (std::size_t n = 0; n < 500; ++n) {
    auto s = split_sizes(n);
    CHECK(s.train + s.valid + s.test == n);
    CHECK(s.valid >= s.test);
    CHECK(s.valid - s.test <= 1);
  }
  CHECK(split_sizes(10, {0.5, 0.5, 0.0}) == SplitSizes{5, 5, 0});
  CHECK(split_sizes(10, {1.0, 0.0, 0.0}) == SplitSizes{10, 0, 0});
  CHECK_THROWS_AS(split_sizes(10, {0.5, 0.4, 0.2}), ConfigError);
  CHECK_THROWS_AS(split_sizes(10, {-0.2, 0.6, 0.6}), ConfigError);
}

TEST_CASE("split assignment is per subset and seeded") {
  std::vector<QAPair> data;
  for (int i = 0; i < 300; ++i) {
    const Subset s = i % 3 == 0 ? Subset::NT : (i % 3 == 1 ? Subset::ET : Subset::HT);
    data.push_back(qa(i, "q" + std::to_string(i), "1", s));
  }
  auto a = assign_splits(data, 5);
  auto b = assign_splits(data, 5);
  CHECK(a == b);
  CHECK_FALSE(a == assign_splits(data, 6));
  std::map<Subset, std::map<Split, std::size_t>> counts;
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a[i].split.has_value());
    CHECK(a[i].id == data[i].id);
    ++counts[a[i].subset][*a[i].split];
  }
  for (auto s : {Subset::NT, Subset::ET, Subset::HT}) {
    auto expected = split_sizes(100);
    CHECK(counts[s][Split::Train] == expected.train);
    CHECK(counts[s][Split::Valid] == expected.valid);
    CHECK(counts[s][Split::Test] == expected.test);
  }
}

TEST_CASE("duplicate capping") {
  std::vector<QAPair> data;
  for (int i = 0; i < 80; ++i) data.push_back(qa(i, "How many times did Mario jump?", "1"));
  for (int i = 80; i < 90; ++i) data.push_back(qa(i, "How many times did Mario jump?", "2"));
  for (int i = 90; i < 95; ++i) data.push_back(qa(i, "How many jumps did Mario make?", "1"));

  auto capped = cap_duplicates(data, 50, 1);
  std::map<std::pair<std::string, std::string>, int> groups;
  for (const auto& p : capped) ++groups[{p.question, p.answer}];
  CHECK(groups[{"How many times did Mario jump?", "1"}] == 50);
  CHECK(groups[{"How many times did Mario jump?", "2"}] == 10);
  CHECK(groups[{"How many jumps did Mario make?", "1"}] == 5);
  for (std::size_t i = 1; i < capped.size(); ++i) CHECK(capped[i - 1].id < capped[i].id);

  CHECK(cap_duplicates(capped, 50, 1) == capped);
  CHECK(cap_duplicates(capped, 50, 99) == capped);
  CHECK(cap_duplicates(data, 50, 1) == capped);
  CHECK_FALSE(cap_duplicates(data, 50, 2) == capped);
  CHECK(cap_duplicates(data, 1, 1).size() == 3);
  CHECK_THROWS_AS(cap_duplicates(data, 0, 1), ConfigError);
}

TEST_CASE("dataset file round trip") {
  auto config = SimulatorConfig::load(fx::data("simulator.json"));
  auto sessions = simulate_batch(config, 1, 3);
  auto data = assign_splits(generate_dataset(sessions, fx::pool(), fx::lexicon(), GeneratorConfig{}, 1), 1);
  auto path = std::filesystem::temp_directory_path() / "forge_test_dataset.jsonl";
  write_dataset(path, data);
  CHECK(read_dataset(path) == data);

  std::ofstream(path) << qa_to_json(data.front()).dump() << "\n{\"q\": 1}\n";
  try {
    read_dataset(path);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("stats report") {
  std::vector<QAPair> data = {qa(1, "How many times did Mario jump?", "1"),
                              qa(2, "How many times did Mario jump?", "1"),
                              qa(3, "How many times did Mario jump after jumping?", "2", Subset::HT)};
  data[0].split = Split::Train;
  data[1].split = Split::Test;
  data[2].split = Split::Test;
  auto r = compute_stats(data);
  CHECK(r.total == 3);
  CHECK(r.unique_qa == 2);
  CHECK(r.distinct_answers == 2);
  CHECK(r.distinct_clips == 1);
  CHECK_FALSE(r.mean_events_per_clip.has_value());
  CHECK(r.sessions_in_multiple_splits == 1);
  CHECK(r.subsets.at(Subset::NT).total == 2);
  CHECK(r.subsets.at(Subset::NT).qtypes.at(QuestionType::Counting).predicates.at("jump").answers.at("1") == 2);
  CHECK(r.subsets.at(Subset::NT).vocabulary_size == 6);
  CHECK(r.subsets.at(Subset::HT).vocabulary_size == 8);

  std::vector<GameplaySession> sessions = {fx::counting_example()};
  auto with = compute_stats(data, &sessions);
  REQUIRE(with.mean_events_per_clip.has_value());
  CHECK(*with.mean_events_per_clip == doctest::Approx(5.0));

  auto csv = stats_to_csv(r);
  CHECK(csv.rfind("subset,qtype,predicate,answer,count\n", 0) == 0);
  CHECK(csv.find("NT,counting,jump,1,2\n") != std::string::npos);
  auto j = stats_to_json(r);
  CHECK(j["subsets"]["HT"]["total"] == 1);
  CHECK(j["mean_events_per_clip"].is_null());

  std::vector<GameplaySession> none;
  CHECK_THROWS_AS(compute_stats(data, &none), IntegrityError);
}
