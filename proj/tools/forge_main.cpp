// forge: command-line driver for the dataset pipeline.
//
//   forge simulate   --config sim.json --seed 7 --count 120 --out sessions.jsonl
//   forge generate   --sessions sessions.jsonl --seed 7 --out dataset.jsonl
//   forge validate   --dataset dataset.jsonl --sessions sessions.jsonl
//   forge stats      --dataset dataset.jsonl [--sessions sessions.jsonl] --out report.json
//   forge split      --dataset dataset.jsonl --seed 7 --out split.jsonl
//   forge eval       --dataset split.jsonl (--predictions p.jsonl | --baseline most-frequent)
//   forge attn-check (--fixture f.json | --random 1000 --seed 7)
//
// Exit status: 0 success, 1 validation or runtime failure, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "forge/attention.hpp"
#include "forge/dataset.hpp"
#include "forge/errors.hpp"
#include "forge/evaluation.hpp"
#include "forge/io.hpp"
#include "forge/lexicon.hpp"
#include "forge/qa_generator.hpp"
#include "forge/simulator.hpp"
#include "forge/templates.hpp"
#include "forge/validation.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = FORGE_DATA_DIR;

struct Options {
  std::uint64_t seed = 0;
  fs::path config;
  fs::path out;
  fs::path lexicon = kDataDir / "lexicon.json";
  fs::path templates = kDataDir / "templates.json";
  fs::path sessions;
  fs::path dataset;
  fs::path predictions;
  fs::path csv;
  std::string baseline;
  std::size_t count = 100;
  std::size_t random_fixtures = 0;
  fs::path fixture;
  std::vector<double> ratios;
};

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

int run_simulate(const Options& o) {
  const auto lexicon = forge::Lexicon::load(o.lexicon);
  auto config = forge::SimulatorConfig::load(o.config.empty() ? kDataDir / "simulator.json" : o.config);
  config.validate(lexicon);
  const auto sessions = forge::simulate_batch(config, o.seed, o.count);
  for (const auto& s : sessions) forge::check_session_structure(s);
  forge::write_sessions(o.out, sessions);
  std::size_t events = 0;
  for (const auto& s : sessions) events += s.events.size();
  std::cerr << "wrote " << sessions.size() << " sessions, " << events << " events to " << o.out
            << "\n";
  return 0;
}

int run_generate(const Options& o) {
  const auto lexicon = forge::Lexicon::load(o.lexicon);
  const auto pool = forge::TemplatePool::load(o.templates, lexicon);
  const auto config =
      forge::GeneratorConfig::load(o.config.empty() ? kDataDir / "generator.json" : o.config);
  const auto sessions = forge::ingest_log(o.sessions, lexicon);
  const auto examples = forge::generate_dataset(sessions, pool, lexicon, config, o.seed);
  forge::write_dataset(o.out, examples);
  std::cerr << "wrote " << examples.size() << " QA pairs from " << sessions.size()
            << " sessions to " << o.out << "\n";
  return 0;
}

int run_validate(const Options& o) {
  const auto lexicon = forge::Lexicon::load(o.lexicon);
  const auto pool = forge::TemplatePool::load(o.templates, lexicon);
  const auto sessions = forge::ingest_log(o.sessions, lexicon);
  const auto examples = forge::read_dataset(o.dataset);
  const auto report = forge::validate_dataset(examples, sessions, lexicon, &pool);
  const auto j = forge::validation_to_json(report);
  if (!o.out.empty()) forge::io::write_text(o.out, j.dump(2) + "\n");
  print_json(j);
  if (report.examples == 0) {
    std::cerr << "dataset is empty\n";
    return 1;
  }
  return report.ok() ? 0 : 1;
}

int run_stats(const Options& o) {
  const auto examples = forge::read_dataset(o.dataset);
  std::vector<forge::GameplaySession> sessions;
  if (!o.sessions.empty()) {
    sessions = forge::ingest_log(o.sessions, forge::Lexicon::load(o.lexicon));
  }
  const auto report = forge::compute_stats(examples, o.sessions.empty() ? nullptr : &sessions);
  const auto j = forge::stats_to_json(report);
  if (o.out.empty()) {
    print_json(j);
    return 0;
  }
  forge::io::write_text(o.out, j.dump(2) + "\n");
  fs::path csv = o.csv;
  if (csv.empty()) csv = fs::path(o.out).replace_extension(".csv");
  forge::io::write_text(csv, forge::stats_to_csv(report));
  std::cerr << "wrote " << o.out << " and " << csv << "\n";
  return 0;
}

int run_split(const Options& o) {
  forge::SplitRatios ratios;
  if (!o.ratios.empty()) {
    if (o.ratios.size() != 3) throw forge::ConfigError("--ratios takes train,valid,test");
    ratios = {o.ratios[0], o.ratios[1], o.ratios[2]};
  }
  auto examples = forge::assign_splits(forge::read_dataset(o.dataset), o.seed, ratios);
  forge::write_dataset(o.out, examples);
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& qa : examples) ++counts[static_cast<int>(*qa.split)];
  std::cerr << "train " << counts[0] << ", valid " << counts[1] << ", test " << counts[2] << "\n";
  return 0;
}

int run_eval(const Options& o) {
  const auto examples = forge::read_dataset(o.dataset);
  forge::PredictionFile preds;
  nlohmann::json out;
  if (!o.baseline.empty()) {
    if (o.baseline != "most-frequent") throw forge::ConfigError("unknown baseline '" + o.baseline + "'");
    preds = forge::most_frequent_baseline(examples);
    nlohmann::json modal;
    for (const auto& [s, a] : forge::modal_train_answers(examples)) {
      modal[std::string(forge::to_string(s))] = a;
    }
    out["baseline"] = {{"name", o.baseline}, {"modal_train_answer", modal}};
    if (!o.predictions.empty()) forge::write_predictions(o.predictions, preds);
  } else {
    preds = forge::read_predictions(o.predictions);
  }
  const auto report = forge::accuracy(preds, examples);
  out["accuracy"] = forge::report_to_json(report);
  if (!report.empty()) {
    nlohmann::json guess;
    for (const auto& [s, v] : forge::random_guess_expectation(examples)) {
      guess[std::string(forge::to_string(s))] = v;
    }
    out["random_guess"] = guess;
  }
  if (!o.out.empty()) forge::io::write_text(o.out, out.dump(2) + "\n");
  print_json(out);
  if (report.empty()) {
    std::cerr << "test split is empty; accuracy is undefined\n";
    return 1;
  }
  if (report.missing > 0) std::cerr << report.missing << " test examples have no prediction\n";
  return 0;
}

int run_attn_check(const Options& o) {
  namespace att = forge::attention;
  std::map<std::string, std::pair<std::size_t, double>> failures;  // name -> (count, worst)
  std::map<std::string, double> worst;
  std::size_t fixtures = 0;
  auto consume = [&](const att::Fixture& f, std::uint64_t seed) {
    ++fixtures;
    for (const auto& r : att::check_invariants(f, seed)) {
      worst[r.name] = std::max(worst[r.name], r.worst);
      if (!r.passed) {
        auto& slot = failures[r.name];
        ++slot.first;
        slot.second = std::max(slot.second, r.worst);
      }
    }
  };
  if (!o.fixture.empty()) {
    consume(att::fixture_from_json(forge::io::read_json_file(o.fixture)), o.seed);
  } else {
    forge::Rng rng(o.seed);
    for (std::size_t i = 0; i < o.random_fixtures; ++i) {
      consume(att::random_fixture(rng), forge::Rng::derive(o.seed, i));
    }
  }
  for (const auto& [name, w] : worst) {
    auto it = failures.find(name);
    std::cout << (it == failures.end() ? "ok   " : "FAIL ") << name << "  worst deviation " << w;
    if (it != failures.end()) std::cout << "  (" << it->second.first << " fixtures)";
    std::cout << "\n";
  }
  std::cout << fixtures << " fixtures checked\n";
  return failures.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic temporal VideoQA dataset engine"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Simulate gameplay sessions");
  sim->add_option("--config", o.config, "Simulator config (JSON)");
  sim->add_option("--seed", o.seed, "Random seed");
  sim->add_option("--count", o.count, "Number of sessions")->check(CLI::PositiveNumber);
  sim->add_option("--lexicon", o.lexicon, "Lexicon (JSON)");
  sim->add_option("--out", o.out, "Output sessions (JSONL)")->required();

  auto* gen = app.add_subcommand("generate", "Generate QA pairs from sessions");
  gen->add_option("--sessions", o.sessions, "Sessions (JSONL)")->required();
  gen->add_option("--config", o.config, "Generator config (JSON)");
  gen->add_option("--lexicon", o.lexicon, "Lexicon (JSON)");
  gen->add_option("--templates", o.templates, "Template pool (JSON)");
  gen->add_option("--seed", o.seed, "Random seed");
  gen->add_option("--out", o.out, "Output dataset (JSONL)")->required();

  auto* val = app.add_subcommand("validate", "Replay a dataset through the oracle");
  val->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
  val->add_option("--sessions", o.sessions, "Sessions (JSONL)")->required();
  val->add_option("--lexicon", o.lexicon, "Lexicon (JSON)");
  val->add_option("--templates", o.templates, "Template pool (JSON)");
  val->add_option("--out", o.out, "Write the report here as well");

  auto* st = app.add_subcommand("stats", "Dataset distribution report");
  st->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
  st->add_option("--sessions", o.sessions, "Sessions (JSONL), enables per-clip event counts");
  st->add_option("--lexicon", o.lexicon, "Lexicon (JSON)");
  st->add_option("--out", o.out, "Report (JSON); a CSV is written next to it");
  st->add_option("--csv", o.csv, "CSV path (default: --out with .csv)");

  auto* sp = app.add_subcommand("split", "Assign train/valid/test splits");
  sp->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
  sp->add_option("--seed", o.seed, "Random seed");
  sp->add_option("--ratios", o.ratios, "train valid test ratios")->delimiter(',');
  sp->add_option("--out", o.out, "Output dataset (JSONL)")->required();

  auto* ev = app.add_subcommand("eval", "Accuracy on the test split");
  ev->add_option("--dataset", o.dataset, "Split dataset (JSONL)")->required();
  auto* pred = ev->add_option("--predictions", o.predictions,
                              "Predictions (JSONL); with --baseline, where to write them");
  auto* base = ev->add_option("--baseline", o.baseline, "Baseline to evaluate")
                   ->check(CLI::IsMember({"most-frequent"}));
  ev->add_option("--out", o.out, "Report (JSON)");
  (void)pred;
  (void)base;

  auto* ac = app.add_subcommand("attn-check", "Check attention invariants");
  auto* fix = ac->add_option("--fixture", o.fixture, "Fixture (JSON)");
  auto* rnd = ac->add_option("--random", o.random_fixtures, "Number of random fixtures");
  fix->excludes(rnd);
  ac->add_option("--seed", o.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (ev->parsed() && o.baseline.empty() && o.predictions.empty()) {
    std::cerr << "eval: give --predictions or --baseline\n";
    return 2;
  }
  if (ac->parsed() && o.fixture.empty() && o.random_fixtures == 0) {
    std::cerr << "attn-check: give --fixture or --random N\n";
    return 2;
  }

  try {
    if (sim->parsed()) return run_simulate(o);
    if (gen->parsed()) return run_generate(o);
    if (val->parsed()) return run_validate(o);
    if (st->parsed()) return run_stats(o);
    if (sp->parsed()) return run_split(o);
    if (ev->parsed()) return run_eval(o);
    if (ac->parsed()) return run_attn_check(o);
  } catch (const forge::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
