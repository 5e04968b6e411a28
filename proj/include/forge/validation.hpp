#pragma once

#include <map>
#include <string>
#include <vector>

#include "forge/chunk.hpp"
#include "forge/lexicon.hpp"
#include "forge/model.hpp"
#include "forge/templates.hpp"

namespace forge {

/// Outcome of replaying a dataset against its sessions.
struct ValidationReport {
  std::size_t examples = 0;
  std::map<std::string, std::size_t> checked;   // check name -> examples it applied to
  std::map<std::string, std::size_t> failures;  // check name -> failing examples
  std::vector<std::string> messages;            // first few failures, human readable

  bool ok() const { return failures.empty(); }
};

/// Re-derives every example from its session: oracle answer (singleton and
/// equal to the stored answer), subset, temporal markers, distractor counts,
/// counting constraint effect, reference uniqueness, answer vocabulary and,
/// when `templates` is given, the question text.
ValidationReport validate_dataset(const std::vector<QAPair>& examples,
                                  const std::vector<GameplaySession>& sessions,
                                  const Lexicon& lexicon, const TemplatePool* templates = nullptr,
                                  std::size_t max_messages = 20);

nlohmann::json validation_to_json(const ValidationReport& report);

}  // namespace forge
