#pragma once

// Scenario configuration: a JSON tree with sections geometry, fluid, wall,
// plaque (optional), inlet, weights and training. Every key names its CGS
// unit; unknown and missing keys are errors.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "vpinn/domain.hpp"
#include "vpinn/nets.hpp"
#include "vpinn/physics.hpp"
#include "vpinn/trainer.hpp"

namespace vpinn {

struct ScenarioConfig {
  std::string name = "cylinder";
  Problem problem;
  LossWeights weights;
  TrainingPlan plan;
  NetworkArchitecture architecture;
  SampleCounts samples;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  int workers = 1;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  bool operator==(const ScenarioConfig& other) const;
};

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ScenarioConfig preset(const std::string& name);

std::string to_json(const ScenarioConfig& c);
/// Parses and validates. Throws ConfigError (or FormatError for malformed JSON).
ScenarioConfig from_json(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const ScenarioConfig& c);

}  // namespace vpinn
