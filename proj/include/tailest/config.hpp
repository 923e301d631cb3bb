#pragma once

#include "tailest/mc_harness.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tailest {

/// A flat, line-oriented key=value config with bracketed section headers.
/// '#' starts a comment; blank lines are ignored; section names repeat
/// (each "[method]" section declares one estimator).
struct ConfigSection {
  std::string name;
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string* find(const std::string& key) const;
};

struct ConfigFile {
  std::vector<ConfigSection> sections;

  static ConfigFile parse(const std::string& text, const std::string& origin = "<config>");
  std::string serialize() const;
};

/// Fully validated run configuration for `simulate`. Every numeric field is
/// checked against its module invariants before any computation starts, and
/// all randomness flows from the mandatory base_seed key.
struct RunConfig {
  ExperimentConfig experiment;

  /// Parses and validates; `seed_override`, when set, replaces base_seed.
  static RunConfig from_config(const ConfigFile& file,
                               std::optional<seed_t> seed_override = std::nullopt);
  static RunConfig from_file(const std::string& path,
                             std::optional<seed_t> seed_override = std::nullopt);

  /// The resolved form (defaults filled in), reparseable: a run is
  /// reproducible from this sidecar alone.
  ConfigFile resolved() const;
};

DistributionModel model_from_section(const ConfigSection& section);
SecondOrderParams params_from_section(const ConfigSection& section);

}  // namespace tailest
