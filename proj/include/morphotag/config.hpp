#pragma once

// Run configuration shared by the CLI commands. Sources are merged as
// built-in defaults < config file < command-line flags.
//
// Config file: `key = value` lines, '#' starts a comment. Keys are the long
// flag names without the leading dashes (e.g. `tagset-map = data/tagset.map`).

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "morphotag/model.hpp"
#include "morphotag/train.hpp"

namespace morphotag {

struct RunConfig {
  std::string train, dev, test, vectors, tagset_map, lexicon, out, model, input, confusion, log, grid;
  bool parallel = false;
  ModelConfig model_config;
  TrainConfig train_config;
  bool seed_set = false;

  // Sets one key. Throws BadConfig for unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  // Effective configuration as sorted `key=value` lines.
  std::string echo() const;

  static const std::vector<std::string_view>& keys();
};

// Parses `key = value` lines. Throws BadConfig on malformed lines or
// duplicate keys.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);

}  // namespace morphotag
