#pragma once

#include <iosfwd>
#include <string>

#include "regraph/harness.hpp"

namespace regraph {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parsed run configuration: training/model/data settings plus optional input
// file paths for the handcrafted transfer-graph schemes.
struct RunConfig {
  TrainConfig train;
  std::string attribute_table_path;
  std::string cooccurrence_table_path;
  std::string embedding_table_path;
  std::string src_names_path;
  std::string tgt_names_path;
};

// INI-style grammar: [section] headers, `key = value` lines, `#` comments.
// Unknown sections/keys are rejected with their line number.
RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

// Effective config echoed into run output directories.
void write_config(std::ostream& os, const RunConfig& cfg);

}  // namespace regraph
