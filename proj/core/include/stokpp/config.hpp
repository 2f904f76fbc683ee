#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stokpp/ensemble.hpp"

namespace stokpp {

/// Flat `key = value` text. `#` starts a comment; blank lines are ignored;
/// keys are dotted (noise.kind, solver.dt, ...). A repeated key is an error.
struct ConfigFile {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source;  ///< file name used in diagnostics
  std::string text;    ///< raw contents, hashed into the manifest
  std::map<std::string, Entry> entries;

  bool has(const std::string& key) const { return entries.count(key) != 0; }
};

/// Throws ConfigError("source:line: ...") on malformed lines.
ConfigFile parse_config(std::string_view text, std::string source = "<config>");
ConfigFile load_config(const std::string& path);

/// Builds an experiment from the recognized keys (see docs/config.md). Unknown
/// keys and unparsable values raise ConfigError naming the key and line.
ExperimentConfig to_experiment(const ConfigFile& file);

/// Keys understood by to_experiment, in documentation order.
const std::vector<std::string>& config_keys();

/// Git-style blob hash: SHA-1 of "blob <size>\0" followed by the content, hex.
std::string content_hash(std::string_view content);

/// Provenance record written before any output file of a run.
struct RunManifest {
  std::string command;
  std::string config_source;
  std::string config_hash;
  std::map<std::string, std::string> config;  ///< effective key/value snapshot
  std::uint64_t seed = 0;
  std::string version;
  std::string started;  ///< UTC, ISO 8601
  std::string finished;
  std::vector<std::string> outputs;
  std::string status = "running";
};

/// Effective configuration (defaults filled in) as key/value text.
std::map<std::string, std::string> describe(const ExperimentConfig& config);

std::string library_version();
std::string utc_now();

}  // namespace stokpp
