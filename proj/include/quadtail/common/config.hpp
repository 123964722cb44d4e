#pragma once

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "quadtail/common/errors.hpp"

namespace quadtail {

// Configuration files are YAML key-value trees. A top-level `include` key
// (a path or a list of paths, relative to the including file) pulls in other
// files first; keys of the including file override included ones.

YAML::Node load_config_file(const std::filesystem::path& path);
YAML::Node parse_config_string(const std::string& text);

/// Deep merge; maps are merged key by key, everything else is replaced.
YAML::Node merge_config(const YAML::Node& base, const YAML::Node& overlay);

std::string dump_config(const YAML::Node& node);

/// Looks up a dotted key path ("ppo.clip"). Returns an undefined node when
/// any segment is missing.
YAML::Node lookup(const YAML::Node& root, std::string_view dotted);

template <typename T>
T read_or(const YAML::Node& root, std::string_view dotted, const T& fallback) {
  YAML::Node node = lookup(root, dotted);
  if (!node.IsDefined() || node.IsNull()) return fallback;
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string(dotted), "cannot convert value");
  }
}

template <typename T>
T read_required(const YAML::Node& root, std::string_view dotted) {
  YAML::Node node = lookup(root, dotted);
  if (!node.IsDefined() || node.IsNull())
    throw ConfigError(std::string(dotted), "missing required field");
  try {
    return node.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string(dotted), "cannot convert value");
  }
}

}  // namespace quadtail
