#include "quadtail/common/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace quadtail {
namespace {

// Rewrites numeric scalars in their shortest round-trip form so that 0.3
// is not dumped as 0.29999999999999999.
YAML::Node shortest_numbers(const YAML::Node& node) {
  if (node.IsMap()) {
    YAML::Node out(YAML::NodeType::Map);
    for (const auto& kv : node) out[kv.first.Scalar()] = shortest_numbers(kv.second);
    return out;
  }
  if (node.IsSequence()) {
    YAML::Node out(YAML::NodeType::Sequence);
    for (const auto& item : node) out.push_back(shortest_numbers(item));
    return out;
  }
  if (!node.IsScalar()) return node;
  const std::string& text = node.Scalar();
  double value = 0.0;
  const auto parsed = std::from_chars(text.data(), text.data() + text.size(), value);
  if (parsed.ec != std::errc() || parsed.ptr != text.data() + text.size()) return node;
  if (text.find_first_of(".eE") == std::string::npos) return node;
  char buf[64];
  const auto printed = std::to_chars(buf, buf + sizeof(buf), value);
  std::string shortest(buf, printed.ptr);
  if (shortest.find_first_of(".eEn") == std::string::npos) shortest += ".0";
  return YAML::Node(shortest);
}

YAML::Node load_recursive(const std::filesystem::path& path, int depth) {
  if (depth > 16) throw ConfigError("include", "include depth exceeded at " + path.string());
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();

  YAML::Node node;
  try {
    node = YAML::Load(buffer.str());
  } catch (const YAML::Exception& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  if (!node.IsDefined() || node.IsNull()) return YAML::Node(YAML::NodeType::Map);
  if (!node.IsMap()) throw ConfigError("", path.string() + ": top level must be a map");

  YAML::Node includes = node["include"];
  if (!includes.IsDefined()) return node;

  std::vector<std::string> paths;
  if (includes.IsScalar()) {
    paths.push_back(includes.as<std::string>());
  } else if (includes.IsSequence()) {
    for (const auto& p : includes) paths.push_back(p.as<std::string>());
  } else {
    throw ConfigError("include", "must be a path or a list of paths");
  }

  YAML::Node merged(YAML::NodeType::Map);
  for (const auto& rel : paths) {
    merged = merge_config(merged, load_recursive(path.parent_path() / rel, depth + 1));
  }
  node.remove("include");
  return merge_config(merged, node);
}

}  // namespace

YAML::Node load_config_file(const std::filesystem::path& path) {
  return load_recursive(path, 0);
}

YAML::Node parse_config_string(const std::string& text) {
  try {
    YAML::Node node = YAML::Load(text);
    if (!node.IsDefined() || node.IsNull()) return YAML::Node(YAML::NodeType::Map);
    return node;
  } catch (const YAML::Exception& e) {
    throw ConfigError("", e.what());
  }
}

YAML::Node merge_config(const YAML::Node& base, const YAML::Node& overlay) {
  if (!overlay.IsDefined()) return YAML::Clone(base);
  if (!base.IsDefined() || !base.IsMap() || !overlay.IsMap()) return YAML::Clone(overlay);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : overlay) {
    const auto key = kv.first.as<std::string>();
    if (out[key].IsDefined()) {
      out[key] = merge_config(out[key], kv.second);
    } else {
      out[key] = YAML::Clone(kv.second);
    }
  }
  return out;
}

std::string dump_config(const YAML::Node& node) {
  YAML::Emitter emitter;
  emitter << shortest_numbers(node);
  return emitter.c_str();
}

YAML::Node lookup(const YAML::Node& root, std::string_view dotted) {
  YAML::Node current = root;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    const auto dot = dotted.find('.', start);
    const auto segment = std::string(dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (!current.IsDefined() || !current.IsMap()) return YAML::Node(YAML::NodeType::Undefined);
    const YAML::Node& view = current;
    YAML::Node next = view[segment];
    if (!next.IsDefined()) return YAML::Node(YAML::NodeType::Undefined);
    current.reset(next);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return current;
}

}  // namespace quadtail
