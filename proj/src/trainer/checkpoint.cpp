#include "quadtail/trainer/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>

#include "quadtail/common/config.hpp"
#include "quadtail/common/errors.hpp"

namespace quadtail {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint arrays are stored little-endian");

constexpr char kMagic[8] = {'Q', 'T', 'A', 'I', 'L', 'C', 'K', 'P'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void put(std::string& out, const T& value) {
  out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CheckpointError("checkpoint is truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

Checkpoint make_checkpoint(const ExperimentConfig& config, std::uint64_t seed, std::int64_t iteration,
                           const CurriculumState& curriculum, const ActorCritic& policy, double learning_rate,
                           const Adam* optimizer) {
  Checkpoint c;
  c.iteration = iteration;
  c.seed = seed;
  c.config_yaml = dump_config(experiment_to_config(config));
  c.curriculum = curriculum;
  c.learning_rate = learning_rate;
  c.obs_dim = policy.obs_dim();
  c.act_dim = policy.act_dim();
  c.parameters = policy.parameters();
  c.normalizer_count = policy.normalizer().count();
  c.normalizer_mean = policy.normalizer().mean();
  c.normalizer_variance = policy.normalizer().variance();
  if (optimizer) c.adam = Checkpoint::AdamState{optimizer->steps(), optimizer->first_moment(), optimizer->second_moment()};
  return c;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::vector<std::pair<std::string, const VecX*>> arrays{
      {"parameters", &c.parameters}, {"normalizer_mean", &c.normalizer_mean},
      {"normalizer_variance", &c.normalizer_variance}};
  if (c.adam) {
    arrays.emplace_back("adam_first_moment", &c.adam->first_moment);
    arrays.emplace_back("adam_second_moment", &c.adam->second_moment);
  }
  nlohmann::json h;
  h["format"] = "quadtail-checkpoint";
  h["iteration"] = c.iteration;
  h["seed"] = c.seed;
  h["config"] = c.config_yaml;
  h["curriculum"] = {{"kind", to_string(c.curriculum.kind)},
                     {"iteration", c.curriculum.iteration},
                     {"reward_step", c.curriculum.reward_step},
                     {"threshold", c.curriculum.threshold}};
  h["learning_rate"] = c.learning_rate;
  h["obs_dim"] = c.obs_dim;
  h["act_dim"] = c.act_dim;
  h["normalizer_count"] = c.normalizer_count;
  if (c.adam) h["adam_steps"] = c.adam->steps;
  for (const auto& [name, v] : arrays) h["arrays"].push_back({{"name", name}, {"size", v->size()}});
  const std::string header = h.dump();

  std::string bytes(kMagic, sizeof(kMagic));
  put(bytes, Checkpoint::kVersion);
  put(bytes, static_cast<std::uint64_t>(header.size()));
  bytes += header;
  for (const auto& [name, v] : arrays)
    bytes.append(reinterpret_cast<const char*>(v->data()), sizeof(double) * static_cast<std::size_t>(v->size()));
  put(bytes, fnv1a(bytes));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write checkpoint " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("failed writing checkpoint " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    throw CheckpointError(path.string() + " is not a checkpoint");
  std::size_t pos = sizeof(kMagic);
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != Checkpoint::kVersion)
    throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                          std::to_string(Checkpoint::kVersion) + ")");
  std::size_t tail = bytes.size() - 8;
  const auto stored = take<std::uint64_t>(bytes, tail);
  if (stored != fnv1a(bytes.substr(0, bytes.size() - 8))) throw CheckpointError("checkpoint checksum mismatch");
  const auto header_size = take<std::uint64_t>(bytes, pos);
  if (pos + header_size > bytes.size() - 8) throw CheckpointError("checkpoint is truncated");
  const std::string header = bytes.substr(pos, header_size);
  pos += header_size;

  Checkpoint c;
  try {
    const auto h = nlohmann::json::parse(header);
    c.iteration = h.at("iteration").get<std::int64_t>();
    c.seed = h.at("seed").get<std::uint64_t>();
    c.config_yaml = h.at("config").get<std::string>();
    const auto& cur = h.at("curriculum");
    c.curriculum = CurriculumState::initial(parse_curriculum_kind(cur.at("kind").get<std::string>().c_str()),
                                            cur.at("threshold").get<double>());
    c.curriculum.iteration = cur.at("iteration").get<std::int64_t>();
    c.curriculum.reward_step = cur.at("reward_step").get<std::int64_t>();
    c.curriculum.refresh();
    c.learning_rate = h.at("learning_rate").get<double>();
    c.obs_dim = h.at("obs_dim").get<int>();
    c.act_dim = h.at("act_dim").get<int>();
    c.normalizer_count = h.at("normalizer_count").get<double>();
    std::map<std::string, VecX> arrays;
    for (const auto& a : h.at("arrays")) {
      const auto n = a.at("size").get<std::size_t>();
      if (pos + n * sizeof(double) > bytes.size() - 8) throw CheckpointError("checkpoint is truncated");
      VecX v(static_cast<Eigen::Index>(n));
      std::memcpy(v.data(), bytes.data() + pos, n * sizeof(double));
      pos += n * sizeof(double);
      arrays[a.at("name").get<std::string>()] = std::move(v);
    }
    if (pos != bytes.size() - 8) throw CheckpointError("checkpoint has trailing bytes");
    c.parameters = arrays.at("parameters");
    c.normalizer_mean = arrays.at("normalizer_mean");
    c.normalizer_variance = arrays.at("normalizer_variance");
    if (h.contains("adam_steps"))
      c.adam = Checkpoint::AdamState{h.at("adam_steps").get<std::int64_t>(), arrays.at("adam_first_moment"),
                                     arrays.at("adam_second_moment")};
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw CheckpointError("checkpoint is missing an array");
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  }
  return c;
}

ExperimentConfig checkpoint_experiment(const Checkpoint& c) {
  try {
    return experiment_from_config(parse_config_string(c.config_yaml));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config is invalid: ") + e.what());
  }
}

ActorCritic restore_policy(const Checkpoint& c) {
  const ExperimentConfig exp = checkpoint_experiment(c);
  ActorCritic policy(c.obs_dim, c.act_dim, exp.policy, c.seed);
  if (policy.num_parameters() != c.parameters.size())
    throw CheckpointError("checkpoint holds " + std::to_string(c.parameters.size()) +
                          " parameters but the network needs " + std::to_string(policy.num_parameters()));
  if (c.normalizer_mean.size() != c.obs_dim || c.normalizer_variance.size() != c.obs_dim)
    throw CheckpointError("normalizer size differs from the observation size");
  policy.set_parameters(c.parameters);
  policy.normalizer().set_state(c.normalizer_count, c.normalizer_mean, c.normalizer_variance);
  return policy;
}

void export_policy(const Checkpoint& c, const std::filesystem::path& path) {
  const ActorCritic policy = restore_policy(c);
  const ExperimentConfig exp = checkpoint_experiment(c);
  auto vec = [](const VecX& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json j;
  j["format"] = "quadtail-policy";
  j["version"] = 1;
  j["task"] = to_string(exp.env.task);
  j["variant"] = to_string(exp.variant);
  j["obs_dim"] = c.obs_dim;
  j["act_dim"] = c.act_dim;
  j["activation"] = to_string(policy.actor().activation());
  j["action_scale"] = exp.env.action_scale;
  for (int l = 0; l < policy.actor().num_layers(); ++l) {
    const MatX& w = policy.actor().weight(l);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < w.rows(); ++r) rows.push_back(vec(w.row(r).transpose()));
    j["layers"].push_back({{"weight", rows}, {"bias", vec(policy.actor().bias(l))}});
  }
  j["log_std"] = vec(policy.log_std());
  j["normalizer"] = {{"enabled", exp.policy.normalize_observations},
                     {"count", policy.normalizer().count()},
                     {"mean", vec(policy.normalizer().mean())},
                     {"variance", vec(policy.normalizer().variance())},
                     {"epsilon", 1e-8},
                     {"clip", ObservationNormalizer::kClip}};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << j.dump(1) << "\n";
}

}  // namespace quadtail
