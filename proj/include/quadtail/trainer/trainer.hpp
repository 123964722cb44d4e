#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>

#include "quadtail/trainer/checkpoint.hpp"

namespace quadtail {

struct TrainOptions {
  std::ostream* progress = nullptr;  // one line every `progress_every` iterations
  int progress_every = 10;
};

struct TrainResult {
  std::uint64_t seed = 0;
  std::filesystem::path run_dir;
  std::filesystem::path final_checkpoint;
  int iterations = 0;
  double final_mean_reward = 0.0;
  CurriculumState curriculum;
};

/// Columns of iterations.csv for a task whose environments report
/// `info_names`.
std::vector<std::string> iteration_csv_header(const std::vector<std::string>& info_names);

/// One seed: writes config.yaml, iterations.csv, checkpoints/iter_NNNNNN.ckpt
/// every interval and final.ckpt into `run_dir`. A non-finite update saves
/// the last good policy as last_good.ckpt and throws RuntimeFault.
TrainResult train_seed(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& run_dir,
                       const TrainOptions& options = {});

/// All configured seeds; with several seeds each gets output_dir/seed_<n>.
std::vector<TrainResult> train(const ExperimentConfig& config, const TrainOptions& options = {});

enum class Protocol { kTurningSpeeds, kDropGrid, kImpulseGrid, kRandomDrops };

const char* to_string(Protocol p);
Protocol parse_protocol(const std::string& name);

/// Table written as summary.csv plus scalar aggregates for summary.json.
struct ProtocolSummary {
  std::string protocol;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::map<std::string, double> aggregates;
};

struct ProtocolOptions {
  std::uint64_t seed = 12345;
  int random_drops = 50;
  std::filesystem::path model_dir;  // empty: the checkpoint's own
};

/// Runs an evaluation grid with the deterministic policy. When `out_dir` is
/// non-empty, per-episode CSVs and the summary files are written there.
/// Throws CheckpointError when the checkpoint's task cannot run `protocol`.
ProtocolSummary run_protocol(const Checkpoint& checkpoint, Protocol protocol, const std::filesystem::path& out_dir,
                             const ProtocolOptions& options = {});

void write_protocol_summary(const std::filesystem::path& out_dir, const ProtocolSummary& s);

}  // namespace quadtail
