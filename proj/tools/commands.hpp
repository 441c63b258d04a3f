#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nesy/counting.hpp"
#include "nesy/trainer.hpp"

namespace nesy::cli {

struct TrainOptions {
  int seeds = 20;
  std::uint64_t seed_base = 0;
  bool rec = false;
  bool sup = false;
  double learning_rate = 0.1;
  int epochs = 5000;
  int hidden = 32;
  int jobs = 1;
  std::filesystem::path out_dir;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::optional<RunReport> report;   // empty when the run failed
  std::string error;
  std::string digest;                // FNV-1a of the run.csv bytes
};

struct SweepSummary {
  std::string task_id;
  std::string regime;        // e.g. "L", "LRC-p3f2a..."
  Regime counted_regime = Regime::Likelihood;
  double lambda_rec = 0.0;
  double lambda_concept = 0.0;
  std::string pins_digest;   // "-" when supervision is off
  std::vector<SeedOutcome> runs;
  std::size_t optimal = 0;
  std::size_t rs = 0;              // optimal runs whose map is not the identity
  std::size_t ground_truth = 0;    // optimal runs recovering the identity
  std::size_t failed = 0;
  BigInt theoretical_count;
};

/// Short hex digest of the supervised set, stable across runs.
std::string pins_digest(const Task& task);
std::string fnv1a_hex(std::string_view bytes);

/// Runs the seeded sweep and writes one bundle directory per seed.
SweepSummary run_sweep(const std::filesystem::path& task_path, const TrainOptions& options);
std::string render_summary(const SweepSummary& summary);

int cmd_analyze(const std::filesystem::path& task_path, bool csv, std::ostream& out,
                std::ostream& err);
int cmd_verify(const std::filesystem::path& task_path, std::uint64_t limit, std::ostream& out,
               std::ostream& err);
int cmd_train(const std::filesystem::path& task_path, const TrainOptions& options,
              std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests; args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nesy::cli
