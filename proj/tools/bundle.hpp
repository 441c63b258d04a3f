#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nesy/task.hpp"
#include "nesy/trainer.hpp"

namespace nesy::cli {

/// Identity of a run inside a sweep, written alongside its report.
struct RunMeta {
  std::string task_id;
  std::string regime;
  std::uint64_t seed = 0;
  std::string theoretical_count;
};

/// key,value lines describing one run; the file a bundle is recognized by.
std::string render_run_csv(const RunMeta& meta, const RunReport& report);
std::string render_failed_run_csv(const RunMeta& meta, const TrainConfig& cfg,
                                  const std::string& error);
/// Square matrix CSV with concept bitstrings as header row and first column.
std::string render_matrix_csv(const std::vector<std::vector<double>>& rows, int concepts);
std::string render_bits_csv(const std::vector<BitConfusion>& bits);
/// `rs=<true|false> determinism=<score> nll=<value>`
std::string render_summary_line(const RunReport& report);

std::string bundle_name(const RunMeta& meta);
/// Writes run.csv, concepts.csv, dist.csv, bits.csv and summary.txt (or just
/// run.csv for a failed run) into dir/bundle_name(meta). Returns run.csv bytes.
std::string write_bundle(const std::filesystem::path& dir, const RunMeta& meta,
                         const RunReport* report, const TrainConfig& cfg,
                         const std::string& error);

using RunRecord = std::map<std::string, std::string>;
RunRecord read_run_csv(const std::filesystem::path& file);
/// Every run.csv below dir, sorted by path.
std::vector<std::filesystem::path> find_bundles(const std::filesystem::path& dir);

}  // namespace nesy::cli
