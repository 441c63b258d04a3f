#include "bundle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nesy/errors.hpp"

namespace nesy::cli {

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v); }
std::string flag(bool b) { return b ? "true" : "false"; }

std::string map_string(const DetOpt& map) {
  std::string out;
  for (std::uint32_t g = 0; g < map.image.size(); ++g) {
    if (g != 0) out += ' ';
    out += code_string(g, map.concepts) + '>' + code_string(map.image[g], map.concepts);
  }
  return out;
}

std::string config_lines(const TrainConfig& cfg) {
  return fmt::format(
      "lambda_rec,{}\nlambda_concept,{}\nlearning_rate,{}\nepochs,{}\nhidden,{}\n",
      num(cfg.lambda_rec), num(cfg.lambda_concept), num(cfg.learning_rate), cfg.epochs,
      cfg.hidden);
}

std::string meta_lines(const RunMeta& meta) {
  return fmt::format("task,{}\nregime,{}\nseed,{}\ntheoretical_count,{}\n", meta.task_id,
                     meta.regime, meta.seed, meta.theoretical_count);
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
  out << bytes;
  if (!out) throw Error(fmt::format("failed writing '{}'", path.string()));
}

}  // namespace

std::string render_run_csv(const RunMeta& meta, const RunReport& report) {
  std::string out = "key,value\n" + meta_lines(meta) + "status,ok\n" + config_lines(report.config);
  const auto& l = report.losses;
  out += fmt::format("nll,{}\n", num(l.likelihood));
  out += fmt::format("rec,{}\n", l.reconstruction ? num(*l.reconstruction) : "");
  out += fmt::format("concept,{}\n", l.supervision ? num(*l.supervision) : "");
  out += fmt::format("total,{}\n", num(l.total));
  out += fmt::format("min_label_prob,{}\n", num(report.min_label_prob));
  out += fmt::format("determinism,{}\n", num(report.determinism));
  out += fmt::format("optimal,{}\n", flag(report.optimal));
  out += fmt::format("deterministic,{}\n", flag(report.deterministic));
  out += fmt::format("rs,{}\n", flag(report.rs));
  out += fmt::format("admissible,{}\n", flag(report.admissible));
  out += fmt::format("injective,{}\n", flag(report.injective));
  out += fmt::format("map,{}\n", map_string(report.extracted));
  return out;
}

std::string render_failed_run_csv(const RunMeta& meta, const TrainConfig& cfg,
                                  const std::string& error) {
  std::string msg = error;
  std::replace(msg.begin(), msg.end(), ',', ';');
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return "key,value\n" + meta_lines(meta) + "status,failed\n" + config_lines(cfg) +
         fmt::format("error,{}\n", msg);
}

std::string render_matrix_csv(const std::vector<std::vector<double>>& rows, int concepts) {
  std::string out = "g\\c";
  for (std::uint32_t c = 0; c < rows.size(); ++c) out += ',' + code_string(c, concepts);
  out += '\n';
  for (std::uint32_t g = 0; g < rows.size(); ++g) {
    out += code_string(g, concepts);
    for (double v : rows[g]) out += ',' + num(v);
    out += '\n';
  }
  return out;
}

std::string render_bits_csv(const std::vector<BitConfusion>& bits) {
  std::string out = "bit,tn,fp,fn,tp\n";
  for (std::size_t j = 0; j < bits.size(); ++j) {
    out += fmt::format("c{},{},{},{},{}\n", j + 1, bits[j].tn, bits[j].fp, bits[j].fn, bits[j].tp);
  }
  return out;
}

std::string render_summary_line(const RunReport& report) {
  return fmt::format("rs={} determinism={:.6f} nll={:.6g}", flag(report.rs), report.determinism,
                     report.losses.likelihood);
}

std::string bundle_name(const RunMeta& meta) {
  return fmt::format("{}_{}_s{}", meta.task_id, meta.regime, meta.seed);
}

std::string write_bundle(const std::filesystem::path& dir, const RunMeta& meta,
                         const RunReport* report, const TrainConfig& cfg,
                         const std::string& error) {
  const std::filesystem::path bundle = dir / bundle_name(meta);
  std::filesystem::create_directories(bundle);
  if (report == nullptr) {
    std::string run = render_failed_run_csv(meta, cfg, error);
    write_file(bundle / "run.csv", run);
    return run;
  }
  const int k = report->extracted.concepts;
  std::string run = render_run_csv(meta, *report);
  write_file(bundle / "run.csv", run);
  write_file(bundle / "concepts.csv", render_matrix_csv(report->confusion, k));
  write_file(bundle / "dist.csv", render_matrix_csv(report->dists, k));
  write_file(bundle / "bits.csv", render_bits_csv(report->bit_confusion));
  write_file(bundle / "summary.txt", render_summary_line(*report) + '\n');
  return run;
}

RunRecord read_run_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read '{}'", file.string()));
  RunRecord record;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    record[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return record;
}

std::vector<std::filesystem::path> find_bundles(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() == "run.csv") out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nesy::cli
