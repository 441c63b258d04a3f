#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bundle.hpp"
#include "nesy/detopt.hpp"
#include "nesy/errors.hpp"

namespace nesy::cli {

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::string pins_digest(const Task& task) {
  std::string joined;
  for (std::uint32_t g : task.pin_list()) joined += code_string(g, task.concepts()) + ';';
  return fnv1a_hex(joined).substr(0, 8);
}

int cmd_analyze(const std::filesystem::path& task_path, bool csv, std::ostream& out,
                std::ostream& err) {
  try {
    const Task task = load_task_file(task_path);
    const CountReport report = make_count_report(task);
    out << (csv ? render_csv(report) : render_table(report));
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_verify(const std::filesystem::path& task_path, std::uint64_t limit, std::ostream& out,
               std::ostream& err) {
  Task task;
  try {
    task = load_task_file(task_path);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  bool all_pass = true;
  const DetOpt identity = identity_map(task.concepts());
  for (Regime regime : kAllRegimes) {
    const BigInt closed = count_detopts(task, regime);
    EnumerateOptions options;
    options.injective = regime_injective(regime);
    options.respect_pins = regime_supervised(regime);
    options.limit = limit;

    std::uint64_t enumerated = 0;
    std::string problem;
    bool saw_identity = false;
    std::vector<std::uint32_t> previous;
    try {
      for_each_detopt(task, options, [&](const DetOpt& map) {
        ++enumerated;
        if (!problem.empty()) return;
        if (!is_admissible(map, task)) problem = "inadmissible map";
        else if (options.injective && !is_injective(map)) problem = "non-injective map";
        else if (options.respect_pins && !respects_pins(map, task)) problem = "pin violated";
        else if (!previous.empty() && !(previous < map.image)) problem = "order violated";
        previous = map.image;
        saw_identity = saw_identity || map.image == identity.image;
      });
    } catch (const LimitExceeded& e) {
      out << fmt::format("{:<4} SKIPPED(LimitExceeded {})\n", regime_name(regime), e.count());
      continue;
    }
    if (problem.empty() && !saw_identity) problem = "identity missing";
    const bool pass = problem.empty() && BigInt(enumerated) == closed;
    all_pass = all_pass && pass;
    out << fmt::format("{:<4} {} enumerated={} closed_form={}{}\n", regime_name(regime),
                       pass ? "PASS" : "FAIL", enumerated, closed.str(),
                       problem.empty() ? "" : " (" + problem + ")");
  }
  return all_pass ? 0 : 2;
}

SweepSummary run_sweep(const std::filesystem::path& task_path, const TrainOptions& options) {
  if (options.seeds < 1) throw Error("--seeds must be >= 1");
  if (options.jobs < 1) throw Error("--jobs must be >= 1");
  if (options.out_dir.empty()) throw Error("--out is required");
  const Task task = load_task_file(task_path);
  if (options.sup && !task.has_pins()) throw NoPins();

  TrainConfig base;
  base.learning_rate = options.learning_rate;
  base.epochs = options.epochs;
  base.hidden = options.hidden;
  base.lambda_rec = options.rec ? 1.0 : 0.0;
  base.lambda_concept = options.sup ? 1.0 : 0.0;
  base.validate();

  SweepSummary summary;
  summary.task_id = task_path.stem().string();
  summary.counted_regime = regime_for(options.rec, options.sup);
  summary.lambda_rec = base.lambda_rec;
  summary.lambda_concept = base.lambda_concept;
  summary.pins_digest = options.sup ? pins_digest(task) : "-";
  summary.regime = regime_name(summary.counted_regime);
  if (options.sup) summary.regime += "-p" + summary.pins_digest;
  summary.theoretical_count = count_detopts(task, summary.counted_regime);

  std::filesystem::create_directories(options.out_dir);
  summary.runs.resize(static_cast<std::size_t>(options.seeds));

  // Each worker owns distinct indices and distinct bundle directories.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < summary.runs.size(); i = next++) {
      SeedOutcome& outcome = summary.runs[i];
      outcome.seed = options.seed_base + i;
      TrainConfig cfg = base;
      cfg.seed = outcome.seed;
      const RunMeta meta{summary.task_id, summary.regime, outcome.seed,
                         summary.theoretical_count.str()};
      try {
        outcome.report = train(task, cfg);
      } catch (const Error& e) {
        outcome.error = e.what();
      }
      outcome.digest = fnv1a_hex(write_bundle(options.out_dir, meta,
                                              outcome.report ? &*outcome.report : nullptr, cfg,
                                              outcome.error));
    }
  };
  const int threads = std::min(options.jobs, options.seeds);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const SeedOutcome& run : summary.runs) {
    if (!run.report) {
      ++summary.failed;
      continue;
    }
    if (!run.report->optimal) continue;
    ++summary.optimal;
    ++(run.report->rs ? summary.rs : summary.ground_truth);
  }
  return summary;
}

std::string render_summary(const SweepSummary& summary) {
  std::string out = fmt::format("task={} regime={} lambda_rec={} lambda_concept={} pins={}\n",
                                summary.task_id, summary.regime, summary.lambda_rec,
                                summary.lambda_concept, summary.pins_digest);
  for (const SeedOutcome& run : summary.runs) {
    if (!run.report) {
      out += fmt::format("seed {:>4}  FAILED {}  digest={}\n", run.seed, run.error, run.digest);
      continue;
    }
    out += fmt::format("seed {:>4}  optimal={} {}  digest={}\n", run.seed,
                       run.report->optimal ? "true " : "false", render_summary_line(*run.report),
                       run.digest);
  }
  out += fmt::format("runs={} optimal={} rs={} ground_truth={} failed={} theoretical_detopts={}\n",
                     summary.runs.size(), summary.optimal, summary.rs, summary.ground_truth,
                     summary.failed, summary.theoretical_count.str());
  return out;
}

int cmd_train(const std::filesystem::path& task_path, const TrainOptions& options,
              std::ostream& out, std::ostream& err) {
  try {
    out << render_summary(run_sweep(task_path, options));
    return 0;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int cmd_report(const std::filesystem::path& dir, std::ostream& out, std::ostream& err) {
  std::vector<RunRecord> records;
  try {
    for (const auto& file : find_bundles(dir)) records.push_back(read_run_csv(file));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  if (records.empty()) {
    err << "error: no run bundles found under '" << dir.string() << "'\n";
    return 1;
  }
  auto field = [](const RunRecord& r, const std::string& key) {
    auto it = r.find(key);
    return it == r.end() ? std::string{} : it->second;
  };
  auto seed_of = [&](const RunRecord& r) { return std::stoull(field(r, "seed")); };
  std::sort(records.begin(), records.end(), [&](const RunRecord& a, const RunRecord& b) {
    const auto ka = std::make_tuple(field(a, "task"), field(a, "regime"), seed_of(a));
    const auto kb = std::make_tuple(field(b, "task"), field(b, "regime"), seed_of(b));
    return ka < kb;
  });

  static const std::vector<std::string> kColumns = {
      "task",  "regime",     "seed",      "status",    "optimal", "rs",
      "determinism", "min_label_prob", "nll", "rec", "concept", "admissible",
      "injective", "lambda_rec", "lambda_concept", "learning_rate", "epochs", "hidden", "map"};
  std::string runs_csv;
  for (std::size_t i = 0; i < kColumns.size(); ++i) runs_csv += (i ? "," : "") + kColumns[i];
  runs_csv += '\n';

  struct Group {
    std::size_t runs = 0, optimal = 0, rs = 0, ground_truth = 0, failed = 0;
    std::string theoretical;
  };
  std::map<std::pair<std::string, std::string>, Group> groups;
  for (const RunRecord& r : records) {
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
      runs_csv += (i ? "," : "") + field(r, kColumns[i]);
    }
    runs_csv += '\n';
    Group& g = groups[{field(r, "task"), field(r, "regime")}];
    ++g.runs;
    g.theoretical = field(r, "theoretical_count");
    if (field(r, "status") != "ok") {
      ++g.failed;
    } else if (field(r, "optimal") == "true") {
      ++g.optimal;
      ++(field(r, "rs") == "true" ? g.rs : g.ground_truth);
    }
  }

  std::string regimes_csv = "task,regime,runs,optimal,rs,ground_truth,failed,theoretical_detopts\n";
  for (const auto& [key, g] : groups) {
    regimes_csv += fmt::format("{},{},{},{},{},{},{},{}\n", key.first, key.second, g.runs,
                               g.optimal, g.rs, g.ground_truth, g.failed, g.theoretical);
  }
  try {
    std::ofstream(dir / "runs.csv", std::ios::binary | std::ios::trunc) << runs_csv;
    std::ofstream(dir / "regimes.csv", std::ios::binary | std::ios::trunc) << regimes_csv;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  out << runs_csv << '\n' << regimes_csv;
  return 0;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Count, enumerate and reproduce reasoning shortcuts of neuro-symbolic tasks"};
  app.require_subcommand(1);

  std::string task_path;
  bool csv = false;
  auto* analyze = app.add_subcommand("analyze", "Per-label sets and deterministic-optimum counts");
  analyze->add_option("task", task_path, "Task file")->required();
  analyze->add_flag("--csv", csv, "Emit CSV instead of an aligned table");

  std::uint64_t limit = 1'000'000;
  auto* verify = app.add_subcommand("verify", "Check closed-form counts by brute-force enumeration");
  verify->add_option("task", task_path, "Task file")->required();
  verify->add_option("--limit", limit, "Largest count to enumerate")->capture_default_str();

  TrainOptions topts;
  std::string out_dir;
  auto* train_cmd = app.add_subcommand("train", "Seeded training sweep");
  train_cmd->add_option("task", task_path, "Task file")->required();
  train_cmd->add_option("--seeds", topts.seeds, "Number of seeds")
      ->check(CLI::Range(1, 1'000'000))
      ->capture_default_str();
  train_cmd->add_option("--seed-base", topts.seed_base, "Seed of the first run")
      ->capture_default_str();
  train_cmd->add_flag("--rec", topts.rec, "Add the reconstruction term (lambda_R = 1)");
  train_cmd->add_flag("--sup", topts.sup, "Add concept supervision on the task's pins (lambda_C = 1)");
  train_cmd->add_option("--lr", topts.learning_rate, "Learning rate")->capture_default_str();
  train_cmd->add_option("--epochs", topts.epochs, "Full-batch epochs")
      ->check(CLI::Range(1, 100'000'000))
      ->capture_default_str();
  train_cmd->add_option("--hidden", topts.hidden, "Hidden width")
      ->check(CLI::Range(1, 1'000'000))
      ->capture_default_str();
  train_cmd->add_option("--jobs", topts.jobs, "Parallel runs")
      ->check(CLI::Range(1, 1024))
      ->capture_default_str();
  train_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Merge run bundles into CSV summaries");
  report->add_option("dir", report_dir, "Directory of run bundles")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    for (auto* sub : {analyze, verify, train_cmd, report}) {
      if (sub->parsed()) {
        out << sub->help();
        return 0;
      }
    }
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return 1;
  }

  if (*analyze) return cmd_analyze(task_path, csv, out, err);
  if (*verify) return cmd_verify(task_path, limit, out, err);
  if (*train_cmd) {
    topts.out_dir = out_dir;
    return cmd_train(task_path, topts, out, err);
  }
  return cmd_report(report_dir, out, err);
}

}  // namespace nesy::cli
