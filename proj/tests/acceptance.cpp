// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
// Usage: nesy_acceptance <fixtures-dir>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "bundle.hpp"
#include "commands.hpp"
#include "nesy/counting.hpp"
#include "nesy/detopt.hpp"
#include "nesy/trainer.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace nesy;
using namespace nesy::cli;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Fails the criterion with a message unless cond holds.
void expect(Outcome& o, bool cond, const std::string& what) {
  if (!cond && o.pass) {
    o.pass = false;
    o.detail = what;
  }
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nesy_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TrainOptions sweep_options(const fs::path& out) {
  TrainOptions opts;
  opts.seeds = 20;
  opts.out_dir = out;
  return opts;
}

Outcome xor_counts(const fs::path& fixtures) {
  Outcome o;
  std::ostringstream out, err;
  const int code = cmd_analyze(fixtures / "xor.task", true, out, err);
  expect(o, code == 0, "analyze exited " + std::to_string(code));
  expect(o, out.str() ==
                "label,s_size,nu,n_L,n_LR,n_LC,n_LRC\n"
                "0,4,0,256,24,256,24\n"
                "1,4,0,256,24,256,24\n"
                "product,8,0,65536,576,65536,576\n",
         "unexpected report:\n" + out.str());
  o.detail = o.pass ? "|S_0|=|S_1|=4 n_L=65536 n_LR=576" : o.detail;
  return o;
}

Outcome oracle_equivalence(const fs::path& fixtures) {
  Outcome o;
  const fs::path dir = scratch("verify");
  std::mt19937_64 rng(20240601);
  std::vector<fs::path> tasks;
  for (int i = 0; i < 24; ++i) {
    const int k = 1 + i % 4;
    const int l = 1 + (i / 4) % 2;
    const TaskSpec spec = testing::random_task_spec(rng, k, l, i % 3 == 0 ? 0.0 : 0.3);
    const fs::path path = dir / fmt::format("random_{:02}.task", i);
    std::ofstream(path) << format_task_spec(spec);
    tasks.push_back(path);
  }
  tasks.push_back(fixtures / "xor.task");
  tasks.push_back(fixtures / "xor_half_pins.task");
  tasks.push_back(fixtures / "xor_full_pins.task");

  std::size_t checked = 0;
  std::size_t skipped = 0;
  for (const fs::path& path : tasks) {
    std::ostringstream out, err;
    const int code = cmd_verify(path, 1'000'000, out, err);
    expect(o, code == 0, fmt::format("{} exited {}: {}{}", path.filename().string(), code,
                                     out.str(), err.str()));
    std::istringstream lines(out.str());
    for (std::string line; std::getline(lines, line);) {
      if (line.find(" PASS ") != std::string::npos) ++checked;
      if (line.find("SKIPPED") != std::string::npos) ++skipped;
    }
    if (path.filename() == "xor.task") {
      expect(o, out.str().find("LR   PASS enumerated=576") != std::string::npos,
             "xor injective regime not verified");
    }
  }
  expect(o, checked >= 4 * 20, fmt::format("only {} regimes enumerated", checked));
  if (o.pass) {
    o.detail = fmt::format("{} tasks, {} regimes enumerated and matched, {} above limit",
                           tasks.size(), checked, skipped);
  }
  return o;
}

Outcome supervision_collapse(const fs::path& fixtures) {
  Outcome o;
  const Task task = load_task_file(fixtures / "xor_full_pins.task");
  expect(o, count_supervised(task, false) == 1 && count_supervised(task, true) == 1,
         "supervised counts differ from 1");
  for (bool injective : {false, true}) {
    const auto maps = enumerate_detopts(task, {.injective = injective, .respect_pins = true});
    expect(o, maps.size() == 1 && is_ground_truth(maps.front()),
           "enumeration is not exactly the identity");
  }
  TrainOptions opts = sweep_options(scratch("sup"));
  opts.sup = true;
  const SweepSummary s = run_sweep(fixtures / "xor_full_pins.task", opts);
  for (const SeedOutcome& run : s.runs) {
    if (run.report && run.report->optimal) {
      expect(o, !run.report->rs, fmt::format("seed {} optimal but rs=true", run.seed));
    }
  }
  expect(o, s.optimal >= 18, fmt::format("{}/20 optimal runs", s.optimal));
  if (o.pass) o.detail = fmt::format("counts 1/1, {}/20 optimal, all ground truth", s.optimal);
  return o;
}

Outcome rs_reproduction(const fs::path& fixtures) {
  Outcome o;
  const Task task = load_task_file(fixtures / "xor.task");
  const fs::path out = scratch("plain");
  const SweepSummary s = run_sweep(fixtures / "xor.task", sweep_options(out));
  std::size_t witnesses = 0;
  std::uint64_t first = 0;
  for (const SeedOutcome& run : s.runs) {
    if (!run.report || !run.report->optimal || !run.report->rs) continue;
    const RunReport& r = *run.report;
    bool off_diagonal = false;
    for (std::size_t g = 0; g < r.confusion.size(); ++g) {
      for (std::size_t c = 0; c < r.confusion[g].size(); ++c) {
        off_diagonal = off_diagonal || (g != c && r.confusion[g][c] > 0.0);
      }
    }
    if (off_diagonal && is_admissible(r.extracted, task) && r.admissible) {
      if (witnesses++ == 0) first = run.seed;
    }
  }
  expect(o, witnesses >= 1, "no optimal shortcut run");
  if (o.pass) {
    o.detail = fmt::format("{}/20 optimal, {} admissible non-diagonal shortcuts (first seed {})",
                           s.optimal, witnesses, first);
  }
  return o;
}

Outcome reconstruction_regime(const fs::path& fixtures) {
  Outcome o;
  TrainOptions opts = sweep_options(scratch("rec"));
  opts.rec = true;
  const SweepSummary s = run_sweep(fixtures / "xor.task", opts);
  std::size_t reconstructing = 0;
  std::size_t shortcuts = 0;
  for (const SeedOutcome& run : s.runs) {
    if (!run.report) continue;
    const RunReport& r = *run.report;
    if (!r.optimal || r.losses.reconstruction.value() >= 1e-2) continue;
    ++reconstructing;
    expect(o, r.injective && is_injective(r.extracted),
           fmt::format("seed {} reconstructs but is not injective", run.seed));
    if (r.rs) ++shortcuts;
  }
  expect(o, shortcuts >= 1, "no reconstructing run is a shortcut");
  if (o.pass) {
    o.detail = fmt::format("{} runs optimal with rec < 1e-2, all injective, {} shortcuts",
                           reconstructing, shortcuts);
  }
  return o;
}

Outcome gradient(const fs::path& fixtures) {
  Outcome o;
  const Task task = load_task_file(fixtures / "xor_half_pins.task");
  TrainConfig cfg;
  cfg.lambda_rec = 1.0;
  cfg.lambda_concept = 1.0;
  const double err = gradient_check(task, cfg, 10);
  expect(o, err < 1e-4, fmt::format("max relative error {:.3e}", err));
  if (o.pass) o.detail = fmt::format("max relative error {:.3e} over 10 points", err);
  return o;
}

Outcome invariants(const fs::path& fixtures) {
  Outcome o;
  std::mt19937_64 rng(77);
  std::vector<Task> tasks = {load_task_file(fixtures / "xor.task")};
  for (int i = 0; i < 6; ++i) {
    tasks.push_back(load_task(format_task_spec(testing::random_task_spec(rng, 1 + i % 4, 1 + i % 2, 0.0))));
  }
  std::size_t checks = 0;
  for (const Task& task : tasks) {
    const int k = task.concepts();
    const std::uint32_t n = task.concept_space();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const EncoderParams enc{Mlp::random(k, 8, k, seed, 5, 3.0)};
      const auto dists = encoder_dists(enc, k);
      for (const Categorical& p : dists) {
        double total = 0.0;
        for (std::uint32_t y : task.achievable_labels()) total += label_prob(task, p, y);
        expect(o, std::abs(total - 1.0) < 1e-9, "label probabilities do not sum to 1");
        ++checks;
      }
      // Logistic outputs leave mass everywhere, so the loss is strictly positive
      // unless a single label covers the whole concept space.
      if (task.achievable_labels().size() > 1) {
        expect(o, likelihood_loss(task, dists) > 0.0, "positive-mass encoder has zero loss");
      }

      // Mixture of random admissible det-opts.
      std::vector<Categorical> mix(n, Categorical(n, 0.0));
      const int parts = 1 + static_cast<int>(rng() % 4);
      for (int part = 0; part < parts; ++part) {
        for (std::uint32_t g = 0; g < n; ++g) {
          const auto s = task.consistent_concepts(task.label_of(g));
          mix[g][s[rng() % s.size()]] += 1.0 / parts;
        }
      }
      expect(o, likelihood_loss(task, mix) == 0.0, "admissible mixture has non-zero loss");
      // Move 1e-6 of one row's mass outside S_{h(g)}, when there is an outside.
      const std::uint32_t g = static_cast<std::uint32_t>(rng() % n);
      for (std::uint32_t c = 0; c < n; ++c) {
        if (task.consistent(c, task.label_of(g))) continue;
        for (double& v : mix[g]) v *= 1.0 - 1e-6;
        mix[g][c] += 1e-6;
        expect(o, likelihood_loss(task, mix) > 0.0, "leaked mass has zero loss");
        break;
      }
    }
  }
  if (o.pass) o.detail = fmt::format("{} normalization checks, mixtures exact zero", checks);
  return o;
}

Outcome determinism(const fs::path& fixtures) {
  Outcome o;
  TrainOptions a = sweep_options(scratch("det_a"));
  a.seeds = 3;
  a.rec = true;
  TrainOptions b = a;
  b.out_dir = scratch("det_b");
  run_sweep(fixtures / "xor.task", a);
  run_sweep(fixtures / "xor.task", b);
  std::size_t files = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a.out_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path other = b.out_dir / fs::relative(entry.path(), a.out_dir);
    expect(o, fs::exists(other) && slurp(entry.path()) == slurp(other),
           "differs: " + fs::relative(entry.path(), a.out_dir).string());
    ++files;
  }
  expect(o, files == 15, fmt::format("expected 15 bundle files, found {}", files));
  if (o.pass) o.detail = fmt::format("{} files byte-identical", files);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: nesy_acceptance <fixtures-dir>\n";
    return 2;
  }
  const fs::path fixtures = argv[1];

  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome(const fs::path&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "xor counts", 1.0, xor_counts},
      {2, "oracle equivalence", 60.0, oracle_equivalence},
      {3, "supervision collapse", 120.0, supervision_collapse},
      {4, "shortcut reproduction", 120.0, rs_reproduction},
      {5, "reconstruction regime", 120.0, reconstruction_regime},
      {6, "gradient check", 10.0, gradient},
      {7, "normalization and optimality", 60.0, invariants},
      {8, "determinism", 60.0, determinism},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run(fixtures);
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= c.budget_seconds) {
      outcome.pass = false;
      outcome.detail += fmt::format(" [over the {:.0f} s budget]", c.budget_seconds);
    }
    failures += outcome.pass ? 0 : 1;
    std::cout << fmt::format("[{}] {}. {} ({:.2f} s): {}\n", outcome.pass ? "PASS" : "FAIL", c.id,
                             c.name, seconds, outcome.detail)
              << std::flush;
  }
  std::cout << fmt::format("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
