#include "nesy/counting.hpp"

#include <algorithm>

#include <fmt/format.h>


namespace nesy {

namespace {

// 0^0 = 1: a fully supervised label leaves nothing to choose.
BigInt power(std::size_t base, std::size_t exponent) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

}  // namespace

Regime regime_for(bool reconstruction, bool supervision) {
  if (reconstruction) return supervision ? Regime::LikelihoodRecConcept : Regime::LikelihoodRec;
  return supervision ? Regime::LikelihoodConcept : Regime::Likelihood;
}

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Likelihood: return "L";
    case Regime::LikelihoodRec: return "LR";
    case Regime::LikelihoodConcept: return "LC";
    case Regime::LikelihoodRecConcept: return "LRC";
  }
  return "?";
}

BigInt factorial(std::uint64_t n) {
  BigInt out = 1;
  for (std::uint64_t i = 2; i <= n; ++i) out *= i;
  return out;
}

BigInt count_likelihood(const Task& task) {
  BigInt out = 1;
  for (std::uint32_t y : task.achievable_labels()) {
    const std::size_t s = task.consistent_concepts(y).size();
    out *= power(s, s);
  }
  return out;
}

BigInt count_likelihood_rec(const Task& task) {
  BigInt out = 1;
  for (std::uint32_t y : task.achievable_labels()) {
    out *= factorial(task.consistent_concepts(y).size());
  }
  return out;
}

BigInt count_supervised(const Task& task, bool with_rec) {
  BigInt out = 1;
  for (std::uint32_t y : task.achievable_labels()) {
    const std::size_t s = task.consistent_concepts(y).size();
    const std::size_t free = s - task.nu(y);
    out *= with_rec ? factorial(free) : power(s, free);
  }
  return out;
}

BigInt count_detopts(const Task& task, Regime regime) {
  switch (regime) {
    case Regime::Likelihood: return count_likelihood(task);
    case Regime::LikelihoodRec: return count_likelihood_rec(task);
    case Regime::LikelihoodConcept: return count_supervised(task, false);
    case Regime::LikelihoodRecConcept: return count_supervised(task, true);
  }
  return 0;
}

const BigInt& CountReport::total(Regime r) const {
  switch (r) {
    case Regime::Likelihood: return n_l;
    case Regime::LikelihoodRec: return n_lr;
    case Regime::LikelihoodConcept: return n_lc;
    case Regime::LikelihoodRecConcept: return n_lrc;
  }
  return n_l;
}

CountReport make_count_report(const Task& task) {
  CountReport report;
  report.labels = task.labels();
  report.n_l = report.n_lr = report.n_lc = report.n_lrc = 1;
  for (std::uint32_t y : task.achievable_labels()) {
    CountRow row;
    row.label = y;
    row.s_size = task.consistent_concepts(y).size();
    row.nu = task.nu(y);
    row.n_l = power(row.s_size, row.s_size);
    row.n_lr = factorial(row.s_size);
    row.n_lc = power(row.s_size, row.s_size - row.nu);
    row.n_lrc = factorial(row.s_size - row.nu);
    report.n_l *= row.n_l;
    report.n_lr *= row.n_lr;
    report.n_lc *= row.n_lc;
    report.n_lrc *= row.n_lrc;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string render_table(const CountReport& report) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"label", "|S_y|", "nu_y", "n_L", "n_LR", "n_LC", "n_LRC"});
  for (const CountRow& row : report.rows) {
    cells.push_back({code_string(row.label, report.labels), std::to_string(row.s_size),
                     std::to_string(row.nu), row.n_l.str(), row.n_lr.str(), row.n_lc.str(),
                     row.n_lrc.str()});
  }
  cells.push_back({"product", "", "", report.n_l.str(), report.n_lr.str(), report.n_lc.str(),
                   report.n_lrc.str()});

  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      // Label column left-aligned, numbers right-aligned.
      out += i == 0 ? fmt::format("{:<{}}", line[i], width[i])
                    : fmt::format("  {:>{}}", line[i], width[i]);
    }
    out += '\n';
  }
  return out;
}

std::string render_csv(const CountReport& report) {
  std::string out = "label,s_size,nu,n_L,n_LR,n_LC,n_LRC\n";
  std::size_t s_total = 0;
  std::size_t nu_total = 0;
  for (const CountRow& row : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", code_string(row.label, report.labels),
                       row.s_size, row.nu, row.n_l.str(), row.n_lr.str(), row.n_lc.str(),
                       row.n_lrc.str());
    s_total += row.s_size;
    nu_total += row.nu;
  }
  out += fmt::format("product,{},{},{},{},{},{}\n", s_total, nu_total, report.n_l.str(),
                     report.n_lr.str(), report.n_lc.str(), report.n_lrc.str());
  return out;
}

}  // namespace nesy
