#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "nesy/task.hpp"

namespace nesy {

using BigInt = boost::multiprecision::cpp_int;

/// Training objective whose deterministic optima are counted.
enum class Regime {
  Likelihood,                  // L
  LikelihoodRec,               // L + R
  LikelihoodConcept,           // L + C
  LikelihoodRecConcept,        // L + R + C
};

inline bool regime_injective(Regime r) {
  return r == Regime::LikelihoodRec || r == Regime::LikelihoodRecConcept;
}
inline bool regime_supervised(Regime r) {
  return r == Regime::LikelihoodConcept || r == Regime::LikelihoodRecConcept;
}
Regime regime_for(bool reconstruction, bool supervision);
/// "L", "LR", "LC" or "LRC".
std::string regime_name(Regime r);

inline constexpr Regime kAllRegimes[] = {Regime::Likelihood, Regime::LikelihoodRec,
                                         Regime::LikelihoodConcept,
                                         Regime::LikelihoodRecConcept};

/// prod_y |S_y|^|S_y|
BigInt count_likelihood(const Task& task);
/// prod_y |S_y|!
BigInt count_likelihood_rec(const Task& task);
/// prod_y |S_y|^(|S_y| - nu_y), or prod_y (|S_y| - nu_y)! with reconstruction.
BigInt count_supervised(const Task& task, bool with_rec);
BigInt count_detopts(const Task& task, Regime regime);

BigInt factorial(std::uint64_t n);

struct CountRow {
  std::uint32_t label = 0;
  std::size_t s_size = 0;
  std::size_t nu = 0;
  BigInt n_l, n_lr, n_lc, n_lrc;
};

struct CountReport {
  int labels = 0;
  std::vector<CountRow> rows;   // achievable labels, ascending
  BigInt n_l, n_lr, n_lc, n_lrc;

  const BigInt& total(Regime r) const;
};

CountReport make_count_report(const Task& task);

/// Aligned text table, one row per label followed by the product row.
std::string render_table(const CountReport& report);
/// CSV with header label,s_size,nu,n_L,n_LR,n_LC,n_LRC; last row is "product".
std::string render_csv(const CountReport& report);

}  // namespace nesy
