#pragma once

// Test-only helpers: random task generation and brute-force oracles that
// work from the knowledge formula alone, never from compiled Task tables.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "nesy/formula.hpp"
#include "nesy/task.hpp"

namespace nesy::testing {

/// Knowledge text whose label bit j is the DNF of the g with bit j of h(g) set.
/// Every concept vector gets exactly one label, so the task is well formed.
inline std::string knowledge_for_map(const std::vector<std::uint32_t>& h, int concepts,
                                     int labels) {
  std::string text;
  for (int j = 1; j <= labels; ++j) {
    std::string dnf;
    for (std::uint32_t g = 0; g < h.size(); ++g) {
      if (!bit_of(h[g], labels, j)) continue;
      std::string term;
      for (int i = 1; i <= concepts; ++i) {
        if (!term.empty()) term += " & ";
        term += fmt::format("{}c{}", bit_of(g, concepts, i) ? "" : "!", i);
      }
      dnf += (dnf.empty() ? "" : " | ") + ("(" + term + ")");
    }
    if (dnf.empty()) dnf = "false";
    text += (text.empty() ? "" : " & ") + fmt::format("(y{} <-> ({}))", j, dnf);
  }
  return text;
}

/// Random well-formed task with k concepts, l labels and a random pin subset.
inline TaskSpec random_task_spec(std::mt19937_64& rng, int concepts, int labels,
                                 double pin_rate) {
  const std::uint32_t n = space_size(concepts);
  std::uniform_int_distribution<std::uint32_t> label(0, space_size(labels) - 1);
  std::bernoulli_distribution pin(pin_rate);
  std::vector<std::uint32_t> h(n);
  for (auto& y : h) y = label(rng);
  TaskSpec spec;
  spec.concepts = concepts;
  spec.labels = labels;
  spec.knowledge = knowledge_for_map(h, concepts, labels);
  for (std::uint32_t g = 0; g < n; ++g) {
    if (pin(rng)) spec.pins.emplace_back(g, concepts);
  }
  return spec;
}

/// Truth table of K: consistent[c][y].
inline std::vector<std::vector<bool>> truth_table(const Formula& f, int concepts, int labels) {
  std::vector<std::vector<bool>> table(space_size(concepts),
                                       std::vector<bool>(space_size(labels)));
  for (std::uint32_t c = 0; c < table.size(); ++c) {
    for (std::uint32_t y = 0; y < table[c].size(); ++y) {
      table[c][y] = f.evaluate(BitVec(c, concepts), BitVec(y, labels));
    }
  }
  return table;
}

/// Counts, by iterating over every one of the (2^k)^(2^k) total maps, those
/// whose images are all consistent with the label of their source, optionally
/// injective and optionally fixing the pinned vectors.
inline std::uint64_t brute_force_count(const Formula& f, int concepts, int labels,
                                       const std::vector<bool>& pinned, bool injective,
                                       bool respect_pins) {
  const auto table = truth_table(f, concepts, labels);
  const std::uint32_t n = space_size(concepts);
  // Label of g: the unique y with (g, y) |= K.
  std::vector<std::uint32_t> label_of(n);
  for (std::uint32_t g = 0; g < n; ++g) {
    for (std::uint32_t y = 0; y < table[g].size(); ++y) {
      if (table[g][y]) label_of[g] = y;
    }
  }
  std::vector<std::uint32_t> image(n, 0);
  std::uint64_t count = 0;
  while (true) {
    bool ok = true;
    for (std::uint32_t g = 0; g < n && ok; ++g) {
      ok = table[image[g]][label_of[g]] && (!respect_pins || !pinned[g] || image[g] == g);
    }
    if (ok && injective) {
      std::vector<bool> seen(n, false);
      for (std::uint32_t c : image) {
        if (seen[c]) ok = false;
        seen[c] = true;
      }
    }
    if (ok) ++count;
    std::uint32_t pos = 0;
    while (pos < n && ++image[pos] == n) image[pos++] = 0;
    if (pos == n) break;
  }
  return count;
}

}  // namespace nesy::testing
