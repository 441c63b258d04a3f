#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nesy/counting.hpp"
#include "nesy/task.hpp"

namespace nesy {

/// A deterministic assignment of a concept vector to every ground-truth
/// vector; image[g] is the concept code predicted for g.
struct DetOpt {
  int concepts = 0;
  std::vector<std::uint32_t> image;
  bool injective = false;   // set when produced by the injective enumerator

  friend bool operator==(const DetOpt&, const DetOpt&) = default;
};

DetOpt identity_map(int concepts);

/// Identity on {0,1}^k. Anything else is a reasoning shortcut.
bool is_ground_truth(const DetOpt& map);
/// image[g] is in S_{h(g)} for every g.
bool is_admissible(const DetOpt& map, const Task& task);
bool is_injective(const DetOpt& map);
/// Every pinned g maps to itself.
bool respects_pins(const DetOpt& map, const Task& task);

struct EnumerateOptions {
  bool injective = false;
  bool respect_pins = false;
  std::uint64_t limit = 1'000'000;
};

/// Visits every admissible map in lexicographic order (g ascending, chosen c
/// ascending). Throws LimitExceeded before visiting anything when the
/// closed-form count for the regime is above the limit.
void for_each_detopt(const Task& task, const EnumerateOptions& options,
                     const std::function<void(const DetOpt&)>& visit);

std::vector<DetOpt> enumerate_detopts(const Task& task, const EnumerateOptions& options);

}  // namespace nesy
