#include "nesy/detopt.hpp"

#include <numeric>

#include "nesy/errors.hpp"

namespace nesy {

DetOpt identity_map(int concepts) {
  DetOpt map;
  map.concepts = concepts;
  map.image.resize(space_size(concepts));
  std::iota(map.image.begin(), map.image.end(), std::uint32_t{0});
  map.injective = true;
  return map;
}

bool is_ground_truth(const DetOpt& map) {
  for (std::uint32_t g = 0; g < map.image.size(); ++g) {
    if (map.image[g] != g) return false;
  }
  return true;
}

bool is_admissible(const DetOpt& map, const Task& task) {
  if (map.image.size() != task.concept_space()) return false;
  for (std::uint32_t g = 0; g < map.image.size(); ++g) {
    if (!task.consistent(map.image[g], task.label_of(g))) return false;
  }
  return true;
}

bool is_injective(const DetOpt& map) {
  std::vector<bool> seen(space_size(map.concepts), false);
  for (std::uint32_t c : map.image) {
    if (seen.at(c)) return false;
    seen[c] = true;
  }
  return true;
}

bool respects_pins(const DetOpt& map, const Task& task) {
  for (std::uint32_t g : task.pin_list()) {
    if (map.image.at(g) != g) return false;
  }
  return true;
}

void for_each_detopt(const Task& task, const EnumerateOptions& options,
                     const std::function<void(const DetOpt&)>& visit) {
  const Regime regime = regime_for(options.injective, options.respect_pins);
  const BigInt expected = count_detopts(task, regime);
  if (expected > options.limit) throw LimitExceeded(expected.str());

  const std::uint32_t n = task.concept_space();
  std::vector<std::span<const std::uint32_t>> candidates(n);
  std::vector<bool> fixed(n, false);
  std::vector<bool> used(n, false);
  for (std::uint32_t g = 0; g < n; ++g) {
    candidates[g] = task.consistent_concepts(task.label_of(g));
    if (options.respect_pins && task.pinned(g)) {
      fixed[g] = true;
      // A pinned g claims c = g up front so no earlier g can take it.
      used[g] = true;
    }
  }

  DetOpt current;
  current.concepts = task.concepts();
  current.injective = options.injective;
  current.image.assign(n, 0);

  // Iterative depth-first search: cursor[g] is the position in candidates[g]
  // currently assigned, or -1 when g is unassigned.
  std::vector<std::ptrdiff_t> cursor(n, -1);
  std::ptrdiff_t level = 0;
  while (level >= 0) {
    if (level == static_cast<std::ptrdiff_t>(n)) {
      visit(current);
      --level;
      continue;
    }
    const auto g = static_cast<std::uint32_t>(level);
    if (fixed[g]) {
      if (cursor[g] < 0) {
        cursor[g] = 0;
        current.image[g] = g;
        ++level;
      } else {
        cursor[g] = -1;
        --level;
      }
      continue;
    }
    const auto& options_g = candidates[g];
    if (cursor[g] >= 0 && options.injective) used[options_g[cursor[g]]] = false;
    std::ptrdiff_t next = cursor[g] + 1;
    if (options.injective) {
      while (next < static_cast<std::ptrdiff_t>(options_g.size()) && used[options_g[next]]) ++next;
    }
    if (next < static_cast<std::ptrdiff_t>(options_g.size())) {
      cursor[g] = next;
      current.image[g] = options_g[next];
      if (options.injective) used[options_g[next]] = true;
      ++level;
    } else {
      cursor[g] = -1;
      --level;
    }
  }
}

std::vector<DetOpt> enumerate_detopts(const Task& task, const EnumerateOptions& options) {
  std::vector<DetOpt> out;
  for_each_detopt(task, options, [&out](const DetOpt& map) { out.push_back(map); });
  return out;
}

}  // namespace nesy
