#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nesy/bitvec.hpp"
#include "nesy/formula.hpp"

namespace nesy {

/// Compiled semantics of a knowledge base: the reasoning map h, the sets S_y
/// of concept vectors consistent with each achievable label, and the
/// supervised ground-truth vectors grouped by label.
///
/// Inputs are the ground-truth vectors themselves, so the ground-truth space
/// and the concept space coincide and {g : h(g) = y} is exactly S_y.
class Task {
 public:
  int concepts() const noexcept { return concepts_; }
  int labels() const noexcept { return labels_; }
  const Formula& knowledge() const noexcept { return knowledge_; }

  /// Number of concept vectors, 2^k.
  std::uint32_t concept_space() const noexcept { return space_size(concepts_); }

  /// h(g) as a label code.
  std::uint32_t label_of(std::uint32_t g) const { return h_.at(g); }
  BitVec label_of(BitVec g) const { return BitVec(label_of(g.code()), labels_); }

  /// Achievable label codes (the image of h), ascending.
  std::vector<std::uint32_t> achievable_labels() const;
  bool achievable(std::uint32_t y) const { return s_sets_.contains(y); }

  /// S_y in ascending code order; empty for unachievable labels.
  std::span<const std::uint32_t> consistent_concepts(std::uint32_t y) const;
  /// Supervised ground-truth vectors with h(g) = y, ascending.
  std::span<const std::uint32_t> pins_for(std::uint32_t y) const;
  std::size_t nu(std::uint32_t y) const { return pins_for(y).size(); }

  bool pinned(std::uint32_t g) const { return pinned_.at(g); }
  bool has_pins() const noexcept { return pin_count_ > 0; }
  std::size_t pin_count() const noexcept { return pin_count_; }
  /// All pinned codes, ascending.
  std::vector<std::uint32_t> pin_list() const;

  /// Whether (c, y) satisfies the knowledge, read off the compiled table.
  bool consistent(std::uint32_t c, std::uint32_t y) const { return achievable(y) && h_.at(c) == y; }

 private:
  friend Task compile_task(const Formula&, int, int, std::span<const BitVec>);

  int concepts_ = 0;
  int labels_ = 0;
  Formula knowledge_ = Formula::constant(true);
  std::vector<std::uint32_t> h_;
  std::map<std::uint32_t, std::vector<std::uint32_t>> s_sets_;
  std::map<std::uint32_t, std::vector<std::uint32_t>> pins_;
  std::vector<bool> pinned_;
  std::size_t pin_count_ = 0;
};

/// Enumerates all 2^k * 2^l assignments and builds h and S_y.
/// Throws NotWellFormed when some concept vector is consistent with zero or
/// several labels. Duplicate pins are merged.
Task compile_task(const Formula& knowledge, int concepts, int labels,
                  std::span<const BitVec> pins = {});

/// Contents of a task file before compilation.
struct TaskSpec {
  int concepts = 0;
  int labels = 0;
  std::string knowledge;
  std::vector<BitVec> pins;
};

/// Line-oriented task file:
///   concepts <k>
///   labels <l>
///   knowledge <formula>
///   pin <bitstring>      (any number)
/// `#` starts a comment; blank lines are ignored.
TaskSpec parse_task_spec(std::string_view text);
std::string format_task_spec(const TaskSpec& spec);

Task load_task(std::string_view text);
Task load_task_file(const std::filesystem::path& path);

}  // namespace nesy
