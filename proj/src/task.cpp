#include "nesy/task.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nesy/errors.hpp"

namespace nesy {

std::vector<std::uint32_t> Task::achievable_labels() const {
  std::vector<std::uint32_t> out;
  out.reserve(s_sets_.size());
  for (const auto& [y, _] : s_sets_) out.push_back(y);
  return out;
}

std::span<const std::uint32_t> Task::consistent_concepts(std::uint32_t y) const {
  auto it = s_sets_.find(y);
  if (it == s_sets_.end()) return {};
  return it->second;
}

std::span<const std::uint32_t> Task::pins_for(std::uint32_t y) const {
  auto it = pins_.find(y);
  if (it == pins_.end()) return {};
  return it->second;
}

std::vector<std::uint32_t> Task::pin_list() const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t g = 0; g < pinned_.size(); ++g) {
    if (pinned_[g]) out.push_back(g);
  }
  return out;
}

Task compile_task(const Formula& knowledge, int concepts, int labels,
                  std::span<const BitVec> pins) {
  if (concepts < 1 || concepts > kMaxWidth) {
    throw Error(fmt::format("concept count {} outside [1, {}]", concepts, kMaxWidth));
  }
  if (labels < 1 || labels > kMaxWidth) {
    throw Error(fmt::format("label count {} outside [1, {}]", labels, kMaxWidth));
  }
  Task task;
  task.concepts_ = concepts;
  task.labels_ = labels;
  task.knowledge_ = knowledge;

  const std::uint32_t nc = space_size(concepts);
  const std::uint32_t ny = space_size(labels);
  task.h_.resize(nc);
  for (std::uint32_t c = 0; c < nc; ++c) {
    const BitVec cv(c, concepts);
    std::size_t hits = 0;
    for (std::uint32_t y = 0; y < ny; ++y) {
      if (knowledge.evaluate(cv, BitVec(y, labels))) {
        if (++hits == 1) task.h_[c] = y;
      }
    }
    if (hits != 1) throw NotWellFormed(c, concepts, hits);
    // c ascends, so every S_y comes out sorted.
    task.s_sets_[task.h_[c]].push_back(c);
  }

  task.pinned_.assign(nc, false);
  for (const BitVec& pin : pins) {
    if (pin.width() != concepts) {
      throw Error(fmt::format("pin {} has {} bits, expected {}", pin.to_string(), pin.width(),
                              concepts));
    }
    task.pinned_[pin.code()] = true;
  }
  for (std::uint32_t g = 0; g < nc; ++g) {
    if (!task.pinned_[g]) continue;
    task.pins_[task.h_[g]].push_back(g);
    ++task.pin_count_;
  }
  return task;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_count(std::string_view value, std::size_t line, std::string_view key) {
  int n = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
  if (ec != std::errc() || ptr != value.data() + value.size() || n < 1 || n > kMaxWidth) {
    throw TaskFileError(line, fmt::format("'{}' needs an integer in [1, {}], got '{}'", key,
                                          kMaxWidth, value));
  }
  return n;
}

}  // namespace

TaskSpec parse_task_spec(std::string_view text) {
  TaskSpec spec;
  // Header keys must appear in this order before any pin line.
  static constexpr std::string_view kHeader[] = {"concepts", "labels", "knowledge"};
  std::size_t header_seen = 0;
  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    const std::size_t end = std::min(text.find('\n', begin), text.size());
    std::string_view line = text.substr(begin, end - begin);
    begin = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto space = line.find_first_of(" \t");
    const std::string_view key = line.substr(0, space);
    const std::string_view value =
        space == std::string_view::npos ? std::string_view{} : trim(line.substr(space));

    if (header_seen < 3) {
      if (key != kHeader[header_seen]) {
        throw TaskFileError(line_no, fmt::format("expected '{}', got '{}'",
                                                 kHeader[header_seen], key));
      }
      if (value.empty()) throw TaskFileError(line_no, fmt::format("'{}' needs a value", key));
      if (header_seen == 0) spec.concepts = parse_count(value, line_no, key);
      if (header_seen == 1) spec.labels = parse_count(value, line_no, key);
      if (header_seen == 2) spec.knowledge = std::string(value);
      ++header_seen;
      continue;
    }
    if (key != "pin") {
      throw TaskFileError(line_no, fmt::format("unexpected '{}' (only 'pin' lines may follow "
                                               "the header)", key));
    }
    if (value.size() != static_cast<std::size_t>(spec.concepts) ||
        value.find_first_not_of("01") != std::string_view::npos) {
      throw TaskFileError(line_no, fmt::format("pin '{}' is not a bitstring of length {}", value,
                                               spec.concepts));
    }
    spec.pins.push_back(BitVec::from_string(value));
  }
  if (header_seen < 3) {
    throw TaskFileError(0, fmt::format("missing '{}' line", kHeader[header_seen]));
  }
  return spec;
}

std::string format_task_spec(const TaskSpec& spec) {
  std::string out = fmt::format("concepts {}\nlabels {}\nknowledge {}\n", spec.concepts,
                                spec.labels, spec.knowledge);
  for (const BitVec& pin : spec.pins) out += fmt::format("pin {}\n", pin.to_string());
  return out;
}

Task load_task(std::string_view text) {
  const TaskSpec spec = parse_task_spec(text);
  Formula knowledge = parse_formula(spec.knowledge, spec.concepts, spec.labels);
  return compile_task(knowledge, spec.concepts, spec.labels, spec.pins);
}

Task load_task_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read task file '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_task(buf.str());
}

}  // namespace nesy
