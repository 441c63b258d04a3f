#include "nesy/errors.hpp"

#include <fmt/format.h>

#include "nesy/bitvec.hpp"

namespace nesy {

ParseError::ParseError(Reason reason, std::size_t position, const std::string& what)
    : Error(fmt::format("{} (at column {})", what, position + 1)),
      reason_(reason),
      position_(position) {}

NotWellFormed::NotWellFormed(std::uint32_t concept_code, int concepts,
                             std::size_t consistent_labels)
    : Error(fmt::format("knowledge is not well formed: concept vector {} is consistent with {} "
                        "label vectors (exactly one required)",
                        code_string(concept_code, concepts), consistent_labels)),
      concept_code_(concept_code),
      consistent_labels_(consistent_labels) {}

LimitExceeded::LimitExceeded(std::string count)
    : Error(fmt::format("enumeration limit exceeded: {} maps", count)), count_(std::move(count)) {}

NoPins::NoPins() : Error("concept supervision requested but the task has no pins") {}

NonFinite::NonFinite(int epoch)
    : Error(fmt::format("non-finite loss or parameter at epoch {}", epoch)), epoch_(epoch) {}

TaskFileError::TaskFileError(std::size_t line, const std::string& what)
    : Error(line == 0 ? what : fmt::format("line {}: {}", line, what)), line_(line) {}

}  // namespace nesy
