#include "nesy/bitvec.hpp"

#include <fmt/format.h>

#include "nesy/errors.hpp"

namespace nesy {

BitVec::BitVec(std::uint32_t code, int width) : code_(code), width_(width) {
  if (width < 0 || width > kMaxWidth) {
    throw Error(fmt::format("bit vector width {} outside [0, {}]", width, kMaxWidth));
  }
  if (width < 32 && (code >> width) != 0) {
    throw Error(fmt::format("code {} does not fit in {} bits", code, width));
  }
}

BitVec BitVec::from_string(std::string_view bits) {
  if (bits.size() > static_cast<std::size_t>(kMaxWidth)) {
    throw Error(fmt::format("bitstring '{}' longer than {} bits", bits, kMaxWidth));
  }
  std::uint32_t code = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') {
      throw Error(fmt::format("invalid bitstring '{}'", bits));
    }
    code = (code << 1) | static_cast<std::uint32_t>(ch - '0');
  }
  return BitVec(code, static_cast<int>(bits.size()));
}

BitVec BitVec::from_bits(const std::vector<int>& bits) {
  std::string s;
  for (int b : bits) s.push_back(b != 0 ? '1' : '0');
  return from_string(s);
}

std::string BitVec::to_string() const { return code_string(code_, width_); }

std::string code_string(std::uint32_t code, int width) {
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = 1; i <= width; ++i) {
    if (bit_of(code, width, i)) s[static_cast<std::size_t>(i - 1)] = '1';
  }
  return s;
}

}  // namespace nesy
