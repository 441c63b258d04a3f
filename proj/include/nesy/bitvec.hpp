#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nesy {

/// Largest supported number of concepts (and labels). Everything downstream
/// enumerates 2^k vectors exhaustively.
inline constexpr int kMaxWidth = 16;

/// Fixed-length bit vector stored as an integer code. Bit 1 (c1 / y1) is the
/// most significant bit, so ascending codes give the big-endian order used for
/// every listing.
class BitVec {
 public:
  BitVec() = default;
  BitVec(std::uint32_t code, int width);

  static BitVec from_string(std::string_view bits);
  static BitVec from_bits(const std::vector<int>& bits);

  std::uint32_t code() const noexcept { return code_; }
  int width() const noexcept { return width_; }

  /// One-based access, matching variable names c1..ck.
  bool operator[](int index) const noexcept {
    return ((code_ >> (width_ - index)) & 1U) != 0;
  }

  std::string to_string() const;

  friend bool operator==(const BitVec&, const BitVec&) = default;
  friend auto operator<=>(const BitVec&, const BitVec&) = default;

 private:
  std::uint32_t code_ = 0;
  int width_ = 0;
};

/// Value of the one-based bit `index` in a width-bit code.
inline bool bit_of(std::uint32_t code, int width, int index) noexcept {
  return ((code >> (width - index)) & 1U) != 0;
}

/// Bitstring c1..ck for a code.
std::string code_string(std::uint32_t code, int width);

inline std::uint32_t space_size(int width) noexcept { return std::uint32_t{1} << width; }

}  // namespace nesy
