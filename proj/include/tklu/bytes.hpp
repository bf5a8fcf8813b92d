#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tklu {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

std::string to_hex(ByteView bytes);

/// Big-endian append-only encoder.
class ByteWriter {
public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  /// Fixed-width big-endian; throws if `v` does not fit in `width` bytes.
  void uint_fixed(std::uint64_t v, std::size_t width);
  void raw(ByteView bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }
  void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

private:
  Bytes out_;
};

/// Bounds-checked big-endian decoder. Every short read throws DecodeError.
class ByteReader {
public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t uint_fixed(std::size_t width);
  ByteView raw(std::size_t len);
  Digest digest();

  std::size_t remaining() const noexcept { return in_.size() - pos_; }
  void expect_end() const;

private:
  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace tklu
