#include "tklu/bytes.hpp"

#include <algorithm>

#include "tklu/errors.hpp"

namespace tklu {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ModulusMismatch: return "ModulusMismatch";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::VerifyFailed: return "VerifyFailed";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::MissingBlindedKey: return "MissingBlindedKey";
    case ErrorCode::UnknownMember: return "UnknownMember";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::Disconnected: return "Disconnected";
  }
  return "Unknown";
}

std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

void ByteWriter::u16(std::uint16_t v) {
  out_.push_back(static_cast<std::uint8_t>(v >> 8));
  out_.push_back(static_cast<std::uint8_t>(v));
}

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::uint_fixed(std::uint64_t v, std::size_t width) {
  if (width < 8 && (v >> (8 * width)) != 0) throw Error(ErrorCode::InvalidArgument, "value does not fit encoding width");
  for (std::size_t i = width; i-- > 0;) out_.push_back(i >= 8 ? 0 : static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

std::uint32_t ByteReader::u32() {
  auto b = raw(4);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

std::uint64_t ByteReader::uint_fixed(std::size_t width) {
  auto b = raw(width);
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) {
    if (width - i > 8 && b[i] != 0) throw Error(ErrorCode::DecodeError, "integer wider than 64 bits");
    v = (v << 8) | b[i];
  }
  return v;
}

ByteView ByteReader::raw(std::size_t len) {
  if (remaining() < len) throw Error(ErrorCode::DecodeError, "truncated message");
  auto out = in_.subspan(pos_, len);
  pos_ += len;
  return out;
}

Digest ByteReader::digest() {
  Digest d;
  auto b = raw(d.size());
  std::copy(b.begin(), b.end(), d.begin());
  return d;
}

void ByteReader::expect_end() const {
  if (remaining() != 0) throw Error(ErrorCode::DecodeError, "trailing bytes");
}

}  // namespace tklu
