#pragma once

#include <string_view>

#include "tklu/bytes.hpp"

namespace tklu {

/// The protocol hash F: SHA-256(domain_label || payload).
using HashTag = Digest;

namespace label {
inline constexpr std::string_view kPairwiseAuth = "PWAUTH";
inline constexpr std::string_view kPairwiseKey = "PWKEY";
inline constexpr std::string_view kPathAuth = "PATHAUTH";
inline constexpr std::string_view kPathDh = "PATHDH";
inline constexpr std::string_view kPathKey = "PATHKEY";
inline constexpr std::string_view kGroupLeaf = "GRPLEAF";
inline constexpr std::string_view kGroupNode = "GRPNODE";
inline constexpr std::string_view kGroupKey = "GRPKEY";
inline constexpr std::string_view kRevoke = "REVOKE";
inline constexpr std::string_view kSinkKey = "SINKKEY";
}  // namespace label

HashTag hash_tag(std::string_view domain_label, ByteView payload);

/// Compares all 32 bytes regardless of where the first difference is.
bool tags_equal(const HashTag& a, const HashTag& b) noexcept;

}  // namespace tklu
