#pragma once
// UTF-8 helpers. Instance offsets count code points, std::string indexes bytes.

#include <cstddef>
#include <optional>
#include <string_view>

namespace animacy::text {

// Number of code points in `s`. Continuation bytes are not counted, so
// malformed input still yields a deterministic answer.
std::size_t codepoint_length(std::string_view s);

// Byte index of code point `cp` (cp == length gives s.size()); nullopt when
// out of range.
std::optional<std::size_t> byte_offset(std::string_view s, std::size_t cp);

// Code point index of byte position `byte` (must sit on a code point boundary).
std::size_t codepoint_offset(std::string_view s, std::size_t byte);

}  // namespace animacy::text
