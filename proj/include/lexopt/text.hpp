#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lexopt::text {

/// Decodes UTF-8 into scalar values. Throws DecodeError naming the offset of
/// the first undecodable sequence's lead byte, plus `base_offset`, on overlong
/// forms, surrogates, truncated sequences or bad continuation bytes.
std::u32string decode_utf8(std::string_view bytes, std::size_t base_offset = 0);

std::string encode_utf8(char32_t cp);
std::string encode_utf8(std::u32string_view cps);

/// Number of Unicode scalar values in a valid UTF-8 string.
std::size_t scalar_length(std::string_view utf8);

/// ASCII whitespace plus U+00A0 NO-BREAK SPACE.
bool is_space(char32_t cp) noexcept;

/// Simple case mapping for ASCII, Latin-1, Latin Extended-A, Greek and
/// Cyrillic capitals. Other scalars are returned unchanged.
char32_t to_lower(char32_t cp) noexcept;

/// Shortest round-trip decimal rendering with 17 significant digits.
std::string format_double(double v);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Strict parsers for TSV fields; return false on any trailing garbage.
bool parse_double(std::string_view field, double& out);
bool parse_uint(std::string_view field, std::uint64_t& out);

/// 64-bit FNV-1a, rendered as 16 hex digits. Used for config digests.
std::string fnv1a_hex(std::string_view data);

}  // namespace lexopt::text
