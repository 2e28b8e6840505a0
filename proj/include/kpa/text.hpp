#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace kpa {

/// Strips leading and trailing ASCII whitespace.
std::string trim(std::string_view s);

/// Lowercases ASCII letters; bytes outside ASCII pass through unchanged.
std::string ascii_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

/// Metric tokenization: lowercase, ASCII punctuation replaced by spaces,
/// then split on whitespace.
std::vector<std::string> tokenize(std::string_view text);

/// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace kpa
