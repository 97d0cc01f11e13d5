#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace frapm {

/// Flat `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Duplicate keys and lines without '=' raise ParseError.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

/// Writes through a temporary sibling file and renames it into place, so a
/// reader never sees a partial file.
void write_file_atomic(const std::string& path, const std::function<void(std::ostream&)>& writer);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace frapm
