#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace rbridge {

/// Shortest decimal text that parses back to exactly x.
[[nodiscard]] std::string format_double(double x);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace rbridge
