#pragma once

#include <filesystem>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>

namespace hypetc {

/// Shortest round-trip-stable text with 15 significant digits, '.' separator.
std::string format_number(double value);

void write_row(std::ostream& out, std::initializer_list<double> values);
void write_row(std::ostream& out, std::span<const double> values);

/**
 * Writes a file through a sibling temporary and renames it into place.
 * Throws OutputDirUnwritable when the directory cannot be created or written.
 */
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

}  // namespace hypetc
