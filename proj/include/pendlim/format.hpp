#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

namespace pendlim {

/// Decimal with 12 significant digits, "C" locale, no trailing zeros.
std::string format_number(double value);

/// value rounded to 12 significant digits (what format_number would print).
double round_sig12(double value);

/// Writes through a temporary file in the destination directory, then renames.
void write_file_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);

}  // namespace pendlim
