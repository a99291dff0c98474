#ifndef CCAE_IO_UTIL_HPP
#define CCAE_IO_UTIL_HPP

#include <filesystem>
#include <string>

namespace ccae {

/// Shortest decimal form that round-trips to the same double (std::to_chars),
/// so serialized numbers are reproducible byte-for-byte.
std::string format_double(double v);

/// Fixed-point with `decimals` digits, for presentation-layer output.
std::string format_fixed(double v, int decimals);

/// Writes via a temp file in the same directory, then renames into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

} // namespace ccae

#endif
