#pragma once

#include <string>

namespace drifting {

// Shortest round-trip decimal form; identical bytes on every platform.
std::string format_double(double v);

// Writes to "<path>.tmp" then renames over path. Errors name the file.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace drifting
