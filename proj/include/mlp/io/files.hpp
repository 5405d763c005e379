#pragma once

#include <filesystem>
#include <string>

namespace mlp::io {

// Throws Error(Io).
std::string read_file(const std::filesystem::path& path);

// Writes to a temporary file beside `path`, then renames it into place, so
// readers never see a partial file. Throws Error(Io).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace mlp::io
