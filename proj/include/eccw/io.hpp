#pragma once

#include <stdexcept>
#include <string>

namespace eccw {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Writes content to a sibling temp file and renames it over path, so a
// reader sees either the old file or the new one, never a partial write.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace eccw
