#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace qsc {

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& file);

std::string read_text_file(const std::filesystem::path& file);

// Writes atomically enough for our purposes: to file.tmp, then renamed.
void write_text_file(const std::filesystem::path& file, std::string_view text);

}  // namespace qsc
