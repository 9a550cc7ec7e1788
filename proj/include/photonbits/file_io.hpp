#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace photonbits {

/// Whole-file helpers; failures raise IoError naming the path.
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
std::string read_text_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const void* data, std::size_t size);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace photonbits
