#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gsnx {

inline constexpr std::string_view kDigestAlgorithm = "SHA-256";

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view bytes);
/// Streams the file; throws IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Returns false on malformed input.
bool base64_decode(std::string_view text, std::vector<std::uint8_t>& out);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file_prefix(const std::filesystem::path& path, std::size_t max_bytes);

}  // namespace gsnx
