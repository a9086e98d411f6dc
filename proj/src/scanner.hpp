#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"

namespace gsnx {

struct CatalogEntry {
    std::string path;  // relative to the evidence root
    FileKind kind = FileKind::Opaque;
    std::uint64_t size_bytes = 0;
    AppId app = AppId::Unknown;
};

struct ScanCatalog {
    std::filesystem::path root;
    std::string packages_prefix;  // "data/data" or "" when rooted at data/data
    std::vector<AppInstall> installs;
    std::vector<CatalogEntry> entries;  // sorted by path
    std::vector<std::string> warnings;
    std::size_t external_entries = 0;
};

inline constexpr std::size_t kHeaderBytes = 16;
/// Files above this size are cataloged from their header only.
inline constexpr std::uint64_t kContentLimitBytes = 1ull << 30;

/// Pure: magic bytes first, then path rules. `header` may be shorter than 16 bytes.
FileKind classify_file(std::string_view path, std::span<const std::uint8_t> header);

/// Throws ScanError when `root` is not a readable directory.
ScanCatalog scan_root(const std::filesystem::path& root, const AppRegistry& registry = AppRegistry::defaults());

/// The install whose package_path is an ancestor of `rel_path`, if any.
const AppInstall* owning_install(const ScanCatalog& catalog, std::string_view rel_path);

}  // namespace gsnx
