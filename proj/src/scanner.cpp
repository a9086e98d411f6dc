#include "scanner.hpp"

#include <algorithm>
#include <array>
#include <cstring>

#include "digest.hpp"
#include "errors.hpp"

namespace fs = std::filesystem;

namespace gsnx {

namespace {

bool starts_with_bytes(std::span<const std::uint8_t> h, std::string_view magic, std::size_t at = 0) {
    if (h.size() < at + magic.size()) return false;
    return std::memcmp(h.data() + at, magic.data(), magic.size()) == 0;
}

std::vector<std::string_view> components(std::string_view path) {
    std::vector<std::string_view> out;
    while (!path.empty()) {
        const auto slash = path.find('/');
        if (slash != 0) out.push_back(path.substr(0, slash));
        if (slash == std::string_view::npos) break;
        path.remove_prefix(slash + 1);
    }
    return out;
}

bool under_dir(std::string_view path, std::string_view dir_name) {
    auto parts = components(path);
    if (parts.empty()) return false;
    parts.pop_back();
    return std::find(parts.begin(), parts.end(), dir_name) != parts.end();
}

bool under_cache_dir(std::string_view path) {
    auto parts = components(path);
    if (parts.empty()) return false;
    parts.pop_back();
    return std::any_of(parts.begin(), parts.end(), [](std::string_view p) {
        return p == "cache" || p == "app_cache" || p == "volley" || p == "Picasso-cache";
    });
}

}  // namespace

FileKind classify_file(std::string_view path, std::span<const std::uint8_t> header) {
    static constexpr char kSqlite[] = "SQLite format 3";  // 15 chars + the terminating 0x00
    if (starts_with_bytes(header, std::string_view(kSqlite, sizeof kSqlite))) return FileKind::SqliteDb;
    if (starts_with_bytes(header, "\xFF\xD8\xFF")) return FileKind::Jpeg;
    if (starts_with_bytes(header, "\x89PNG\r\n\x1A\n")) return FileKind::Png;
    if (starts_with_bytes(header, "RIFF") && starts_with_bytes(header, "WEBP", 8)) return FileKind::WebP;

    if (under_dir(path, "shared_prefs") && starts_with_bytes(header, "<?xml")) return FileKind::PrefsXml;
    if (under_dir(path, "Picasso-cache") && path.size() >= 2 && path.substr(path.size() - 2) == ".o")
        return FileKind::PicassoMeta;
    if (under_cache_dir(path)) {
        for (std::uint8_t b : header) {
            if (b == ' ' || b == '\t' || b == '\r' || b == '\n') continue;
            if (b == '{' || b == '[') return FileKind::Json;
            break;
        }
    }
    return FileKind::Opaque;
}

const AppInstall* owning_install(const ScanCatalog& catalog, std::string_view rel_path) {
    for (const auto& inst : catalog.installs) {
        const std::string_view pkg = inst.package_path;
        if (rel_path.size() > pkg.size() && rel_path.substr(0, pkg.size()) == pkg && rel_path[pkg.size()] == '/')
            return &inst;
    }
    return nullptr;
}

ScanCatalog scan_root(const fs::path& root, const AppRegistry& registry) {
    std::error_code ec;
    if (!fs::is_directory(fs::symlink_status(root, ec)) && !fs::is_directory(root, ec))
        throw ScanError("evidence root is not a directory: " + root.string());
    fs::directory_iterator probe(root, ec);
    if (ec) throw ScanError("cannot read evidence root " + root.string() + ": " + ec.message());

    ScanCatalog cat;
    cat.root = root;

    // Either a device-rooted tree (data/data/<pkg>) or one rooted at data/data itself.
    fs::path packages_dir = root;
    if (fs::is_directory(root / "data", ec) && fs::is_directory(root / "data" / "data", ec)) {
        packages_dir = root / "data" / "data";
        cat.packages_prefix = "data/data";
    }

    for (fs::directory_iterator it(packages_dir, ec), end; !ec && it != end; it.increment(ec)) {
        if (!it->is_directory(ec) || it->is_symlink(ec)) continue;
        const std::string name = it->path().filename().string();
        const RegistryMatch m = registry.lookup(name);
        if (m.app == AppId::Unknown) continue;
        AppInstall inst;
        inst.app = m.app;
        inst.registry_extended = m.extended;
        inst.package_path = cat.packages_prefix.empty() ? name : cat.packages_prefix + "/" + name;
        cat.installs.push_back(std::move(inst));
    }
    std::sort(cat.installs.begin(), cat.installs.end(),
              [](const AppInstall& a, const AppInstall& b) { return a.package_path < b.package_path; });

    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw ScanError("cannot walk evidence root " + root.string() + ": " + ec.message());
    for (fs::recursive_directory_iterator end; it != end;) {
        const fs::path p = it->path();
        const std::string rel = fs::relative(p, root, ec).generic_string();
        const auto st = it->symlink_status(ec);
        if (fs::is_symlink(st)) {
            cat.warnings.push_back("symlink not followed: " + rel);
        } else if (fs::is_directory(st)) {
            fs::directory_iterator readable(p, ec);
            if (ec) {
                cat.warnings.push_back("unreadable directory " + rel + ": " + ec.message());
                ec.clear();
                it.disable_recursion_pending();
            }
        } else if (fs::is_regular_file(st)) {
            CatalogEntry e;
            e.path = rel;
            e.size_bytes = it->file_size(ec);
            if (ec) {
                cat.warnings.push_back("cannot stat " + rel + ": " + ec.message());
                ec.clear();
            }
            try {
                const auto header = read_file_prefix(p, kHeaderBytes);
                e.kind = classify_file(rel, header);
            } catch (const Error& err) {
                cat.warnings.push_back("unreadable file " + rel + ": " + err.what());
                e.kind = FileKind::Opaque;
            }
            if (const AppInstall* inst = owning_install(cat, rel)) e.app = inst->app;
            if (rel.rfind("external/", 0) == 0) ++cat.external_entries;
            cat.entries.push_back(std::move(e));
        }
        it.increment(ec);
        if (ec) {
            cat.warnings.push_back("walk stopped near " + rel + ": " + ec.message());
            break;
        }
    }
    std::sort(cat.entries.begin(), cat.entries.end(),
              [](const CatalogEntry& a, const CatalogEntry& b) { return a.path < b.path; });
    std::sort(cat.warnings.begin(), cat.warnings.end());
    return cat;
}

}  // namespace gsnx
