#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "schema.hpp"

namespace gsnx {

struct TableInfo {
    std::string name;
    std::vector<std::string> columns;
    std::int64_t row_count = 0;
    bool complete = true;  // false when the row scan stopped on a read error
};

/// Enumerates user tables of `db_file` (relative to `root`) from a temporary copy.
/// Throws DbOpenError when the file cannot be opened as a database.
std::vector<TableInfo> read_tables(const std::filesystem::path& root, const ArtifactSource& db_file,
                                   std::vector<std::string>* warnings = nullptr);

struct DbContribution {
    EvidenceBundle partial;  // only artifact collections, warnings and disclosures are used
    std::vector<TableMatch> tables;
    std::optional<std::string> owner_id;
};

inline constexpr std::string_view kDisclosureGenericSweep =
    "generic sweep: message tables recognized by column names (message/body/text + time/date/stamp/created)";
inline constexpr std::string_view kDisclosureAnalyticsParams =
    "analytics event params scanned for lat/lon/device/network keys";

/// Normalizes registry-matched tables; unmatched tables of the same file are swept generically.
/// `owner_hint` is the owner id from prefs, used for Skout message direction.
DbContribution extract_normalized(AppId app, const std::filesystem::path& root, const ArtifactSource& db_file,
                                  const std::optional<std::string>& owner_hint = std::nullopt);

/// Best-effort heuristic extraction. With `only_tables` set, other tables are skipped.
DbContribution generic_sweep(AppId app, const std::filesystem::path& root, const ArtifactSource& db_file,
                             const std::vector<std::string>* only_tables = nullptr);

}  // namespace gsnx
