#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "model.hpp"

namespace gsnx {

enum class ColumnRole { Id, ForeignKey, Timestamp, Text, Flag, Number, Url, MediaHash, Params, Unused };
std::string_view column_role_name(ColumnRole r);

struct ColumnSpec {
    std::string_view name;
    ColumnRole role;
};

struct TableSpec {
    AppId app;
    std::string_view table_name;
    std::span<const ColumnSpec> columns;
};

/// Read-only per-app table layouts for Grindr, Skout and Tinder databases.
class SchemaRegistry {
public:
    static const SchemaRegistry& instance();

    std::vector<const TableSpec*> tables_for(AppId app) const;
    const TableSpec* find(AppId app, std::string_view table_name) const;
    std::span<const TableSpec> all() const { return tables_; }

private:
    SchemaRegistry();
    std::span<const TableSpec> tables_;
};

/// Minimum fraction of spec columns that must be present for a table to be accepted.
inline constexpr double kColumnOverlapThreshold = 0.60;

struct TableMatch {
    std::string table_name;
    const TableSpec* matched_spec = nullptr;
    double column_overlap = 0.0;
};

/// Fraction of spec columns present in `columns` (case-insensitive, as SQLite compares names).
/// A spec with no columns overlaps fully.
double column_overlap(const TableSpec& spec, std::span<const std::string> columns);

TableMatch match_table(AppId app, std::string_view table_name, std::span<const std::string> columns);

}  // namespace gsnx
