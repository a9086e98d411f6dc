#pragma once

#include <sqlite3.h>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <string>
#include <string_view>
#include <vector>

namespace gsnx::sql {

enum class CellType { Null, Integer, Real, Text, Blob };

struct Cell {
    CellType type = CellType::Null;
    std::int64_t integer = 0;
    double real = 0.0;
    std::string text;  // text, blob bytes, or the textual form of a number

    bool is_null() const { return type == CellType::Null; }
};

struct Column {
    std::string name;
    std::string declared_type;
};

struct Row {
    std::int64_t rowid = 0;
    std::vector<Cell> cells;
};

/// Read-only connection to a private temporary copy of an evidence database.
/// The evidence file itself is only ever read with an ifstream-equivalent copy.
class ReadOnlyCopy {
public:
    explicit ReadOnlyCopy(const std::filesystem::path& evidence_file);
    ~ReadOnlyCopy();
    ReadOnlyCopy(const ReadOnlyCopy&) = delete;
    ReadOnlyCopy& operator=(const ReadOnlyCopy&) = delete;

    std::vector<std::string> user_tables() const;
    std::vector<Column> columns(std::string_view table) const;

    struct RowsResult {
        std::vector<Row> rows;
        std::optional<std::string> error;  // set when iteration stopped early
    };
    /// All rows (with rowid when the table has one) in rowid order.
    RowsResult rows(std::string_view table, std::span<const Column> cols) const;

    sqlite3* handle() const { return db_; }

private:
    std::filesystem::path temp_dir_;
    sqlite3* db_ = nullptr;
};

/// Writable handle used by the fixture forge.
class Writer {
public:
    explicit Writer(const std::filesystem::path& file);
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void exec(std::string_view sql);

    using Value = std::variant<std::nullptr_t, std::int64_t, double, std::string>;
    void insert(std::string_view table, std::span<const std::string_view> columns, std::span<const Value> values);

private:
    sqlite3* db_ = nullptr;
};

std::string quote_ident(std::string_view name);

}  // namespace gsnx::sql
