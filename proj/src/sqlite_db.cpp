#include "sqlite_db.hpp"

#include <stdlib.h>

#include <memory>

#include "errors.hpp"

namespace fs = std::filesystem;

namespace gsnx::sql {

namespace {

struct StmtDeleter {
    void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using Stmt = std::unique_ptr<sqlite3_stmt, StmtDeleter>;

Stmt prepare(sqlite3* db, std::string_view sql, std::string* err = nullptr) {
    sqlite3_stmt* raw = nullptr;
    const int rc = sqlite3_prepare_v2(db, sql.data(), static_cast<int>(sql.size()), &raw, nullptr);
    if (rc != SQLITE_OK) {
        if (err) *err = sqlite3_errmsg(db);
        sqlite3_finalize(raw);
        return nullptr;
    }
    return Stmt(raw);
}

Cell read_cell(sqlite3_stmt* st, int i) {
    Cell c;
    switch (sqlite3_column_type(st, i)) {
        case SQLITE_INTEGER:
            c.type = CellType::Integer;
            c.integer = sqlite3_column_int64(st, i);
            c.text = std::to_string(c.integer);
            break;
        case SQLITE_FLOAT: {
            c.type = CellType::Real;
            c.real = sqlite3_column_double(st, i);
            const unsigned char* t = sqlite3_column_text(st, i);
            c.text = t ? reinterpret_cast<const char*>(t) : "";
            break;
        }
        case SQLITE_TEXT: {
            c.type = CellType::Text;
            const unsigned char* t = sqlite3_column_text(st, i);
            c.text.assign(reinterpret_cast<const char*>(t), static_cast<std::size_t>(sqlite3_column_bytes(st, i)));
            break;
        }
        case SQLITE_BLOB: {
            c.type = CellType::Blob;
            const void* b = sqlite3_column_blob(st, i);
            if (b) c.text.assign(static_cast<const char*>(b), static_cast<std::size_t>(sqlite3_column_bytes(st, i)));
            break;
        }
        default: break;
    }
    return c;
}

}  // namespace

std::string quote_ident(std::string_view name) {
    std::string out = "\"";
    for (char c : name) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

ReadOnlyCopy::ReadOnlyCopy(const fs::path& evidence_file) {
    std::string tmpl = (fs::temp_directory_path() / "gsnx-db-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw DbOpenError(evidence_file.string(), "cannot create temporary directory");
    temp_dir_ = tmpl;
    const fs::path copy = temp_dir_ / "evidence.db";
    std::error_code ec;
    fs::copy_file(evidence_file, copy, ec);
    if (ec) {
        fs::remove_all(temp_dir_, ec);
        throw DbOpenError(evidence_file.string(), "cannot copy: " + ec.message());
    }
    // Sidecar journals travel with the copy so a standard read sees what SQLite would.
    for (const char* suffix : {"-wal", "-journal"}) {
        fs::path side = evidence_file;
        side += suffix;
        if (fs::exists(side, ec)) {
            fs::path dst = copy;
            dst += suffix;
            fs::copy_file(side, dst, ec);
        }
    }
    const int rc = sqlite3_open_v2(copy.c_str(), &db_, SQLITE_OPEN_READONLY, nullptr);
    std::string why;
    if (rc != SQLITE_OK) {
        why = db_ ? sqlite3_errmsg(db_) : "open failed";
    } else {
        // Forces a read of the schema; corrupt or non-database files fail here.
        auto st = prepare(db_, "SELECT count(*) FROM sqlite_master", &why);
        if (st && sqlite3_step(st.get()) != SQLITE_ROW) why = sqlite3_errmsg(db_);
    }
    if (!why.empty()) {
        sqlite3_close(db_);
        db_ = nullptr;
        fs::remove_all(temp_dir_, ec);
        throw DbOpenError(evidence_file.string(), why);
    }
}

ReadOnlyCopy::~ReadOnlyCopy() {
    if (db_) sqlite3_close(db_);
    std::error_code ec;
    fs::remove_all(temp_dir_, ec);
}

std::vector<std::string> ReadOnlyCopy::user_tables() const {
    std::vector<std::string> out;
    auto st = prepare(db_, "SELECT name FROM sqlite_master WHERE type='table' AND name NOT LIKE 'sqlite\\_%' ESCAPE '\\' ORDER BY name");
    if (!st) return out;
    while (sqlite3_step(st.get()) == SQLITE_ROW) {
        const unsigned char* t = sqlite3_column_text(st.get(), 0);
        if (t) out.emplace_back(reinterpret_cast<const char*>(t));
    }
    return out;
}

std::vector<Column> ReadOnlyCopy::columns(std::string_view table) const {
    std::vector<Column> out;
    auto st = prepare(db_, "PRAGMA table_info(" + quote_ident(table) + ")");
    if (!st) return out;
    while (sqlite3_step(st.get()) == SQLITE_ROW) {
        Column c;
        if (auto* n = sqlite3_column_text(st.get(), 1)) c.name = reinterpret_cast<const char*>(n);
        if (auto* t = sqlite3_column_text(st.get(), 2)) c.declared_type = reinterpret_cast<const char*>(t);
        out.push_back(std::move(c));
    }
    return out;
}

ReadOnlyCopy::RowsResult ReadOnlyCopy::rows(std::string_view table, std::span<const Column> cols) const {
    RowsResult out;
    std::string list;
    for (const auto& c : cols) {
        if (!list.empty()) list += ", ";
        list += quote_ident(c.name);
    }
    if (list.empty()) list = "*";
    std::string err;
    bool with_rowid = true;
    auto st = prepare(db_, "SELECT rowid, " + list + " FROM " + quote_ident(table) + " ORDER BY rowid", &err);
    if (!st) {
        with_rowid = false;
        st = prepare(db_, "SELECT " + list + " FROM " + quote_ident(table), &err);
    }
    if (!st) {
        out.error = err;
        return out;
    }
    const int offset = with_rowid ? 1 : 0;
    std::int64_t ordinal = 0;
    for (;;) {
        const int rc = sqlite3_step(st.get());
        if (rc == SQLITE_DONE) break;
        if (rc != SQLITE_ROW) {
            out.error = sqlite3_errmsg(db_);
            break;
        }
        Row r;
        r.rowid = with_rowid ? sqlite3_column_int64(st.get(), 0) : ++ordinal;
        const int n = sqlite3_column_count(st.get());
        for (int i = offset; i < n; ++i) r.cells.push_back(read_cell(st.get(), i));
        out.rows.push_back(std::move(r));
    }
    return out;
}

// --- writer -----------------------------------------------------------------

Writer::Writer(const fs::path& file) {
    if (sqlite3_open_v2(file.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE, nullptr) != SQLITE_OK) {
        const std::string why = db_ ? sqlite3_errmsg(db_) : "open failed";
        sqlite3_close(db_);
        throw IoError("cannot create database " + file.string() + ": " + why);
    }
}

Writer::~Writer() {
    if (db_) sqlite3_close(db_);
}

void Writer::exec(std::string_view sql) {
    char* msg = nullptr;
    const std::string s(sql);
    if (sqlite3_exec(db_, s.c_str(), nullptr, nullptr, &msg) != SQLITE_OK) {
        const std::string why = msg ? msg : "exec failed";
        sqlite3_free(msg);
        throw IoError("sqlite: " + why + " in: " + s);
    }
}

void Writer::insert(std::string_view table, std::span<const std::string_view> columns, std::span<const Value> values) {
    std::string sql = "INSERT INTO " + quote_ident(table) + " (";
    std::string marks;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) {
            sql += ", ";
            marks += ", ";
        }
        sql += quote_ident(columns[i]);
        marks += "?";
    }
    sql += ") VALUES (" + marks + ")";
    std::string err;
    auto st = prepare(db_, sql, &err);
    if (!st) throw IoError("sqlite: " + err + " in: " + sql);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int idx = static_cast<int>(i + 1);
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::nullptr_t>) sqlite3_bind_null(st.get(), idx);
                else if constexpr (std::is_same_v<T, std::int64_t>) sqlite3_bind_int64(st.get(), idx, v);
                else if constexpr (std::is_same_v<T, double>) sqlite3_bind_double(st.get(), idx, v);
                else sqlite3_bind_text(st.get(), idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
            },
            values[i]);
    }
    if (sqlite3_step(st.get()) != SQLITE_DONE) throw IoError(std::string("sqlite insert: ") + sqlite3_errmsg(db_));
}

}  // namespace gsnx::sql
