#include "db_extract.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

#include "errors.hpp"
#include "sqlite_db.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;

namespace gsnx {

namespace {

struct Table {
    std::string name;
    std::vector<sql::Column> cols;
    std::vector<sql::Row> rows;
    std::optional<std::string> error;

    std::optional<std::size_t> index(std::string_view col) const {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (text::iequals(cols[i].name, col)) return i;
        }
        return std::nullopt;
    }
    const sql::Cell* cell(const sql::Row& r, std::string_view col) const {
        auto i = index(col);
        if (!i || *i >= r.cells.size()) return nullptr;
        return &r.cells[*i];
    }
    std::vector<std::string> column_names() const {
        std::vector<std::string> out;
        for (const auto& c : cols) out.push_back(c.name);
        return out;
    }
};

std::vector<Table> load_all(const sql::ReadOnlyCopy& db) {
    std::vector<Table> out;
    for (const auto& name : db.user_tables()) {
        Table t;
        t.name = name;
        t.cols = db.columns(name);
        auto rs = db.rows(name, t.cols);
        t.rows = std::move(rs.rows);
        t.error = std::move(rs.error);
        out.push_back(std::move(t));
    }
    return out;
}

ArtifactSource row_source(const ArtifactSource& db_file, const Table& t, const sql::Row& r) {
    ArtifactSource s = db_file;
    s.detail = t.name + "#rowid=" + std::to_string(r.rowid);
    return s;
}

std::map<std::string, std::string> raw_fields(const Table& t, const sql::Row& r) {
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < t.cols.size() && i < r.cells.size(); ++i)
        out[t.cols[i].name] = r.cells[i].is_null() ? std::string() : r.cells[i].text;
    return out;
}

std::optional<std::string> text_of(const sql::Cell* c) {
    if (!c || c->is_null()) return std::nullopt;
    return c->text;
}

std::optional<bool> flag_of(const sql::Cell* c) {
    if (!c || c->is_null()) return std::nullopt;
    if (c->type == sql::CellType::Integer) return c->integer != 0;
    const std::string v = text::lower(text::trim(c->text));
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    return std::nullopt;
}

class Extractor {
public:
    Extractor(AppId app, const ArtifactSource& db_file) : app_(app), db_file_(db_file) {}

    DbContribution out;

    void warn(std::string msg) { out.partial.warnings.push_back(db_file_.file_path + ": " + std::move(msg)); }

    /// Epoch cell → instant; warns (and returns nullopt) on type mismatch.
    std::optional<Instant> epoch_of(const Table& t, const sql::Row& r, std::string_view col, bool required) {
        const sql::Cell* c = t.cell(r, col);
        if (!c || c->is_null()) {
            if (required) warn(t.name + "#rowid=" + std::to_string(r.rowid) + ": missing " + std::string(col));
            return std::nullopt;
        }
        std::optional<std::int64_t> raw;
        if (c->type == sql::CellType::Integer) raw = c->integer;
        else if (c->type == sql::CellType::Text) raw = text::parse_int(c->text);
        else if (c->type == sql::CellType::Real) raw = static_cast<std::int64_t>(c->real);
        if (!raw) {
            warn(t.name + "#rowid=" + std::to_string(r.rowid) + ": non-epoch value in " + std::string(col) +
                 " kept as raw text");
            return std::nullopt;
        }
        try {
            const auto res = normalize_epoch(*raw);
            if (res.unit == EpochUnit::Seconds) ++out.partial.epoch_seconds;
            else ++out.partial.epoch_milliseconds;
            return res.instant;
        } catch (const Error& e) {
            warn(t.name + "#rowid=" + std::to_string(r.rowid) + ": " + e.what());
            return std::nullopt;
        }
    }

    void keep_raw(const Table& t, const sql::Row& r) {
        RawRow rr;
        rr.app = app_;
        rr.table = t.name;
        rr.fields = raw_fields(t, r);
        rr.source = row_source(db_file_, t, r);
        out.partial.side_rows.push_back(std::move(rr));
    }

    Direction direction_for(const std::string& sender, const std::string& recipient,
                            const std::optional<std::string>& owner) const {
        if (!owner || owner->empty()) return Direction::Unknown;
        if (sender == *owner) return Direction::Outbound;
        if (recipient == *owner || !sender.empty()) return Direction::Inbound;
        return Direction::Unknown;
    }

    // --- Grindr -------------------------------------------------------------

    void grindr(const std::vector<const Table*>& matched) {
        auto find = [&](std::string_view n) -> const Table* {
            for (auto* t : matched) {
                if (t->name == n) return t;
            }
            return nullptr;
        };
        std::optional<std::string> owner;
        if (const Table* t = find("profile")) {
            for (const auto& r : t->rows) {
                ProfileRecord p;
                p.app = app_;
                p.origin_table = t->name;
                p.profile_id = text_of(t->cell(r, "profileID")).value_or("");
                p.display_name = text_of(t->cell(r, "displayName"));
                if (auto a = text_of(t->cell(r, "age")); a && text::parse_int(*a))
                    p.age = static_cast<int>(*text::parse_int(*a));
                if (auto b = t->cell(r, "birthdate"); b && !b->is_null()) {
                    if (auto iso = parse_instant(b->text)) p.birth_date = format_date(*iso);
                    else if (auto at = epoch_of(*t, r, "birthdate", false)) p.birth_date = format_date(*at);
                }
                for (auto [col, provider] : {std::pair{"facebookID", "Facebook"}, std::pair{"twitterID", "Twitter"},
                                             std::pair{"instagramID", "Instagram"}}) {
                    if (auto v = text_of(t->cell(r, col)); v && !v->empty()) p.social_ids[provider] = *v;
                }
                if (auto h = text_of(t->cell(r, "profileImageHash")); h && !h->empty()) p.image_hash = *h;
                p.last_seen = epoch_of(*t, r, "lastSeen", false);
                if (auto d = text_of(t->cell(r, "distance"))) {
                    if (auto v = text::parse_double(*d); v && *v >= 0) p.distance_m = *v;
                }
                p.is_owner = flag_of(t->cell(r, "isCurrent")).value_or(false);
                p.raw_fields = raw_fields(*t, r);
                p.source = row_source(db_file_, *t, r);
                if (p.is_owner && !owner) owner = p.profile_id;
                out.partial.profiles.push_back(std::move(p));
            }
        }
        out.owner_id = owner;

        std::set<std::string> media_hashes, media_messages;
        if (const Table* t = find("imageGallery")) {
            for (const auto& r : t->rows) {
                if (auto h = text_of(t->cell(r, "mediaHash")); h && !h->empty()) media_hashes.insert(*h);
                if (auto m = text_of(t->cell(r, "messageID")); m && !m->empty()) media_messages.insert(*m);
            }
        }
        if (const Table* t = find("chat")) {
            for (const auto& r : t->rows) {
                auto at = epoch_of(*t, r, "Timestamp", true);
                if (!at) {
                    keep_raw(*t, r);
                    continue;
                }
                ChatMessage m;
                m.app = app_;
                m.message_id = text_of(t->cell(r, "messageID")).value_or("");
                m.sender_id = text_of(t->cell(r, "Source")).value_or("");
                m.recipient_id = text_of(t->cell(r, "Target")).value_or("");
                m.sent_at = *at;
                m.body = text_of(t->cell(r, "Body")).value_or("");
                m.body_is_media = media_hashes.count(m.body) > 0 || media_messages.count(m.message_id) > 0;
                m.message_type = text_of(t->cell(r, "Type")).value_or("");
                m.unread = flag_of(t->cell(r, "Unread"));
                m.failed = flag_of(t->cell(r, "Failed"));
                m.direction = direction_for(m.sender_id, m.recipient_id, owner);
                m.source = row_source(db_file_, *t, r);
                out.partial.messages.push_back(std::move(m));
            }
        }
        for (const Table* t : matched) {
            if (t->name == "profile" || t->name == "chat") continue;
            for (const auto& r : t->rows) keep_raw(*t, r);
        }
    }

    // --- Skout --------------------------------------------------------------

    void skout(const std::vector<const Table*>& matched, const std::optional<std::string>& owner) {
        out.owner_id = owner;
        for (const Table* t : matched) {
            if (t->name == "skoutUsersTable") {
                for (const auto& r : t->rows) {
                    ProfileRecord p;
                    p.app = app_;
                    p.origin_table = t->name;
                    p.profile_id = text_of(t->cell(r, "userID")).value_or("");
                    p.display_name = text_of(t->cell(r, "userName"));
                    if (auto u = text_of(t->cell(r, "picUrl")); u && !u->empty()) p.picture_url = *u;
                    p.last_message_at = epoch_of(*t, r, "lastMessageTimestamp", false);
                    p.is_owner = owner && p.profile_id == *owner;
                    p.raw_fields = raw_fields(*t, r);
                    p.source = row_source(db_file_, *t, r);
                    out.partial.profiles.push_back(std::move(p));
                }
            } else if (t->name == "skoutMessages") {
                for (const auto& r : t->rows) {
                    auto at = epoch_of(*t, r, "Timestamp", true);
                    if (!at) {
                        keep_raw(*t, r);
                        continue;
                    }
                    ChatMessage m;
                    m.app = app_;
                    m.message_id = text_of(t->cell(r, "messageID")).value_or("");
                    m.sender_id = text_of(t->cell(r, "fromUserID")).value_or("");
                    m.recipient_id = text_of(t->cell(r, "toUserID")).value_or("");
                    m.thread_id = text_of(t->cell(r, "chatID")).value_or("");
                    m.sent_at = *at;
                    m.body = text_of(t->cell(r, "Message")).value_or("");
                    m.message_type = text_of(t->cell(r, "Type")).value_or("");
                    const std::string kind = text::lower(text::trim(m.message_type));
                    m.body_is_media = kind == "picture";
                    m.admin_origin = kind == "rich";
                    m.direction = direction_for(m.sender_id, m.recipient_id, owner);
                    m.source = row_source(db_file_, *t, r);
                    out.partial.messages.push_back(std::move(m));
                }
            } else {
                for (const auto& r : t->rows) keep_raw(*t, r);
            }
        }
    }

    // --- Tinder -------------------------------------------------------------

    static std::map<std::string, std::string> parse_params(const std::string& raw) {
        std::map<std::string, std::string> kv;
        auto j = nlohmann::json::parse(raw, nullptr, false);
        if (!j.is_discarded() && j.is_object()) {
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (it->is_string()) kv[it.key()] = it->get<std::string>();
                else if (it->is_primitive() && !it->is_null()) kv[it.key()] = it->dump();
            }
            return kv;
        }
        // key=value pairs separated by '&', ',' or ';'
        std::size_t pos = 0;
        while (pos <= raw.size()) {
            auto end = raw.find_first_of("&,;", pos);
            if (end == std::string::npos) end = raw.size();
            const std::string part = text::trim(std::string_view(raw).substr(pos, end - pos));
            const auto eq = part.find_first_of("=:");
            if (eq != std::string::npos) kv[text::trim(part.substr(0, eq))] = text::trim(part.substr(eq + 1));
            pos = end + 1;
        }
        return kv;
    }

    void tinder(const std::vector<const Table*>& matched, const std::optional<std::string>& owner) {
        out.owner_id = owner;
        for (const Table* t : matched) {
            if (t->name == "messages") {
                for (const auto& r : t->rows) {
                    auto at = epoch_of(*t, r, "Created", true);
                    if (!at) {
                        keep_raw(*t, r);
                        continue;
                    }
                    ChatMessage m;
                    m.app = app_;
                    m.message_id = "rowid:" + std::to_string(r.rowid);
                    m.counterpart_id = text_of(t->cell(r, "User_id")).value_or("");
                    m.thread_id = text_of(t->cell(r, "Match_id")).value_or("");
                    m.sent_at = *at;
                    m.body = text_of(t->cell(r, "Text")).value_or("");
                    if (auto v = flag_of(t->cell(r, "Viewed"))) m.unread = !*v;
                    m.failed = flag_of(t->cell(r, "Has_error"));
                    m.source = row_source(db_file_, *t, r);
                    out.partial.messages.push_back(std::move(m));
                }
            } else if (t->name == "matches") {
                for (const auto& r : t->rows) {
                    auto at = epoch_of(*t, r, "Created", true);
                    if (!at) {
                        keep_raw(*t, r);
                        continue;
                    }
                    MatchRecord mr;
                    mr.app = app_;
                    mr.match_id = text_of(t->cell(r, "Id")).value_or("");
                    mr.counterpart_user_id = text_of(t->cell(r, "User_id")).value_or("");
                    mr.counterpart_name = text_of(t->cell(r, "User_name"));
                    mr.created_at = *at;
                    mr.last_activity = epoch_of(*t, r, "Last_activity", false);
                    if (mr.last_activity && *mr.last_activity < mr.created_at) {
                        warn("matches#rowid=" + std::to_string(r.rowid) + ": Last_activity precedes Created; dropped");
                        mr.last_activity.reset();
                    }
                    mr.viewed = flag_of(t->cell(r, "Viewed"));
                    mr.raw_fields = raw_fields(*t, r);
                    mr.source = row_source(db_file_, *t, r);
                    out.partial.matches.push_back(std::move(mr));
                }
            } else if (t->name == "Analytic_Events") {
                for (const auto& r : t->rows) analytic_event(*t, r);
            } else if (t->name == "facebook_friends") {
                for (const auto& r : t->rows) {
                    ProfileRecord p;
                    p.app = app_;
                    p.origin_table = t->name;
                    p.profile_id = text_of(t->cell(r, "Id")).value_or("");
                    p.display_name = text_of(t->cell(r, "Name"));
                    if (!p.profile_id.empty()) p.social_ids["Facebook"] = p.profile_id;
                    if (auto u = text_of(t->cell(r, "Avatar_url")); u && !u->empty()) p.picture_url = *u;
                    p.raw_fields = raw_fields(*t, r);
                    p.source = row_source(db_file_, *t, r);
                    out.partial.profiles.push_back(std::move(p));
                }
            } else if (t->name == "moments" || t->name == "photos" || t->name == "photo_moments") {
                for (const auto& r : t->rows) media_row(*t, r);
            } else {
                for (const auto& r : t->rows) keep_raw(*t, r);
            }
        }
    }

    void analytic_event(const Table& t, const sql::Row& r) {
        const auto params = parse_params(text_of(t.cell(r, "Params")).value_or(""));
        const auto at = epoch_of(t, r, "timestamp", false);
        std::optional<std::pair<std::string, double>> lat, lon;
        for (const auto& [k, v] : params) {
            const auto d = text::parse_double(v);
            if (!d) continue;
            if (!lat && text::contains_ci(k, "lat") && *d >= -90 && *d <= 90) lat = {k, *d};
            else if (!lon && (text::contains_ci(k, "lon") || text::contains_ci(k, "lng")) && *d >= -180 && *d <= 180)
                lon = {k, *d};
        }
        const ArtifactSource src = row_source(db_file_, t, r);
        if (lat && lon) {
            LocationFix f;
            f.app = app_;
            f.precision = Precision::Exact;
            f.lat = lat->second;
            f.lon = lon->second;
            f.at = at;
            f.source = src;
            out.partial.locations.push_back(std::move(f));
        }
        for (const auto& [k, v] : params) {
            if (text::contains_ci(k, "device") || text::contains_ci(k, "network"))
                out.partial.device_ids.push_back({app_, k, v, src});
        }
        out.partial.disclosures.insert(std::string(kDisclosureAnalyticsParams));
        keep_raw(t, r);
    }

    void media_row(const Table& t, const sql::Row& r) {
        MediaRecord m;
        m.app = app_;
        m.media_id = text_of(t.cell(r, "Id")).value_or("");
        m.owner_user_id = text_of(t.cell(r, "User_id")).value_or("");
        m.source = row_source(db_file_, t, r);
        if (t.name == "moments") {
            m.kind = MediaKind::Moment;
            m.created_at = epoch_of(t, r, "Created", false);
            m.text = text_of(t.cell(r, "Text")).value_or("");
        } else if (t.name == "photos") {
            m.kind = MediaKind::Photo;
            if (auto u = text_of(t.cell(r, "Image_url")); u && !u->empty()) m.urls.push_back(*u);
        } else {
            m.kind = MediaKind::PhotoMoment;
            for (const char* col : {"Large", "Med", "Orig", "Small", "thumb"}) {
                if (auto u = text_of(t.cell(r, col)); u && !u->empty()) m.urls.push_back(*u);
            }
        }
        out.partial.media.push_back(std::move(m));
    }

    // --- generic sweep -------------------------------------------------------

    static bool is_text_column(const Table& t, std::size_t i) {
        const std::string decl = text::lower(t.cols[i].declared_type);
        if (decl.find("char") != std::string::npos || decl.find("clob") != std::string::npos ||
            decl.find("text") != std::string::npos)
            return true;
        if (!decl.empty()) return false;
        for (const auto& r : t.rows) {
            if (i < r.cells.size() && !r.cells[i].is_null()) return r.cells[i].type == sql::CellType::Text;
        }
        return false;
    }

    static bool is_integer_column(const Table& t, std::size_t i) {
        const std::string decl = text::lower(t.cols[i].declared_type);
        if (decl.find("int") != std::string::npos) return true;
        if (!decl.empty()) return false;
        for (const auto& r : t.rows) {
            if (i < r.cells.size() && !r.cells[i].is_null()) return r.cells[i].type == sql::CellType::Integer;
        }
        return false;
    }

    static bool name_has_any(std::string_view name, std::initializer_list<std::string_view> words) {
        const std::string n = text::lower(name);
        return std::any_of(words.begin(), words.end(), [&](std::string_view w) { return n.find(w) != std::string::npos; });
    }

    static std::optional<std::size_t> column_named(const Table& t, std::initializer_list<std::string_view> names) {
        for (std::size_t i = 0; i < t.cols.size(); ++i) {
            for (auto n : names) {
                if (text::iequals(t.cols[i].name, n)) return i;
            }
        }
        return std::nullopt;
    }

    void sweep(const Table& t) {
        std::optional<std::size_t> body_col, time_col;
        for (std::size_t i = 0; i < t.cols.size(); ++i) {
            if (!body_col && is_text_column(t, i) && name_has_any(t.cols[i].name, {"message", "body", "text"})) body_col = i;
            if (!time_col && is_integer_column(t, i) && name_has_any(t.cols[i].name, {"time", "date", "stamp", "created"}))
                time_col = i;
        }
        const auto from_col = column_named(t, {"sender", "sender_id", "from", "from_id", "fromUserID"});
        const auto to_col = column_named(t, {"recipient", "recipient_id", "to", "to_id", "toUserID"});
        bool used = false;
        for (const auto& r : t.rows) {
            if (body_col && time_col) {
                const sql::Cell& tc = r.cells[*time_col];
                auto at = epoch_of(t, r, t.cols[*time_col].name, true);
                if (at && !tc.is_null()) {
                    ChatMessage m;
                    m.app = app_;
                    m.message_id = t.name + "#rowid=" + std::to_string(r.rowid);
                    m.sent_at = *at;
                    m.body = r.cells[*body_col].is_null() ? "" : r.cells[*body_col].text;
                    if (from_col) m.sender_id = r.cells[*from_col].text;
                    if (to_col) m.recipient_id = r.cells[*to_col].text;
                    m.direction = Direction::Unknown;
                    m.confidence = Confidence::Heuristic;
                    m.source = row_source(db_file_, t, r);
                    out.partial.messages.push_back(std::move(m));
                    used = true;
                }
            }
            for (std::size_t i = 0; i < t.cols.size() && i < r.cells.size(); ++i) {
                const sql::Cell& c = r.cells[i];
                if (c.type != sql::CellType::Text) continue;
                for (const auto& u : text::find_urls(c.text)) {
                    MediaRecord mr;
                    mr.app = app_;
                    mr.kind = MediaKind::Url;
                    mr.media_id = t.name + "#rowid=" + std::to_string(r.rowid) + ":" + t.cols[i].name;
                    mr.urls.emplace_back(u.value);
                    mr.confidence = Confidence::Heuristic;
                    mr.source = row_source(db_file_, t, r);
                    mr.source.byte_range.reset();
                    out.partial.media.push_back(std::move(mr));
                    used = true;
                }
                for (const auto& e : text::find_emails(c.text)) {
                    out.partial.emails.push_back({app_, std::string(e.value), Confidence::Heuristic, row_source(db_file_, t, r)});
                    used = true;
                }
            }
        }
        if (used) out.partial.disclosures.insert(std::string(kDisclosureGenericSweep));
    }

private:
    AppId app_;
    ArtifactSource db_file_;
};

std::vector<Table> open_and_load(const fs::path& root, const ArtifactSource& db_file, std::vector<std::string>& warnings) {
    sql::ReadOnlyCopy db(root / db_file.file_path);
    auto tables = load_all(db);
    for (const auto& t : tables) {
        if (t.error)
            warnings.push_back(db_file.file_path + ": table " + t.name + " partially readable (" +
                               std::to_string(t.rows.size()) + " rows recovered): " + *t.error);
    }
    return tables;
}

}  // namespace

std::vector<TableInfo> read_tables(const fs::path& root, const ArtifactSource& db_file, std::vector<std::string>* warnings) {
    std::vector<std::string> local;
    auto tables = open_and_load(root, db_file, local);
    if (warnings) warnings->insert(warnings->end(), local.begin(), local.end());
    std::vector<TableInfo> out;
    for (const auto& t : tables) {
        out.push_back({t.name, t.column_names(), static_cast<std::int64_t>(t.rows.size()), !t.error.has_value()});
    }
    return out;
}

DbContribution extract_normalized(AppId app, const fs::path& root, const ArtifactSource& db_file,
                                  const std::optional<std::string>& owner_hint) {
    Extractor ex(app, db_file);
    auto tables = open_and_load(root, db_file, ex.out.partial.warnings);

    if (app == AppId::Badoo) {
        // The analytics database is expected to be empty; anything else is surfaced.
        if (text::basename(db_file.file_path).rfind("google_analytics_v2", 0) == 0) {
            for (const auto& t : tables) {
                if (!t.rows.empty())
                    ex.warn("expected-empty table " + t.name + " holds " + std::to_string(t.rows.size()) + " row(s)");
                for (const auto& r : t.rows) ex.keep_raw(t, r);
            }
            return std::move(ex.out);
        }
    }

    std::vector<const Table*> matched;
    std::vector<std::string> unmatched;
    for (const auto& t : tables) {
        const auto names = t.column_names();
        TableMatch m = match_table(app, t.name, names);
        if (m.matched_spec) matched.push_back(&t);
        else unmatched.push_back(t.name);
        ex.out.tables.push_back(std::move(m));
    }

    switch (app) {
        case AppId::Grindr: ex.grindr(matched); break;
        case AppId::Skout: ex.skout(matched, owner_hint); break;
        case AppId::Tinder: ex.tinder(matched, owner_hint); break;
        default: break;
    }
    // Expected tables that are absent from a database holding the app's main store.
    if (!matched.empty()) {
        for (const TableSpec* spec : SchemaRegistry::instance().tables_for(app)) {
            const bool present = std::any_of(matched.begin(), matched.end(),
                                             [&](const Table* t) { return t->name == spec->table_name; });
            if (!present) ex.warn("expected table " + std::string(spec->table_name) + " missing or below column overlap");
        }
    }
    for (const auto& t : tables) {
        if (std::find(unmatched.begin(), unmatched.end(), t.name) != unmatched.end()) ex.sweep(t);
    }
    return std::move(ex.out);
}

DbContribution generic_sweep(AppId app, const fs::path& root, const ArtifactSource& db_file,
                             const std::vector<std::string>* only_tables) {
    Extractor ex(app, db_file);
    auto tables = open_and_load(root, db_file, ex.out.partial.warnings);
    for (const auto& t : tables) {
        if (only_tables && std::find(only_tables->begin(), only_tables->end(), t.name) == only_tables->end()) continue;
        ex.out.tables.push_back({t.name, nullptr, 0.0});
        ex.sweep(t);
    }
    return std::move(ex.out);
}

}  // namespace gsnx
