#include "forge.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "digest.hpp"
#include "errors.hpp"
#include "sqlite_db.hpp"
#include "schema.hpp"
#include "text_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace gsnx {

namespace {

// --- deterministic randomness ----------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return splitmix64(seed ^ h);
}

/// mt19937_64 with our own bounded sampling; std distributions differ between standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed) {}

    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do x = g_();
        while (x >= limit);
        return x % n;
    }
    std::int64_t range(std::int64_t lo, std::int64_t hi) { return lo + static_cast<std::int64_t>(below(hi - lo + 1)); }
    bool coin() { return below(2) == 1; }

    template <typename T>
    const T& pick(std::span<const T> v) {
        return v[below(v.size())];
    }

    std::string chars(std::string_view alphabet, std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[below(alphabet.size())]);
        return s;
    }
    std::string hex(std::size_t n) { return chars("0123456789abcdef", n); }
    std::string digits(std::size_t n) { return std::string(1, "123456789"[below(9)]) + chars("0123456789", n - 1); }
    std::string alnum(std::size_t n) {
        return chars("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789", n);
    }

private:
    std::mt19937_64 g_;
};

constexpr std::string_view kFirstNames[] = {"Alex",  "Sam",   "Jordan", "Casey", "Riley",  "Morgan", "Taylor", "Jamie",
                                            "Avery", "Quinn", "Drew",   "Reese", "Parker", "Rowan",  "Sky",    "Emerson"};
constexpr std::string_view kWords[] = {"hey",    "coffee", "tonight", "later", "beach",  "movie",  "sounds", "great",
                                       "maybe",  "weekend", "lunch",  "see",   "you",    "soon",   "thanks", "fun",
                                       "music",  "park",   "dinner",  "walk",  "sure",   "nice",   "photo",  "how",
                                       "about",  "friday", "busy",    "work",  "free",   "cool",   "where",  "meet"};
constexpr std::string_view kSuburbs[] = {"Norwood", "Glenelg", "Unley", "Prospect", "Burnside", "Henley Beach", "Brighton",
                                         "Goodwood"};
constexpr std::string_view kFieldNames[] = {"Slim", "Average", "Muscular", "Stocky", "Large"};

constexpr std::int64_t kBaseEpochSeconds = 1401580800;  // 2014-06-01T00:00:00Z
constexpr std::int64_t kLocationSentSeconds = 1403136000;

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i + 1 < hex.size(); i += 2) out.push_back(static_cast<std::uint8_t>(std::stoi(std::string(hex.substr(i, 2)), nullptr, 16)));
    return out;
}

constexpr std::string_view kJpegHex =
    "ffd8ffe000104a46494600010100000100010000ffdb0043000302020302020303030304030304050805050404050a070706080c0a0c0c0b0a0b"
    "0b0d0e12100d0e110e0b0b1016101113141515150c0f171816141812141514ffdb00430103040405040509050509140d0b0d1414141414141414"
    "141414141414141414141414141414141414141414141414141414141414141414141414141414141414ffc00011080001000103012200021101"
    "031101ffc4001f0000010501010101010100000000000000000102030405060708090a0bffc400b5100002010303020403050504040000017d01"
    "020300041105122131410613516107227114328191a1082342b1c11552d1f02433627282090a161718191a25262728292a3435363738393a4344"
    "45464748494a535455565758595a636465666768696a737475767778797a838485868788898a92939495969798999aa2a3a4a5a6a7a8a9aab2b3"
    "b4b5b6b7b8b9bac2c3c4c5c6c7c8c9cad2d3d4d5d6d7d8d9dae1e2e3e4e5e6e7e8e9eaf1f2f3f4f5f6f7f8f9faffc4001f010003010101010101"
    "0101010000000000000102030405060708090a0bffc400b511000201020404030407050404000102770001020311040521310612415107617113"
    "22328108144291a1b1c109233352f0156272d10a162434e125f11718191a262728292a35363738393a434445464748494a535455565758595a63"
    "6465666768696a737475767778797a82838485868788898a92939495969798999aa2a3a4a5a6a7a8a9aab2b3b4b5b6b7b8b9bac2c3c4c5c6c7c8"
    "c9cad2d3d4d5d6d7d8d9dae2e3e4e5e6e7e8e9eaf2f3f4f5f6f7f8f9faffda000c03010002110311003f00f24a28a2b23fb2cfffd9";
constexpr std::string_view kWebpHex = "524946461e000000574542505650384c110000002f000000000750bc2217aaff8188e87f0000";

std::string iso(std::int64_t ms) { return format_instant(Instant{std::chrono::milliseconds{ms}}); }
Instant at_ms(std::int64_t ms) { return Instant{std::chrono::milliseconds{ms}}; }

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

struct PrefEntry {
    std::string type;  // string, long, int, boolean, float
    std::string name;
    std::string value;
};

std::string render_prefs(const std::vector<PrefEntry>& entries) {
    std::string s = "<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n<map>\n";
    for (const auto& e : entries) {
        if (e.type == "string")
            s += "    <string name=\"" + xml_escape(e.name) + "\">" + xml_escape(e.value) + "</string>\n";
        else
            s += "    <" + e.type + " name=\"" + xml_escape(e.name) + "\" value=\"" + xml_escape(e.value) + "\" />\n";
    }
    s += "</map>\n";
    return s;
}

std::string package_dir(AppId app) {
    static const AppRegistry reg = AppRegistry::defaults();
    auto p = reg.package_for(app);
    if (!p) throw ForgeError("no package registered for " + std::string(app_name(app)));
    return "data/data/" + *p;
}

std::string host_for(AppId app) {
    switch (app) {
        case AppId::Badoo: return "badoo.com";
        case AppId::Grindr: return "grindr.mobi";
        case AppId::Skout: return "api.skout.com";
        case AppId::Tinder: return "api.gotinder.com";
        case AppId::MeetMe: return "api.meetme.com";
        case AppId::Jaumo: return "api.jaumo.com";
        case AppId::FullCircle: return "api.fullcircle.example";
        case AppId::MiuMeet: return "api.miumeet.example";
        case AppId::Unknown: break;
    }
    return "unknown.example";
}

std::string sentence(Rng& rng) {
    const auto n = rng.range(3, 7);
    std::string s;
    for (std::int64_t i = 0; i < n; ++i) {
        if (i) s += ' ';
        s += rng.pick<std::string_view>(kWords);
    }
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string coordinate(Rng& rng, double base) {
    // five fraction digits, last one non-zero so the literal survives any numeric round trip
    const double v = base + static_cast<double>(rng.range(-5000, 5000)) / 100000.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f%d", v, static_cast<int>(rng.range(1, 9)));
    return buf;
}

constexpr std::string_view kFacebookTokenFiles[] = {
    "shared_prefs/com.facebook.SharedPreferencesTokenCachingStrategy.DEFAULT_KEY.xml",
    "shared_prefs/com.facebook.AuthorizationClient.WebViewAuthHandler.TOKEN_STORE_KEY.xml",
};
constexpr std::string_view kFacebookCacheTokenKey = "com.facebook.TokenCachingStrategy.Token";
constexpr std::string_view kFacebookStoreTokenKey = "access_token";

struct AppTokens {
    std::string facebook;
    std::string native;
};

AppTokens tokens_for(std::uint64_t seed, AppId app) {
    Rng r(derive_seed(seed, "tokens/" + std::string(app_name(app))));
    AppTokens t;
    t.facebook = "EAAC" + r.alnum(96);
    switch (app) {
        case AppId::Grindr: t.native = r.hex(32); break;
        case AppId::Tinder: t.native = r.hex(8) + "-" + r.hex(4) + "-" + r.hex(4) + "-" + r.hex(4) + "-" + r.hex(12); break;
        case AppId::MiuMeet: t.native = r.hex(40); break;
        default: break;
    }
    return t;
}

AuthToken make_token(AppId app, TokenProvider p, std::string value, std::string path, std::string key) {
    AuthToken t;
    t.app = app;
    t.provider = p;
    t.token = std::move(value);
    t.source.file_path = std::move(path);
    t.source.kind = FileKind::PrefsXml;
    t.source.detail = "key=" + key;
    return t;
}

// --- spec JSON -------------------------------------------------------------------

AppId app_from_json(const std::string& name) {
    const AppId a = parse_app_name(name);
    if (a == AppId::Unknown) throw ForgeError("unknown app '" + name + "' in forge spec");
    return a;
}

int count_field(const json& j, const char* key) {
    if (!j.contains(key)) return 0;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 100000)
        throw ForgeError(std::string("count '") + key + "' must be a non-negative integer");
    return v.get<int>();
}

// --- transaction templates -------------------------------------------------------

HttpTransaction base_txn(AppId app, bool tls, std::string method, const std::string& path) {
    HttpTransaction t;
    t.method = std::move(method);
    t.url = std::string(tls ? "https://" : "http://") + host_for(app) + path;
    t.tls = tls;
    t.app_hint = app;
    t.response_status = 200;
    t.request_headers["User-Agent"] = "okhttp/2.3.0";
    return t;
}

bool tls_allowed(LeakCategory c) {
    switch (c) {
        case LeakCategory::PlaintextMessage:
        case LeakCategory::PlaintextImage:
        case LeakCategory::PlaintextImageUrl:
        case LeakCategory::EmailAddress: return false;
        default: return true;
    }
}

HttpTransaction planted(AppId app, LeakCategory c, Rng& rng, std::uint64_t seed) {
    const bool tls = tls_allowed(c) && (app == AppId::Grindr || app == AppId::Tinder || app == AppId::Jaumo || rng.coin());
    switch (c) {
        case LeakCategory::PlaintextMessage: {
            auto t = base_txn(app, false, "POST", "/chat/send");
            t.request_headers["Content-Type"] = "application/json";
            t.request_body = json{{"to", rng.digits(8)}, {"message", sentence(rng)}}.dump();
            t.response_body = R"({"status":"ok"})";
            return t;
        }
        case LeakCategory::PlaintextImage: {
            auto t = base_txn(app, false, "GET", "/photos/" + rng.hex(16));
            t.response_headers["Content-Type"] = "image/jpeg";
            const auto img = tiny_jpeg(rng.hex(8));
            t.response_body.assign(img.begin(), img.end());
            return t;
        }
        case LeakCategory::PlaintextImageUrl: {
            if (app == AppId::Skout) {
                auto t = base_txn(app, false, "GET", "/profile/" + rng.digits(7));
                t.response_body = "<profile><id>" + rng.digits(7) + "</id><picUrl>http://i.skout.com/pics/" + rng.hex(20) +
                                  ".jpg</picUrl></profile>";
                return t;
            }
            auto t = base_txn(app, false, "GET", "/users/" + rng.digits(8));
            t.response_body = json{{"id", rng.digits(8)}, {"picture", "http://" + host_for(app) + "/img/" + rng.hex(20) + ".jpg"}}.dump();
            return t;
        }
        case LeakCategory::ExactLocation: {
            auto t = base_txn(app, tls, "POST", "/v3/location");
            const auto lat = coordinate(rng, -34.9285);
            const auto lon = coordinate(rng, 138.6007);
            if (rng.coin()) {
                t.request_headers["Content-Type"] = "application/json";
                t.request_body = R"({"lat":)" + lat + R"(,"lon":)" + lon + "}";
            } else {
                t.request_headers["Content-Type"] = "application/x-www-form-urlencoded";
                t.request_body = "lat=" + lat + "&lon=" + lon;
            }
            return t;
        }
        case LeakCategory::CoarseLocation: {
            if (app == AppId::Skout) {
                auto t = base_txn(app, tls, "GET", "/profile/" + rng.digits(7));
                t.response_body = "<profile><country>Australia</country><state>SA</state><distance>" +
                                  std::to_string(rng.range(1, 40)) + "</distance></profile>";
                return t;
            }
            auto t = base_txn(app, tls, "GET", "/nearby/" + rng.digits(6));
            t.response_body = json{{"users", json::array({json{{"id", rng.digits(8)},
                                                              {"suburb", std::string(rng.pick<std::string_view>(kSuburbs))},
                                                              {"distance", std::to_string(rng.range(100, 9000)) + " m"}}})}}
                                  .dump();
            return t;
        }
        case LeakCategory::EmailAddress: {
            auto t = base_txn(app, false, "POST", "/account/update");
            t.request_body = json{{"email", text::lower(rng.pick<std::string_view>(kFirstNames)) + "." + rng.digits(4) + "@example.org"}}.dump();
            return t;
        }
        case LeakCategory::TokenInTransit: {
            auto t = base_txn(app, tls, "GET", "/v2/me");
            const auto tok = tokens_for(seed, app);
            t.request_headers["Authorization"] = "Bearer " + (tok.native.empty() ? tok.facebook : tok.native);
            return t;
        }
        case LeakCategory::LocationInFilename: {
            auto t = base_txn(app, true, "GET", "/imgs/" + coordinate(rng, -34.9285) + "_" + coordinate(rng, 138.6007) + ".jpg");
            t.response_headers["Content-Type"] = "image/jpeg";
            const auto img = tiny_jpeg(rng.hex(8));
            t.response_body.assign(img.begin(), img.end());
            return t;
        }
    }
    throw ForgeError("unhandled leak category");
}

/// Traffic that resembles leaks but must not trigger any rule.
HttpTransaction decoy(AppId app, Rng& rng) {
    switch (rng.below(10)) {
        case 0: {  // chat over TLS
            auto t = base_txn(app, true, "POST", "/chat/send");
            t.request_body = json{{"to", rng.digits(8)}, {"message", sentence(rng)}}.dump();
            return t;
        }
        case 1: {  // image over TLS
            auto t = base_txn(app, true, "GET", "/photos/" + rng.hex(16));
            const auto img = tiny_jpeg(rng.hex(8));
            t.response_body.assign(img.begin(), img.end());
            return t;
        }
        case 2: {  // email over TLS
            auto t = base_txn(app, true, "POST", "/account/update");
            t.request_body = json{{"email", "user" + rng.digits(4) + "@example.com"}}.dump();
            return t;
        }
        case 3: {  // a single latitude-like decimal
            auto t = base_txn(app, false, "POST", "/v3/ping");
            t.request_body = "lat=" + coordinate(rng, -34.9285) + "&mode=" + std::string(rng.pick<std::string_view>(kWords));
            return t;
        }
        case 4: {  // out-of-range pair
            auto t = base_txn(app, false, "POST", "/v3/metrics");
            t.request_body = json{{"a", coordinate(rng, 134.9285)}, {"b", coordinate(rng, 238.6007)}}.dump();
            return t;
        }
        case 5: {  // too few fraction digits
            auto t = base_txn(app, false, "GET", "/grid?cell=-34.928," + std::to_string(rng.range(100, 179)) + ".601");
            return t;
        }
        case 6: {  // two decimals too far apart
            auto t = base_txn(app, false, "POST", "/scores");
            // written by hand: the gap between the two decimals must survive, so no key sorting
            t.request_body = R"({"score":)" + coordinate(rng, 12.3456) + R"(,"note":")" +
                             rng.chars("abcdefghijklmnopqrstuvwxyz", 50) + R"(","rank":)" + coordinate(rng, 45.6789) + "}";
            return t;
        }
        case 7: {  // image link over TLS
            auto t = base_txn(app, true, "GET", "/users/" + rng.digits(8));
            t.response_body = json{{"picture", "https://" + host_for(app) + "/img/" + rng.hex(20) + ".jpg"}}.dump();
            return t;
        }
        case 8: {  // non-image link in plaintext
            auto t = base_txn(app, false, "GET", "/help");
            t.response_body = json{{"link", "http://" + host_for(app) + "/faq/" + rng.hex(6) + ".html"}, {"status", "ok"}}.dump();
            return t;
        }
        default: {  // plain bookkeeping
            auto t = base_txn(app, rng.coin(), "GET", "/v1/config");
            t.response_body = json{{"status", "ok"}, {"count", rng.range(0, 50)}, {"build", "3.14159"}}.dump();
            return t;
        }
    }
}

// --- corpus writer ---------------------------------------------------------------

class CorpusWriter {
public:
    CorpusWriter(const ForgeSpec& spec, const fs::path& evidence) : spec_(spec), root_(evidence) {
        for (const auto& p : spec.deny_patterns) {
            try {
                deny_.emplace_back(p, std::regex::ECMAScript);
            } catch (const std::regex_error& e) {
                throw ForgeError("invalid deny pattern '" + p + "': " + e.what());
            }
        }
    }

    ForgeManifest run() {
        for (const auto& [app, counts] : spec_.apps) {
            rng_ = std::make_unique<Rng>(derive_seed(spec_.seed, "app/" + std::string(app_name(app))));
            fs::create_directories(root_ / package_dir(app));
            switch (app) {
                case AppId::Grindr: grindr(counts); break;
                case AppId::Skout: skout(counts); break;
                case AppId::Tinder: tinder(counts); break;
                case AppId::Badoo: badoo(counts); break;
                case AppId::MeetMe: meetme(counts); break;
                case AppId::Jaumo: jaumo(counts); break;
                case AppId::FullCircle:
                case AppId::MiuMeet: credentials_only(app, counts); break;
                case AppId::Unknown: break;
            }
        }
        if (!spec_.apps.empty()) inject_faults(spec_.apps.begin()->first);
        std::sort(m_.files.begin(), m_.files.end());
        return std::move(m_);
    }

private:
    Rng& rng() { return *rng_; }

    std::string guard(std::string v) {
        for (std::size_t i = 0; i < deny_.size(); ++i) {
            if (std::regex_search(v, deny_[i]))
                throw ForgeError("generated value matches deny pattern '" + spec_.deny_patterns[i] + "'");
        }
        return v;
    }

    std::string name() { return guard(std::string(rng().pick<std::string_view>(kFirstNames))); }
    std::string message() { return guard(sentence(rng())); }

    std::string rel(AppId app, std::string_view sub) { return package_dir(app) + "/" + std::string(sub); }

    void write(const std::string& relpath, std::span<const std::uint8_t> bytes) {
        const fs::path p = root_ / relpath;
        fs::create_directories(p.parent_path());
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f) throw ForgeError("cannot write " + p.string());
        f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!f) throw ForgeError("write failed for " + p.string());
        m_.files.push_back(relpath);
    }
    void write(const std::string& relpath, std::string_view text) {
        write(relpath, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
    }

    std::unique_ptr<sql::Writer> open_db(const std::string& relpath) {
        const fs::path p = root_ / relpath;
        fs::create_directories(p.parent_path());
        auto w = std::make_unique<sql::Writer>(p);
        w->exec("PRAGMA journal_mode=DELETE");
        w->exec("BEGIN");
        m_.files.push_back(relpath);
        return w;
    }

    static std::string sql_type(ColumnRole r) {
        switch (r) {
            case ColumnRole::Timestamp:
            case ColumnRole::Flag:
            case ColumnRole::Number: return "INTEGER";
            default: return "TEXT";
        }
    }

    static void create_registry_table(sql::Writer& w, const TableSpec& spec) {
        std::string s = "CREATE TABLE " + sql::quote_ident(spec.table_name) + " (";
        if (spec.columns.empty()) s += "Id TEXT";  // no columns documented; keep the table creatable
        for (std::size_t i = 0; i < spec.columns.size(); ++i) {
            if (i) s += ", ";
            s += sql::quote_ident(spec.columns[i].name) + " " + sql_type(spec.columns[i].role);
        }
        w.exec(s + ")");
    }

    /// Inserts a row into a registry table; columns not in `given` get filler by role.
    void insert_row(sql::Writer& w, AppId app, std::string_view table, const std::map<std::string, sql::Writer::Value>& given) {
        const TableSpec* spec = SchemaRegistry::instance().find(app, table);
        if (!spec) throw ForgeError("no registry table " + std::string(table));
        std::vector<std::string_view> cols;
        std::vector<sql::Writer::Value> vals;
        for (const auto& c : spec->columns) {
            cols.push_back(c.name);
            auto it = given.find(std::string(c.name));
            if (it != given.end()) {
                vals.push_back(it->second);
                continue;
            }
            switch (c.role) {
                case ColumnRole::Id: vals.emplace_back(rng().digits(6)); break;
                case ColumnRole::ForeignKey: vals.emplace_back(std::string("0")); break;
                case ColumnRole::Timestamp: vals.emplace_back(std::int64_t{(kBaseEpochSeconds - 86400) * 1000}); break;
                case ColumnRole::Text: vals.emplace_back(std::string(rng().pick<std::string_view>(kFieldNames))); break;
                case ColumnRole::Flag: vals.emplace_back(std::int64_t{0}); break;
                case ColumnRole::Number: vals.emplace_back(static_cast<std::int64_t>(rng().range(0, 9))); break;
                case ColumnRole::Url: vals.emplace_back("https://" + host_for(app) + "/t/" + rng().hex(12) + ".jpg"); break;
                case ColumnRole::MediaHash: vals.emplace_back(rng().hex(40)); break;
                case ColumnRole::Params: vals.emplace_back(std::string("{}")); break;
                case ColumnRole::Unused: vals.emplace_back(nullptr); break;
            }
        }
        w.insert(table, cols, vals);
    }

    void create_all_tables(sql::Writer& w, AppId app) {
        for (const TableSpec* t : SchemaRegistry::instance().tables_for(app)) create_registry_table(w, *t);
    }

    void picasso(AppId app, const std::string& url, const std::string& profile_id) {
        const std::string stem = rel(app, "cache/Picasso-cache/" + sha256_hex(std::string_view(url)).substr(0, 32));
        const std::string meta = "GET " + url + " HTTP/1.1\r\nHost: " + host_for(app) + "\r\nUser-Agent: Picasso\r\n\r\n"
                                 "HTTP/1.1 200 OK\r\nContent-Type: image/jpeg\r\n";
        const auto img = tiny_jpeg(url);
        write(stem + ".o", meta);
        write(stem + ".i", img);
        m_.image_links.push_back({app, profile_id, url, sha256_hex(std::span<const std::uint8_t>(img))});
    }

    void facebook_files(AppId app, bool both) {
        const auto tok = tokens_for(spec_.seed, app);
        const std::string cache_path = rel(app, kFacebookTokenFiles[0]);
        write(cache_path, render_prefs({{"string", std::string(kFacebookCacheTokenKey), tok.facebook},
                                        {"long", "com.facebook.TokenCachingStrategy.ExpirationDate",
                                         std::to_string((kBaseEpochSeconds + 60 * 86400) * 1000)},
                                        {"string", "com.facebook.TokenCachingStrategy.Permissions", "public_profile"}}));
        m_.tokens.push_back(make_token(app, TokenProvider::Facebook, tok.facebook, cache_path, std::string(kFacebookCacheTokenKey)));
        if (both) {
            const std::string store_path = rel(app, kFacebookTokenFiles[1]);
            write(store_path, render_prefs({{"string", std::string(kFacebookStoreTokenKey), tok.facebook}}));
            m_.tokens.push_back(make_token(app, TokenProvider::Facebook, tok.facebook, store_path, std::string(kFacebookStoreTokenKey)));
        }
    }

    // Grindr ----------------------------------------------------------------------

    void grindr(const AppCounts& c) {
        const AppId app = AppId::Grindr;
        const std::string owner = rng().digits(8);
        m_.owners[app] = owner;
        std::int64_t clock = kBaseEpochSeconds * 1000;

        if (c.credentials > 0) {
            const auto tok = tokens_for(spec_.seed, app);
            const std::string path = rel(app, "shared_prefs/Rules.xml");
            const std::string email = guard(text::lower(name()) + "." + rng().digits(3) + "@example.com");
            write(path, render_prefs({{"string", "token", tok.native},
                                      {"string", "sessionId", rng().hex(16)},
                                      {"long", "lastActiveTime", std::to_string(clock + 3 * 86400 * 1000)},
                                      {"string", "email", email}}));
            m_.tokens.push_back(make_token(app, TokenProvider::Grindr, tok.native, path, "token"));
            m_.emails.push_back({app, email, Confidence::Exact, {path, FileKind::PrefsXml, std::nullopt, {}}});
        }
        if (c.profiles + c.messages + c.images == 0) return;

        const std::string db_path = rel(app, "databases/grindr.db");
        auto w = open_db(db_path);
        create_all_tables(*w, app);

        std::vector<std::string> ids;
        std::set<std::string> used{owner};
        auto profile_row = [&](const std::string& id, bool is_owner, bool with_image) {
            ProfileRecord p;
            p.app = app;
            p.profile_id = id;
            p.display_name = name();
            p.age = static_cast<int>(rng().range(19, 45));
            const std::int64_t birth_ms = rng().range(3653, 9131) * 86400000LL;
            p.birth_date = format_date(at_ms(birth_ms));
            const std::string fb = rng().digits(15);
            p.social_ids["Facebook"] = fb;
            std::optional<std::string> tw, ig;
            if (rng().coin()) p.social_ids["Twitter"] = *(tw = "@" + text::lower(*p.display_name) + rng().digits(2));
            if (rng().coin()) p.social_ids["Instagram"] = *(ig = text::lower(*p.display_name) + "_" + rng().digits(3));
            if (!is_owner) p.image_hash = rng().hex(40);
            const std::int64_t seen = clock - rng().range(60, 86400) * 1000;
            p.last_seen = at_ms(seen);
            p.is_owner = is_owner;
            p.origin_table = "profile";
            insert_row(*w, app, "profile",
                       {{"profileID", id},
                        {"displayName", *p.display_name},
                        {"age", static_cast<std::int64_t>(*p.age)},
                        {"birthdate", birth_ms},
                        {"facebookID", fb},
                        {"twitterID", tw ? sql::Writer::Value(*tw) : sql::Writer::Value(nullptr)},
                        {"instagramID", ig ? sql::Writer::Value(*ig) : sql::Writer::Value(nullptr)},
                        {"profileImageHash", p.image_hash ? sql::Writer::Value(*p.image_hash) : sql::Writer::Value(nullptr)},
                        {"lastSeen", seen},
                        {"isCurrent", std::int64_t{is_owner ? 1 : 0}},
                        {"headline", message()},
                        {"about", message()}});
            if (with_image && p.image_hash)
                picasso(app, "https://cdns.grindr.com/images/profile/1024x1024/" + *p.image_hash, id);
            p.source.file_path = db_path;
            m_.profiles.push_back(std::move(p));
        };
        profile_row(owner, true, false);
        for (int i = 0; i < c.profiles; ++i) {
            std::string id;
            do id = rng().digits(8);
            while (!used.insert(id).second);
            ids.push_back(id);
            profile_row(id, false, i < c.images);
        }

        for (int i = 0; i < c.messages; ++i) {
            const std::string partner = ids.empty() ? rng().digits(8) : ids[static_cast<std::size_t>(i) % ids.size()];
            const bool outbound = rng().coin();
            clock += rng().range(60, 7200) * 1000;
            ChatMessage m;
            m.app = app;
            m.message_id = rng().hex(16);
            m.sender_id = outbound ? owner : partner;
            m.recipient_id = outbound ? partner : owner;
            m.sent_at = at_ms(clock);
            m.body_is_media = i % 4 == 3;
            m.body = m.body_is_media ? rng().hex(40) : message();
            m.message_type = m.body_is_media ? "image" : "text";
            m.direction = outbound ? Direction::Outbound : Direction::Inbound;
            m.unread = !outbound && rng().coin();
            m.failed = false;
            insert_row(*w, app, "chat",
                       {{"messageID", m.message_id},
                        {"Source", m.sender_id},
                        {"Target", m.recipient_id},
                        {"Timestamp", clock},
                        {"Type", m.message_type},
                        {"Body", m.body},
                        {"Unread", std::int64_t{*m.unread}},
                        {"Failed", std::int64_t{0}}});
            if (m.body_is_media)
                insert_row(*w, app, "imageGallery", {{"messageID", m.message_id}, {"mediaHash", m.body}, {"Profile", partner}});
            m.source.file_path = db_path;
            m_.messages.push_back(std::move(m));
        }

        for (std::string_view t : {"bodyTypeField", "ethnicityField", "flagReason", "lookingForField"}) {
            for (int i = 0; i < 3; ++i) insert_row(*w, app, t, {{"fieldID", std::to_string(i + 1)}});
        }
        if (!ids.empty()) {
            insert_row(*w, app, "blocks", {{"profile", ids.front()}, {"timeStamp", clock}, {"isBlocked", std::int64_t{1}}});
            insert_row(*w, app, "lookingFor", {{"Profile", ids.front()}, {"lookingForId", std::string("2")}});
        }
        insert_row(*w, app, "broadcast", {{"messageID", rng().hex(16)}, {"expirationDate", clock + 86400000}});
        insert_row(*w, app, "moderation", {{"messageID", rng().hex(16)}, {"Message", std::string("Profile image approved")}, {"Type", std::string("image")}});
        w->exec("COMMIT");
        w.reset();

        auto api = open_db(rel(app, "databases/1dfd3ff262804a5794a90eb9d3a15b9f"));
        api->exec("CREATE TABLE api_calls (id INTEGER PRIMARY KEY, endpoint TEXT, called INTEGER)");
        for (std::string_view ep : {"/v3/me/prefs", "/v3/locations", "/v3/broadcasts"}) {
            std::vector<std::string_view> cols{"endpoint", "called"};
            std::vector<sql::Writer::Value> vals{"https://grindr.mobi" + std::string(ep), clock};
            api->insert("api_calls", cols, vals);
        }
        api->exec("COMMIT");
    }

    // Skout -----------------------------------------------------------------------

    void skout(const AppCounts& c) {
        const AppId app = AppId::Skout;
        std::optional<std::string> owner;
        std::int64_t clock = kBaseEpochSeconds + 2 * 86400;

        if (c.credentials > 0) {
            owner = rng().digits(7);
            m_.owners[app] = *owner;
            const auto tok = tokens_for(spec_.seed, app);
            const std::string path = rel(app, "shared_prefs/LOGIN_PREFS.xml");
            write(path, render_prefs({{"string", "fb_access_token", tok.facebook},
                                      {"string", "user_id", *owner},
                                      {"boolean", "remember_me", "true"}}));
            m_.tokens.push_back(make_token(app, TokenProvider::Facebook, tok.facebook, path, "fb_access_token"));
            facebook_files(app, false);
            write(rel(app, "shared_prefs/LOCATION_PREFS.xml"),
                  render_prefs({{"long", "LOCATION_LAST_SENT_TIME", std::to_string(kLocationSentSeconds)}}));
        }
        if (c.profiles + c.messages == 0) return;

        const std::string db_path = rel(app, "databases/skout.db");
        auto w = open_db(db_path);
        create_all_tables(*w, app);
        const std::string me = owner.value_or(rng().digits(7));

        std::vector<std::string> ids;
        for (int i = 0; i < c.profiles; ++i) {
            ProfileRecord p;
            p.app = app;
            p.profile_id = rng().digits(7);
            p.display_name = name() + rng().digits(2);
            p.picture_url = "http://i.skout.com/pics/" + rng().hex(20) + ".jpg";
            const std::int64_t last = clock - rng().range(600, 86400);
            p.last_message_at = at_ms(last * 1000);
            p.is_owner = false;
            p.origin_table = "skoutUsersTable";
            insert_row(*w, app, "skoutUsersTable",
                       {{"userID", p.profile_id},
                        {"userName", *p.display_name},
                        {"picUrl", *p.picture_url},
                        {"userLastMessageID", rng().digits(6)},
                        {"lastMessageTimestamp", last}});
            if (i < c.images) picasso(app, *p.picture_url, p.profile_id);
            ids.push_back(p.profile_id);
            p.source.file_path = db_path;
            m_.profiles.push_back(std::move(p));
        }

        for (int i = 0; i < c.messages; ++i) {
            const std::string partner = ids.empty() ? rng().digits(7) : ids[static_cast<std::size_t>(i) % ids.size()];
            const bool outbound = rng().coin();
            clock += rng().range(60, 7200);
            ChatMessage m;
            m.app = app;
            m.message_id = rng().digits(9);
            m.sender_id = outbound ? me : partner;
            m.recipient_id = outbound ? partner : me;
            m.thread_id = rng().digits(6);
            m.sent_at = at_ms(clock * 1000);
            if (i % 4 == 2) {
                m.message_type = "picture";
                m.body = "http://i.skout.com/chat/" + rng().hex(16) + ".jpg";
                m.body_is_media = true;
            } else if (i % 5 == 4) {
                m.message_type = "rich";
                m.body = "Welcome to Skout! " + message();
                m.admin_origin = true;
            } else {
                m.message_type = "text";
                m.body = message();
            }
            m.direction = owner ? (outbound ? Direction::Outbound : Direction::Inbound) : Direction::Unknown;
            insert_row(*w, app, "skoutMessages",
                       {{"messageID", m.message_id},
                        {"Timestamp", clock},
                        {"fromUserID", m.sender_id},
                        {"toUserID", m.recipient_id},
                        {"chatID", m.thread_id},
                        {"Type", m.message_type},
                        {"Message", m.body},
                        {"messageOrdered", std::int64_t{1}}});
            m.source.file_path = db_path;
            m_.messages.push_back(std::move(m));
        }
        w->exec("COMMIT");
    }

    // Tinder ----------------------------------------------------------------------

    void tinder(const AppCounts& c) {
        const AppId app = AppId::Tinder;
        const std::string owner = rng().hex(24);
        std::int64_t clock = kBaseEpochSeconds * 1000 + 4 * 86400000LL;

        std::vector<PrefEntry> sp;
        const auto tok = tokens_for(spec_.seed, app);
        const std::string sp_path = rel(app, "shared_prefs/SP.xml");
        if (c.credentials > 0) {
            m_.owners[app] = owner;
            sp.push_back({"string", "facebook_token", tok.facebook});
            sp.push_back({"string", "api_token", tok.native});
            sp.push_back({"string", "user_id", owner});
            m_.tokens.push_back(make_token(app, TokenProvider::Facebook, tok.facebook, sp_path, "facebook_token"));
            m_.tokens.push_back(make_token(app, TokenProvider::Tinder, tok.native, sp_path, "api_token"));
        }
        if (c.locations > 0) {
            const auto lat = coordinate(rng(), -34.9285);
            const auto lon = coordinate(rng(), 138.6007);
            sp.push_back({"float", "latitude", lat});
            sp.push_back({"float", "longitude", lon});
            LocationFix f;
            f.app = app;
            f.lat = std::stod(lat);
            f.lon = std::stod(lon);
            f.source = {sp_path, FileKind::PrefsXml, std::nullopt, "keys=latitude,longitude"};
            m_.locations.push_back(std::move(f));
        }
        if (!sp.empty()) write(sp_path, render_prefs(sp));
        if (c.credentials > 0) facebook_files(app, false);

        const int analytics_fixes = std::max(0, c.locations - 1);
        if (c.profiles + c.messages + c.matches + analytics_fixes == 0) return;

        const std::string db_path = rel(app, "databases/tinder.db");
        auto w = open_db(db_path);
        create_all_tables(*w, app);

        struct M {
            std::string id, user;
        };
        std::vector<M> matches;
        for (int i = 0; i < c.matches; ++i) {
            MatchRecord mr;
            mr.app = app;
            mr.match_id = rng().hex(24);
            mr.counterpart_user_id = rng().hex(24);
            mr.counterpart_name = name();
            const std::int64_t created = clock + i * 3600000LL;
            const std::int64_t last = created + rng().range(1, 48) * 3600000LL;
            mr.created_at = at_ms(created);
            mr.last_activity = at_ms(last);
            mr.viewed = rng().coin();
            insert_row(*w, app, "matches",
                       {{"Id", mr.match_id},
                        {"User_id", mr.counterpart_user_id},
                        {"Created", created},
                        {"Last_activity", last},
                        {"Touched", std::int64_t{1}},
                        {"Viewed", std::int64_t{*mr.viewed}},
                        {"User_name", *mr.counterpart_name},
                        {"Reported_for", std::int64_t{0}},
                        {"Gender", std::int64_t{1}},
                        {"Following", std::int64_t{0}}});
            matches.push_back({mr.match_id, mr.counterpart_user_id});
            mr.source.file_path = db_path;

            // volley cache entry for the match
            VolleyRecord v;
            v.app = app;
            v.event = {mr.match_id, true, mr.created_at};
            const std::string url = "https://api.gotinder.com/updates";
            std::string blob("\x20\x15\x03\x06", 4);
            blob += static_cast<char>(url.size());
            blob += '\0';
            blob += url;
            blob += std::string("\0\0\0\x02", 4);
            blob += json{{"matches", json::array({json{{"match_id", mr.match_id}, {"matched", true}, {"date", iso(created)}}})}}.dump();
            const std::string vpath = rel(app, "cache/volley/" + std::to_string(i) + "-" + rng().digits(9));
            write(vpath, blob);
            v.source = {vpath, FileKind::Opaque, std::nullopt, {}};
            m_.volley.push_back(std::move(v));
            m_.matches.push_back(std::move(mr));
        }
        clock += static_cast<std::int64_t>(c.matches) * 3600000LL;

        for (int i = 0; i < c.messages; ++i) {
            const M partner = matches.empty() ? M{rng().hex(24), rng().hex(24)} : matches[static_cast<std::size_t>(i) % matches.size()];
            clock += rng().range(60, 7200) * 1000;
            ChatMessage m;
            m.app = app;
            m.message_id = "rowid:" + std::to_string(i + 1);
            m.counterpart_id = partner.user;
            m.thread_id = partner.id;
            m.sent_at = at_ms(clock);
            m.body = message();
            const bool viewed = rng().coin();
            m.unread = !viewed;
            m.failed = i == 4;
            m.direction = Direction::Unknown;
            insert_row(*w, app, "messages",
                       {{"User_id", m.counterpart_id},
                        {"Match_id", m.thread_id},
                        {"Created", clock},
                        {"Has_error", std::int64_t{*m.failed}},
                        {"Text", m.body},
                        {"Viewed", std::int64_t{viewed}}});
            m.source.file_path = db_path;
            m_.messages.push_back(std::move(m));
        }

        for (int i = 0; i < analytics_fixes; ++i) {
            clock += rng().range(600, 3600) * 1000;
            const auto lat = coordinate(rng(), -34.9285);
            const auto lon = coordinate(rng(), 138.6007);
            insert_row(*w, app, "Analytic_Events",
                       {{"timestamp", clock},
                        {"Name", std::string("Recs.Fetch")},
                        {"Params", json{{"lat", lat}, {"lon", lon}, {"deviceId", rng().hex(16)}, {"network", "wifi"}}.dump()}});
            LocationFix f;
            f.app = app;
            f.lat = std::stod(lat);
            f.lon = std::stod(lon);
            f.at = at_ms(clock);
            f.source.file_path = db_path;
            m_.locations.push_back(std::move(f));
        }
        insert_row(*w, app, "Analytic_Events", {{"timestamp", clock}, {"Name", std::string("App.Open")}, {"Params", std::string("{\"session\":\"1\"}")}});

        for (int i = 0; i < c.profiles; ++i) {
            ProfileRecord p;
            p.app = app;
            p.profile_id = rng().digits(15);
            p.display_name = name() + " " + name();
            p.social_ids["Facebook"] = p.profile_id;
            p.picture_url = "https://graph.facebook.com/" + p.profile_id + "/picture?type=large";
            p.origin_table = "facebook_friends";
            insert_row(*w, app, "facebook_friends",
                       {{"Id", p.profile_id}, {"Name", *p.display_name}, {"Avatar_url", *p.picture_url}, {"Tinder", std::string("1")}});
            if (i < c.images) picasso(app, *p.picture_url, p.profile_id);
            p.source.file_path = db_path;
            m_.profiles.push_back(std::move(p));
        }

        const std::string moment = rng().hex(24);
        insert_row(*w, app, "moments", {{"Id", moment}, {"User_id", owner}, {"Created", clock}, {"Text", message()}});
        insert_row(*w, app, "photos",
                   {{"Id", rng().hex(24)}, {"User_id", owner}, {"Image_url", "https://images.gotinder.com/" + owner + "/" + rng().hex(12) + ".jpg"}});
        insert_row(*w, app, "photo_moments", {{"Id", moment}});
        insert_row(*w, app, "Moment_likes", {{"Date", clock}, {"Moment_id", moment}, {"Liked_by_id", rng().hex(24)}});
        w->exec("COMMIT");
    }

    // Badoo -----------------------------------------------------------------------

    void badoo(const AppCounts& c) {
        const AppId app = AppId::Badoo;
        if (c.credentials > 0) facebook_files(app, true);
        if (c.previews + c.images + c.credentials == 0) return;

        {
            auto ga = open_db(rel(app, "databases/google_analytics_v2.db"));
            ga->exec("CREATE TABLE hits2 (hit_id INTEGER PRIMARY KEY, hit_time INTEGER, hit_url TEXT, hit_string TEXT)");
            ga->exec("CREATE TABLE properties (cid TEXT, tid TEXT, adid INTEGER, hits_count INTEGER, params TEXT)");
            ga->exec("COMMIT");
        }
        {
            auto ck = open_db(rel(app, "app_webview/Cookies"));
            ck->exec("CREATE TABLE cookies (creation_utc INTEGER, host_key TEXT, name TEXT, value TEXT, path TEXT, expires_utc INTEGER)");
            std::vector<std::string_view> cols{"creation_utc", "host_key", "name", "value", "path", "expires_utc"};
            for (std::string_view n : {"session", "device"}) {
                std::vector<sql::Writer::Value> v{std::int64_t{13046054400000000}, std::string(".badoo.com"), std::string(n),
                                                  rng().hex(24), std::string("/"), std::int64_t{13077590400000000}};
                ck->insert("cookies", cols, v);
            }
            ck->exec("COMMIT");
        }

        if (c.previews > 0) {
            // Undocumented blob: printable fields separated by non-printable filler.
            const std::string path = rel(app, "cache/" + rng().hex(8) + "-" + rng().hex(4) + "-" + rng().hex(4) + "-" +
                                                  rng().hex(4) + "-" + rng().hex(12));
            std::string blob;
            auto filler = [&](std::size_t n) {
                for (std::size_t i = 0; i < n; ++i) {
                    const auto r = rng().below(64);
                    blob.push_back(static_cast<char>(r < 32 ? r : 0x80 + (r - 32)));
                }
            };
            filler(96);
            for (int i = 0; i < c.previews; ++i) {
                CarvedMessagePreview p;
                p.app = app;
                p.username = name() + rng().digits(2);
                p.profile_pic_url = "https://pcache.badoocdn.com/p" + rng().digits(3) + "/" + rng().hex(16) + ".jpg";
                p.last_message = message();
                p.location_suburb = std::string(rng().pick<std::string_view>(kSuburbs));
                const std::size_t start = blob.size();
                blob += p.username;
                filler(static_cast<std::size_t>(rng().range(4, 12)));
                blob += p.profile_pic_url;
                filler(static_cast<std::size_t>(rng().range(4, 12)));
                blob += p.last_message;
                filler(static_cast<std::size_t>(rng().range(4, 12)));
                blob += p.location_suburb;
                p.source = {path, FileKind::Opaque, ByteRange{start, blob.size() - start}, {}};
                filler(static_cast<std::size_t>(rng().range(80, 160)));

                LocationFix f;
                f.app = app;
                f.precision = Precision::Suburb;
                f.suburb = p.location_suburb;
                f.source = p.source;
                m_.locations.push_back(std::move(f));
                m_.previews.push_back(std::move(p));
            }
            write(path, blob);
        }

        for (int i = 0; i < c.images; ++i) {
            const std::string stem = rel(app, "cache/downloader/" + rng().hex(16));
            if (i % 2 == 0) write(stem + ".jpg", tiny_jpeg(stem));
            else write(stem + ".webp", tiny_webp());
        }
    }

    // Generic-sweep apps ------------------------------------------------------------

    void meetme(const AppCounts& c) {
        const AppId app = AppId::MeetMe;
        if (c.credentials > 0) facebook_files(app, false);
        if (c.messages > 0) {
            const std::string db_path = rel(app, "databases/meetme.db");
            auto w = open_db(db_path);
            w->exec("CREATE TABLE msgs (_id INTEGER PRIMARY KEY, sender TEXT, recipient TEXT, text_body TEXT, created_at INTEGER)");
            std::int64_t clock = kBaseEpochSeconds + 6 * 86400;
            const std::string me = rng().digits(9), other = rng().digits(9);
            for (int i = 0; i < c.messages; ++i) {
                clock += rng().range(60, 7200);
                ChatMessage m;
                m.app = app;
                m.message_id = "msgs#rowid=" + std::to_string(i + 1);
                const bool outbound = rng().coin();
                m.sender_id = outbound ? me : other;
                m.recipient_id = outbound ? other : me;
                m.sent_at = at_ms(clock * 1000);
                m.body = message();
                m.confidence = Confidence::Heuristic;
                std::vector<std::string_view> cols{"sender", "recipient", "text_body", "created_at"};
                std::vector<sql::Writer::Value> vals{m.sender_id, m.recipient_id, m.body, clock};
                w->insert("msgs", cols, vals);
                m.source.file_path = db_path;
                m_.messages.push_back(std::move(m));
            }
            w->exec("COMMIT");
        }
        for (int i = 0; i < c.images; ++i) {
            const std::string p = rel(app, "cache/images/" + rng().hex(12) + ".jpg");
            write(p, tiny_jpeg(p));
        }
    }

    void jaumo(const AppCounts& c) {
        const AppId app = AppId::Jaumo;
        if (c.credentials > 0) facebook_files(app, false);
        if (c.profiles == 0) return;
        auto w = open_db(rel(app, "databases/jaumo.db"));
        w->exec("CREATE TABLE users (id INTEGER PRIMARY KEY, name TEXT, picUrl TEXT, last_login INTEGER)");
        for (int i = 0; i < c.profiles; ++i) {
            std::vector<std::string_view> cols{"name", "picUrl", "last_login"};
            std::vector<sql::Writer::Value> vals{name(), "https://photos.jaumo.com/" + rng().hex(16) + ".jpg",
                                                 std::int64_t{kBaseEpochSeconds + rng().range(0, 86400)}};
            w->insert("users", cols, vals);
        }
        w->exec("COMMIT");
    }

    void credentials_only(AppId app, const AppCounts& c) {
        if (c.credentials == 0) return;
        if (app == AppId::MiuMeet) {
            const auto tok = tokens_for(spec_.seed, app);
            const std::string path = rel(app, "shared_prefs/miumeet.xml");
            write(path, render_prefs({{"string", "auth_token", tok.native}, {"boolean", "onboarded", "true"}}));
            m_.tokens.push_back(make_token(app, TokenProvider::MiuMeet, tok.native, path, "auth_token"));
        } else {
            facebook_files(app, false);
        }
    }

    // Faults ------------------------------------------------------------------------

    void inject_faults(AppId app) {
        const auto& f = spec_.inject_malformed;
        if (f.prefs) {
            write(rel(app, "shared_prefs/settings_broken.xml"),
                  std::string_view("<?xml version='1.0' encoding='utf-8' standalone='yes' ?>\n<map>\n    <string name=\"a\">b</str"));
            ++m_.injected_faults;
        }
        if (f.database) {
            std::string bytes("SQLite format 3\0", 16);
            bytes += std::string(84, '\xFF');
            bytes += "not a database page";
            write(rel(app, "databases/damaged.db"), bytes);
            ++m_.injected_faults;
        }
        if (f.cache) {
            const std::string stem = rel(app, "cache/Picasso-cache/" + rng().hex(32));
            write(stem + ".o", std::string_view("HTTP/1.1 200 OK\r\nContent-Type: image/jpeg\r\n"));
            write(stem + ".i", tiny_jpeg(stem));
            ++m_.injected_faults;
        }
    }

    const ForgeSpec& spec_;
    fs::path root_;
    std::vector<std::regex> deny_;
    std::unique_ptr<Rng> rng_;
    ForgeManifest m_;
};

json source_json(const ArtifactSource& s) {
    json j{{"file_path", s.file_path}, {"detail", s.detail}};
    if (s.byte_range) j["byte_range"] = {s.byte_range->offset, s.byte_range->length};
    return j;
}

template <typename T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

}  // namespace

std::vector<std::uint8_t> tiny_jpeg(std::string_view tag) {
    static const std::vector<std::uint8_t> base = from_hex(kJpegHex);
    std::vector<std::uint8_t> out(base.begin(), base.begin() + 2);  // SOI
    const std::string payload = "gsnx " + sha256_hex(tag).substr(0, 16);
    const std::size_t len = payload.size() + 2;
    out.push_back(0xFF);
    out.push_back(0xFE);
    out.push_back(static_cast<std::uint8_t>(len >> 8));
    out.push_back(static_cast<std::uint8_t>(len & 0xFF));
    out.insert(out.end(), payload.begin(), payload.end());
    out.insert(out.end(), base.begin() + 2, base.end());
    return out;
}

std::vector<std::uint8_t> tiny_webp() { return from_hex(kWebpHex); }

std::vector<AuthToken> forged_tokens(std::uint64_t seed, AppId app) {
    const auto tok = tokens_for(seed, app);
    const std::string pkg = package_dir(app);
    auto fb = [&](int which, std::string_view key) {
        return make_token(app, TokenProvider::Facebook, tok.facebook, pkg + "/" + std::string(kFacebookTokenFiles[which]),
                          std::string(key));
    };
    switch (app) {
        case AppId::Grindr: return {make_token(app, TokenProvider::Grindr, tok.native, pkg + "/shared_prefs/Rules.xml", "token")};
        case AppId::Skout:
            return {make_token(app, TokenProvider::Facebook, tok.facebook, pkg + "/shared_prefs/LOGIN_PREFS.xml", "fb_access_token"),
                    fb(0, kFacebookCacheTokenKey)};
        case AppId::Tinder:
            return {make_token(app, TokenProvider::Facebook, tok.facebook, pkg + "/shared_prefs/SP.xml", "facebook_token"),
                    make_token(app, TokenProvider::Tinder, tok.native, pkg + "/shared_prefs/SP.xml", "api_token"),
                    fb(0, kFacebookCacheTokenKey)};
        case AppId::Badoo: return {fb(0, kFacebookCacheTokenKey), fb(1, kFacebookStoreTokenKey)};
        case AppId::MiuMeet:
            return {make_token(app, TokenProvider::MiuMeet, tok.native, pkg + "/shared_prefs/miumeet.xml", "auth_token")};
        case AppId::Unknown: return {};
        default: return {fb(0, kFacebookCacheTokenKey)};
    }
}

ForgeSpec parse_forge_spec(std::string_view text) {
    auto j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ForgeError("forge spec is not a JSON object");
    ForgeSpec s;
    if (!j.contains("seed") || !j["seed"].is_number_unsigned()) throw ForgeError("forge spec needs a non-negative integer seed");
    s.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("apps")) {
        if (!j["apps"].is_object()) throw ForgeError("'apps' must be an object");
        for (const auto& [name, counts] : j["apps"].items()) {
            if (!counts.is_object()) throw ForgeError("counts for " + name + " must be an object");
            AppCounts c;
            c.profiles = count_field(counts, "profiles");
            c.messages = count_field(counts, "messages");
            c.matches = count_field(counts, "matches");
            c.images = count_field(counts, "images");
            c.locations = count_field(counts, "locations");
            c.previews = count_field(counts, "previews");
            c.credentials = count_field(counts, "credentials");
            s.apps[app_from_json(name)] = c;
        }
    }
    if (j.contains("inject_malformed")) {
        const auto& m = j["inject_malformed"];
        if (!m.is_object()) throw ForgeError("'inject_malformed' must be an object");
        auto flag = [&](const char* k) {
            if (!m.contains(k)) return false;
            if (!m[k].is_boolean()) throw ForgeError(std::string("inject_malformed.") + k + " must be boolean");
            return m[k].get<bool>();
        };
        s.inject_malformed = {flag("prefs"), flag("database"), flag("cache"), flag("log")};
    }
    if (j.contains("leaks")) {
        if (!j["leaks"].is_array()) throw ForgeError("'leaks' must be an array");
        for (const auto& l : j["leaks"]) {
            if (!l.is_object() || !l.contains("app") || !l.contains("category") || !l["app"].is_string() ||
                !l["category"].is_string())
                throw ForgeError("each leak needs string 'app' and 'category'");
            LeakRequest r;
            r.app = app_from_json(l["app"].get<std::string>());
            auto cat = parse_leak_category(l["category"].get<std::string>());
            if (!cat) throw ForgeError("unknown leak category '" + l["category"].get<std::string>() + "'");
            r.category = *cat;
            r.count = l.contains("count") ? count_field(l, "count") : 1;
            s.leaks.push_back(r);
        }
    }
    s.decoys = count_field(j, "decoys");
    if (j.contains("deny_patterns")) {
        if (!j["deny_patterns"].is_array()) throw ForgeError("'deny_patterns' must be an array of strings");
        for (const auto& p : j["deny_patterns"]) {
            if (!p.is_string()) throw ForgeError("'deny_patterns' must be an array of strings");
            s.deny_patterns.push_back(p.get<std::string>());
        }
    }
    return s;
}

ForgeSpec load_forge_spec(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ForgeError("cannot read forge spec " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_forge_spec(ss.str());
}

std::string forge_spec_to_json(const ForgeSpec& s) {
    json j;
    j["seed"] = s.seed;
    j["apps"] = json::object();
    for (const auto& [app, c] : s.apps) {
        j["apps"][std::string(app_name(app))] = {{"profiles", c.profiles}, {"messages", c.messages}, {"matches", c.matches},
                                                 {"images", c.images},     {"locations", c.locations}, {"previews", c.previews},
                                                 {"credentials", c.credentials}};
    }
    j["inject_malformed"] = {{"prefs", s.inject_malformed.prefs},
                             {"database", s.inject_malformed.database},
                             {"cache", s.inject_malformed.cache},
                             {"log", s.inject_malformed.log}};
    j["leaks"] = json::array();
    for (const auto& l : s.leaks)
        j["leaks"].push_back({{"app", app_name(l.app)}, {"category", leak_category_name(l.category)}, {"count", l.count}});
    j["decoys"] = s.decoys;
    j["deny_patterns"] = s.deny_patterns;
    return j.dump(2) + "\n";
}

ForgeSpec canonical_spec() {
    ForgeSpec s;
    s.seed = 42;
    s.apps[AppId::Badoo] = {.images = 2, .previews = 2, .credentials = 1};
    s.apps[AppId::Grindr] = {.profiles = 3, .messages = 5, .images = 3, .credentials = 1};
    s.apps[AppId::Skout] = {.profiles = 2, .messages = 4, .images = 2, .credentials = 1};
    s.apps[AppId::Tinder] = {.profiles = 2, .messages = 6, .matches = 2, .images = 2, .locations = 3, .credentials = 1};
    s.apps[AppId::MeetMe] = {.messages = 3, .images = 2, .credentials = 1};
    s.apps[AppId::Jaumo] = {.profiles = 2, .credentials = 1};
    s.apps[AppId::FullCircle] = {.credentials = 1};
    s.apps[AppId::MiuMeet] = {.credentials = 1};
    using C = LeakCategory;
    s.leaks = {
        {AppId::Grindr, C::ExactLocation, 1},     {AppId::Skout, C::PlaintextImageUrl, 1},
        {AppId::Skout, C::CoarseLocation, 1},     {AppId::Tinder, C::ExactLocation, 1},
        {AppId::Jaumo, C::LocationInFilename, 1}, {AppId::FullCircle, C::PlaintextMessage, 1},
        {AppId::FullCircle, C::PlaintextImage, 1}, {AppId::FullCircle, C::EmailAddress, 1},
        {AppId::FullCircle, C::CoarseLocation, 1}, {AppId::MiuMeet, C::PlaintextMessage, 1},
        {AppId::MiuMeet, C::ExactLocation, 1},    {AppId::MiuMeet, C::CoarseLocation, 1},
        {AppId::MiuMeet, C::EmailAddress, 1},     {AppId::MiuMeet, C::PlaintextImageUrl, 1},
        {AppId::MiuMeet, C::TokenInTransit, 1},
    };
    s.decoys = 20;
    return s;
}

ForgedLog forge_transaction_log(const ForgeSpec& spec) {
    Rng rng(derive_seed(spec.seed, "log"));
    struct Item {
        HttpTransaction t;
        std::optional<LeakCategory> planted;
    };
    std::vector<Item> items;
    for (const auto& l : spec.leaks) {
        for (int i = 0; i < l.count; ++i) items.push_back({planted(l.app, l.category, rng, spec.seed), l.category});
    }
    std::vector<AppId> decoy_apps;
    for (const auto& [app, _] : spec.apps) decoy_apps.push_back(app);
    if (decoy_apps.empty()) decoy_apps.assign(kKnownApps.begin(), kKnownApps.end());
    for (int i = 0; i < spec.decoys; ++i) {
        const AppId app = decoy_apps[rng.below(decoy_apps.size())];
        items.push_back({decoy(app, rng), std::nullopt});
    }
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);

    ForgedLog log;
    std::set<AppId> token_apps;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto& t = items[i].t;
        t.index = i;
        t.ts = static_cast<double>(kBaseEpochSeconds + 10 * 86400 + static_cast<std::int64_t>(i) * 37);
        t.at = at_ms(static_cast<std::int64_t>(t.ts) * 1000);
        log.ndjson += transaction_to_ndjson(t) + "\n";
        if (i == 0 && spec.inject_malformed.log) {
            log.ndjson += "{\"ts\": 1402444800, \"method\": \"GET\", \"url\": \n";
            ++log.malformed_lines;
        }
        if (items[i].planted) log.planted.push_back({i, *items[i].planted, *t.app_hint});
        else ++log.decoys;
        if (t.app_hint) token_apps.insert(*t.app_hint);
    }
    log.transactions = items.size();
    for (const auto& [app, _] : spec.apps) token_apps.insert(app);
    for (AppId app : token_apps) {
        auto toks = forged_tokens(spec.seed, app);
        log.tokens.insert(log.tokens.end(), toks.begin(), toks.end());
    }
    return log;
}

ForgeManifest forge_corpus(const ForgeSpec& spec, const fs::path& outdir) {
    std::error_code ec;
    if (fs::exists(outdir, ec)) {
        if (!fs::is_directory(outdir, ec)) throw ForgeError(outdir.string() + " exists and is not a directory");
        if (!fs::is_empty(outdir, ec)) throw ForgeError(outdir.string() + " is not empty");
    }
    const fs::path evidence = outdir / kForgeEvidenceDir;
    fs::create_directories(evidence / "data" / "data");

    ForgeManifest m = CorpusWriter(spec, evidence).run();
    m.log = forge_transaction_log(spec);
    {
        std::ofstream f(outdir / kForgeLogFile, std::ios::binary | std::ios::trunc);
        f << m.log.ndjson;
        if (!f) throw ForgeError("cannot write transaction log");
    }
    {
        std::ofstream f(outdir / kForgeManifestFile, std::ios::binary | std::ios::trunc);
        f << manifest_to_json(m);
        if (!f) throw ForgeError("cannot write manifest");
    }
    return m;
}

std::string manifest_to_json(const ForgeManifest& m) {
    json j;
    j["owners"] = json::object();
    for (const auto& [app, id] : m.owners) j["owners"][std::string(app_name(app))] = id;
    j["messages"] = json::array();
    for (const auto& x : m.messages)
        j["messages"].push_back({{"app", app_name(x.app)},
                                 {"message_id", x.message_id},
                                 {"sender_id", x.sender_id},
                                 {"recipient_id", x.recipient_id},
                                 {"counterpart_id", x.counterpart_id},
                                 {"thread_id", x.thread_id},
                                 {"sent_at", format_instant(x.sent_at)},
                                 {"body", x.body},
                                 {"body_is_media", x.body_is_media},
                                 {"direction", direction_name(x.direction)},
                                 {"unread", opt_json(x.unread)},
                                 {"failed", opt_json(x.failed)},
                                 {"source", source_json(x.source)}});
    j["profiles"] = json::array();
    for (const auto& p : m.profiles)
        j["profiles"].push_back({{"app", app_name(p.app)},
                                 {"profile_id", p.profile_id},
                                 {"display_name", opt_json(p.display_name)},
                                 {"birth_date", opt_json(p.birth_date)},
                                 {"age", opt_json(p.age)},
                                 {"social_ids", p.social_ids},
                                 {"image_hash", opt_json(p.image_hash)},
                                 {"picture_url", opt_json(p.picture_url)},
                                 {"is_owner", p.is_owner},
                                 {"source", source_json(p.source)}});
    j["matches"] = json::array();
    for (const auto& x : m.matches)
        j["matches"].push_back({{"app", app_name(x.app)},
                                {"match_id", x.match_id},
                                {"counterpart_user_id", x.counterpart_user_id},
                                {"created_at", format_instant(x.created_at)},
                                {"last_activity", x.last_activity ? json(format_instant(*x.last_activity)) : json(nullptr)}});
    j["tokens"] = json::array();
    for (const auto& t : m.tokens)
        j["tokens"].push_back({{"app", app_name(t.app)}, {"provider", provider_name(t.provider)}, {"token", t.token}, {"source", source_json(t.source)}});
    j["image_links"] = json::array();
    for (const auto& l : m.image_links)
        j["image_links"].push_back({{"app", app_name(l.app)}, {"profile_id", l.profile_id}, {"origin_url", l.origin_url}, {"content_hash", l.content_hash}});
    j["locations"] = json::array();
    for (const auto& l : m.locations) {
        json e{{"app", app_name(l.app)}, {"at", l.at ? json(format_instant(*l.at)) : json(nullptr)}, {"source", source_json(l.source)}};
        if (l.precision == Precision::Suburb) e["suburb"] = l.suburb;
        else {
            e["lat"] = l.lat;
            e["lon"] = l.lon;
        }
        j["locations"].push_back(e);
    }
    j["previews"] = json::array();
    for (const auto& p : m.previews)
        j["previews"].push_back({{"username", p.username},
                                 {"profile_pic_url", p.profile_pic_url},
                                 {"last_message", p.last_message},
                                 {"location_suburb", p.location_suburb},
                                 {"source", source_json(p.source)}});
    j["emails"] = json::array();
    for (const auto& e : m.emails) j["emails"].push_back({{"app", app_name(e.app)}, {"address", e.address}});
    j["volley"] = json::array();
    for (const auto& v : m.volley)
        j["volley"].push_back({{"match_id", v.event.match_id}, {"matched", v.event.matched}, {"occurred_at", format_instant(v.event.occurred_at)}});
    j["files"] = m.files;
    j["injected_faults"] = m.injected_faults;
    j["transaction_log"] = {{"transactions", m.log.transactions}, {"decoys", m.log.decoys}, {"malformed_lines", m.log.malformed_lines}};
    j["planted_leaks"] = json::array();
    for (const auto& p : m.log.planted)
        j["planted_leaks"].push_back({{"transaction", p.transaction_index}, {"category", leak_category_name(p.category)}, {"app", app_name(p.app)}});
    return j.dump(2) + "\n";
}

SweepFixture forge_unknown_app_database(const fs::path& file, std::uint64_t seed, bool numbers_only) {
    Rng rng(derive_seed(seed, numbers_only ? "sweep/numbers" : "sweep/messages"));
    fs::create_directories(file.parent_path());
    sql::Writer w(file);
    w.exec("BEGIN");
    SweepFixture fx;
    if (numbers_only) {
        w.exec("CREATE TABLE stats (a INTEGER, b REAL, sample_time INTEGER)");
        w.exec("CREATE TABLE counters (id INTEGER PRIMARY KEY, value INTEGER, created INTEGER)");
        for (int i = 0; i < 25; ++i) {
            std::vector<std::string_view> c1{"a", "b", "sample_time"};
            std::vector<sql::Writer::Value> v1{rng.range(0, 1000), static_cast<double>(rng.range(0, 10000)) / 7.0,
                                               std::int64_t{kBaseEpochSeconds + rng.range(0, 86400)}};
            w.insert("stats", c1, v1);
            std::vector<std::string_view> c2{"value", "created"};
            std::vector<sql::Writer::Value> v2{rng.range(0, 99), std::int64_t{(kBaseEpochSeconds + rng.range(0, 86400)) * 1000}};
            w.insert("counters", c2, v2);
            fx.numeric_rows += 2;
        }
    } else {
        w.exec("CREATE TABLE conversation_items (id INTEGER PRIMARY KEY, thread INTEGER, message_text TEXT, sent_time INTEGER, sender TEXT)");
        w.exec("CREATE TABLE notes (body TEXT, created INTEGER)");
        w.exec("CREATE TABLE settings (k TEXT, v TEXT)");
        for (int i = 0; i < 12; ++i) {
            const std::string body = sentence(rng);
            // mixed units: seconds for even rows, milliseconds for odd rows
            const std::int64_t t = kBaseEpochSeconds + rng.range(0, 86400 * 30);
            std::vector<std::string_view> cols{"thread", "message_text", "sent_time", "sender"};
            std::vector<sql::Writer::Value> vals{rng.range(1, 4), body, i % 2 ? t * 1000 : t, rng.digits(6)};
            w.insert("conversation_items", cols, vals);
            fx.message_ids.push_back("conversation_items#rowid=" + std::to_string(i + 1));
            fx.bodies.push_back(body);
        }
        for (int i = 0; i < 5; ++i) {
            const std::string body = sentence(rng);
            std::vector<std::string_view> cols{"body", "created"};
            std::vector<sql::Writer::Value> vals{body, std::int64_t{kBaseEpochSeconds + rng.range(0, 86400)}};
            w.insert("notes", cols, vals);
            fx.message_ids.push_back("notes#rowid=" + std::to_string(i + 1));
            fx.bodies.push_back(body);
        }
        for (std::string_view k : {"theme", "lang"}) {
            std::vector<std::string_view> cols{"k", "v"};
            std::vector<sql::Writer::Value> vals{std::string(k), std::string(rng.pick<std::string_view>(kWords))};
            w.insert("settings", cols, vals);
        }
    }
    w.exec("COMMIT");
    return fx;
}

}  // namespace gsnx
