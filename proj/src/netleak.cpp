#include "netleak.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>

#include "digest.hpp"
#include "errors.hpp"
#include "text_util.hpp"

namespace gsnx {

namespace {

using nlohmann::json;

std::optional<std::map<std::string, std::string>> header_map(const json& j) {
    std::map<std::string, std::string> out;
    if (j.is_null()) return out;
    if (!j.is_object()) return std::nullopt;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_string()) return std::nullopt;
        out[k] = v.get<std::string>();
    }
    return out;
}

std::optional<std::string> body_field(const json& line, const char* key) {
    auto it = line.find(key);
    if (it == line.end() || it->is_null()) return std::string();
    if (!it->is_string()) return std::nullopt;
    std::vector<std::uint8_t> bytes;
    if (!base64_decode(it->get<std::string>(), bytes)) return std::nullopt;
    return std::string(bytes.begin(), bytes.end());
}

/// Empty string on success, else the reason the line was rejected.
std::string parse_line(const std::string& text, HttpTransaction& t) {
    auto j = json::parse(text, nullptr, false);
    if (j.is_discarded()) return "not JSON";
    if (!j.is_object()) return "not a JSON object";
    auto ts = j.find("ts");
    if (ts == j.end() || !ts->is_number()) return "missing numeric ts";
    auto method = j.find("method");
    if (method == j.end() || !method->is_string()) return "missing method";
    auto url = j.find("url");
    if (url == j.end() || !url->is_string()) return "missing url";
    const auto u = url->get<std::string>();
    if (!(u.rfind("http://", 0) == 0 || u.rfind("https://", 0) == 0) || u.size() <= 8) return "malformed url";
    auto tls = j.find("tls");
    if (tls == j.end() || !tls->is_boolean()) return "missing tls";

    t.ts = ts->get<double>();
    if (!std::isfinite(t.ts) || t.ts < 0) return "ts out of range";
    t.at = Instant{std::chrono::milliseconds{std::llround(t.ts * 1000.0)}};
    t.method = method->get<std::string>();
    t.url = u;
    t.tls = tls->get<bool>();

    auto rq = header_map(j.value("req_headers", json()));
    auto rs = header_map(j.value("resp_headers", json()));
    if (!rq || !rs) return "headers must be an object of strings";
    t.request_headers = std::move(*rq);
    t.response_headers = std::move(*rs);

    auto req_body = body_field(j, "req_body_b64");
    auto resp_body = body_field(j, "resp_body_b64");
    if (!req_body || !resp_body) return "invalid base64 body";
    t.request_body = std::move(*req_body);
    t.response_body = std::move(*resp_body);

    if (auto st = j.find("status"); st != j.end() && !st->is_null()) {
        if (!st->is_number_integer()) return "status must be an integer";
        t.response_status = st->get<int>();
    }
    if (auto app = j.find("app"); app != j.end() && !app->is_null()) {
        if (!app->is_string()) return "app must be a string";
        const AppId id = parse_app_name(app->get<std::string>());
        if (id != AppId::Unknown) t.app_hint = id;
    }
    return {};
}

// --- key/value views over a transaction part ---------------------------------

struct Part {
    TransactionPart id;
    std::string_view text;
    std::size_t base = 0;  // offset of `text` inside the part (URL query)
};

struct KeyValue {
    std::string key;  // lower-cased
    std::string value;
    std::size_t offset = 0;  // of the key within the part
    std::size_t length = 0;  // key through value
};

bool is_binary(std::string_view s) {
    const auto n = std::min<std::size_t>(s.size(), 512);
    return std::memchr(s.data(), '\0', n) != nullptr;
}

bool has_image_magic(std::string_view s) {
    const std::span<const std::uint8_t> b(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
    if (b.size() >= 3 && b[0] == 0xFF && b[1] == 0xD8 && b[2] == 0xFF) return true;
    if (s.rfind("\x89PNG\r\n\x1A\n", 0) == 0) return true;
    if (s.size() >= 12 && s.rfind("RIFF", 0) == 0 && s.substr(8, 4) == "WEBP") return true;
    if (s.rfind("GIF87a", 0) == 0 || s.rfind("GIF89a", 0) == 0) return true;
    return false;
}

void json_pairs(const json& j, std::string_view text, std::size_t& cursor, std::vector<KeyValue>& out) {
    if (j.is_array()) {
        for (const auto& el : j) json_pairs(el, text, cursor, out);
        return;
    }
    if (!j.is_object()) return;
    for (const auto& [k, v] : j.items()) {
        const std::string quoted = "\"" + k + "\"";
        auto pos = text.find(quoted, cursor);
        if (pos == std::string_view::npos) pos = text.find(quoted);
        const std::size_t off = pos == std::string_view::npos ? 0 : pos;
        if (v.is_structured()) {
            json_pairs(v, text, cursor, out);
            continue;
        }
        std::string value = v.is_string() ? v.get<std::string>() : v.dump();
        std::size_t len = quoted.size();
        if (pos != std::string_view::npos) {
            const auto vend = text.find_first_of(",}]", pos + quoted.size() + 1);
            len = (vend == std::string_view::npos ? text.size() : vend) - pos;
            cursor = pos + quoted.size();
            if (v.is_number()) {
                // keep the literal as written; dump() drops trailing zeros
                const auto colon = text.find(':', cursor);
                if (colon != std::string_view::npos && colon < pos + len)
                    value = text::trim(text.substr(colon + 1, pos + len - colon - 1));
            }
        }
        out.push_back({text::lower(k), std::move(value), off, len});
    }
}

void xml_pairs(std::string_view s, std::vector<KeyValue>& out) {
    std::size_t i = 0;
    while ((i = s.find('<', i)) != std::string_view::npos) {
        std::size_t j = i + 1;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_' || s[j] == '-' || s[j] == ':'))
            ++j;
        if (j == i + 1 || j >= s.size() || s[j] != '>') {
            ++i;
            continue;
        }
        const std::string_view name = s.substr(i + 1, j - i - 1);
        const auto vend = s.find('<', j + 1);
        if (vend == std::string_view::npos) break;
        const std::string close = "</" + std::string(name) + ">";
        if (s.compare(vend, close.size(), close) == 0) {
            out.push_back({text::lower(name), std::string(s.substr(j + 1, vend - j - 1)), i, vend + close.size() - i});
        }
        i = j;
    }
}

void form_pairs(std::string_view s, std::size_t base, std::vector<KeyValue>& out) {
    std::size_t i = 0;
    while (i <= s.size()) {
        auto end = s.find_first_of("&;", i);
        if (end == std::string_view::npos) end = s.size();
        const std::string_view item = s.substr(i, end - i);
        const auto eq = item.find('=');
        if (eq != std::string_view::npos && eq > 0) {
            const auto key = item.substr(0, eq);
            const bool ok_key = std::all_of(key.begin(), key.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-' || c == '[' ||
                       c == ']';
            });
            if (ok_key) out.push_back({text::lower(key), std::string(item.substr(eq + 1)), base + i, item.size()});
        }
        i = end + 1;
    }
}

std::vector<KeyValue> key_values(const Part& p) {
    std::vector<KeyValue> out;
    if (p.text.empty() || is_binary(p.text)) return out;
    if (p.id == TransactionPart::Url) {
        form_pairs(p.text, p.base, out);
        return out;
    }
    const auto first = p.text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return out;
    if (p.text[first] == '{' || p.text[first] == '[') {
        auto j = json::parse(p.text, nullptr, false);
        if (!j.is_discarded()) {
            std::size_t cursor = 0;
            json_pairs(j, p.text, cursor, out);
            return out;
        }
    }
    if (p.text[first] == '<') {
        xml_pairs(p.text, out);
        return out;
    }
    form_pairs(p.text, 0, out);
    return out;
}

// --- decimal-degree tokens ---------------------------------------------------

struct Decimal {
    double value = 0.0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// [-+]?\d{1,3}\.\d{4,} not embedded in a larger number or identifier.
std::vector<Decimal> find_decimals(std::string_view s) {
    std::vector<Decimal> out;
    auto digit = [&](std::size_t i) { return i < s.size() && s[i] >= '0' && s[i] <= '9'; };
    for (std::size_t i = 0; i < s.size(); ++i) {
        std::size_t j = i;
        if (s[j] == '-' || s[j] == '+') ++j;
        if (!digit(j)) continue;
        if (i > 0) {
            const unsigned char prev = static_cast<unsigned char>(s[i - 1]);
            if (std::isalnum(prev) || prev == '.') continue;
            if (j == i && (prev == '-' || prev == '+')) continue;
        }
        std::size_t int_digits = 0;
        while (digit(j)) ++j, ++int_digits;
        if (int_digits > 3 || j >= s.size() || s[j] != '.') {
            i = j > i ? j - 1 : i;
            continue;
        }
        ++j;
        std::size_t frac = 0;
        while (digit(j)) ++j, ++frac;
        const bool bad_tail = j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) && s[j] != 'e' && s[j] != 'E');
        const bool dotted_tail = j < s.size() && s[j] == '.' && digit(j + 1);  // 1.2345.6 is a version, not a coordinate
        if (frac >= kMinCoordinateFractionDigits && !bad_tail && !dotted_tail) {
            if (auto v = text::parse_double(s.substr(i, j - i))) out.push_back({*v, i, j - i});
        }
        i = j - 1;
    }
    return out;
}

bool valid_lat(double v) { return v >= -90.0 && v <= 90.0; }
bool valid_lon(double v) { return v >= -180.0 && v <= 180.0; }

bool is_lat_key(std::string_view k) {
    return k == "lat" || k == "latitude" || k.ends_with("_lat") || k.ends_with("latitude") || k.ends_with(".lat");
}
bool is_lon_key(std::string_view k) {
    return k == "lon" || k == "lng" || k == "long" || k == "longitude" || k.ends_with("_lon") || k.ends_with("_lng") ||
           k.ends_with("longitude") || k.ends_with(".lon") || k.ends_with(".lng");
}

std::optional<double> full_decimal(std::string_view v) {
    const auto ds = find_decimals(v);
    if (ds.size() != 1 || ds[0].offset != 0 || ds[0].length != v.size()) return std::nullopt;
    return ds[0].value;
}

std::optional<EvidenceSpan> keyed_pair(const std::vector<KeyValue>& kvs) {
    for (const auto& a : kvs) {
        if (!is_lat_key(a.key)) continue;
        const auto lat = full_decimal(a.value);
        if (!lat || !valid_lat(*lat)) continue;
        for (const auto& b : kvs) {
            if (!is_lon_key(b.key)) continue;
            const auto lon = full_decimal(b.value);
            if (!lon || !valid_lon(*lon)) continue;
            const auto lo = std::min(a.offset, b.offset);
            const auto hi = std::max(a.offset + a.length, b.offset + b.length);
            return EvidenceSpan{0, TransactionPart::Url, lo, hi - lo};
        }
    }
    return std::nullopt;
}

constexpr std::string_view kChatPathFragments[] = {"/chat", "/message", "/conversation", "/im/"};
constexpr std::string_view kMessageKeySuffixExclusions[] = {"id", "ids", "count", "type", "time", "date", "status", "at"};
constexpr std::string_view kCoarseKeys[] = {"distance", "dist", "distance_m", "country", "state",
                                           "suburb",   "city", "region"};
constexpr std::string_view kImageExtensions[] = {".jpg", ".jpeg", ".png", ".webp", ".gif"};

bool is_message_key(std::string_view k) {
    if (k == "text" || k == "body" || k == "msg" || k == "content") return true;
    if (k.find("message") == std::string_view::npos) return false;
    for (auto suffix : kMessageKeySuffixExclusions) {
        if (k.ends_with(suffix)) return false;
    }
    return true;
}

bool has_letter(std::string_view v) {
    return std::any_of(v.begin(), v.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); });
}

std::string_view url_path(std::string_view url, std::size_t& path_offset) {
    const auto scheme = url.find("://");
    const auto slash = url.find('/', scheme == std::string_view::npos ? 0 : scheme + 3);
    if (slash == std::string_view::npos) {
        path_offset = url.size();
        return {};
    }
    const auto q = url.find_first_of("?#", slash);
    path_offset = slash;
    return url.substr(slash, (q == std::string_view::npos ? url.size() : q) - slash);
}

bool is_image_url(std::string_view url) {
    std::size_t off = 0;
    const auto path = text::lower(url_path(url, off));
    for (auto ext : kImageExtensions) {
        if (std::string_view(path).ends_with(ext)) return true;
    }
    return false;
}

std::string serialize_headers(const std::map<std::string, std::string>& h) {
    std::string out;
    for (const auto& [k, v] : h) out += k + ": " + v + "\r\n";
    return out;
}

struct TxnView {
    const HttpTransaction& t;
    std::string req_headers;
    std::string resp_headers;
    Part url, query, req_body, resp_body, req_hdr, resp_hdr;

    explicit TxnView(const HttpTransaction& txn)
        : t(txn), req_headers(serialize_headers(txn.request_headers)), resp_headers(serialize_headers(txn.response_headers)) {
        url = {TransactionPart::Url, t.url, 0};
        const auto q = t.url.find('?');
        if (q != std::string::npos) {
            const auto hash = t.url.find('#', q);
            query = {TransactionPart::Url, std::string_view(t.url).substr(q + 1, (hash == std::string::npos ? t.url.size() : hash) - q - 1),
                     q + 1};
        } else {
            query = {TransactionPart::Url, {}, t.url.size()};
        }
        req_body = {TransactionPart::RequestBody, t.request_body, 0};
        resp_body = {TransactionPart::ResponseBody, t.response_body, 0};
        req_hdr = {TransactionPart::RequestHeaders, req_headers, 0};
        resp_hdr = {TransactionPart::ResponseHeaders, resp_headers, 0};
    }
};

class Detector {
public:
    Detector(const HttpTransaction& t, std::span<const AuthToken> tokens) : v_(t), tokens_(tokens) {}

    std::vector<LeakFinding> run() {
        const auto& t = v_.t;
        const std::vector<const Part*> kv_parts = {&v_.query, &v_.req_body, &v_.resp_body};
        std::vector<std::pair<const Part*, std::vector<KeyValue>>> kvs;
        for (const Part* p : kv_parts) kvs.emplace_back(p, key_values(*p));

        if (!t.tls) message_rule(kvs);
        if (!t.tls) image_rule();
        if (!t.tls) image_url_rule(kvs);
        location_rule(kvs);
        coarse_rule(kvs);
        if (!t.tls) email_rule();
        token_rule();
        filename_rule();

        std::sort(out_.begin(), out_.end(),
                  [](const LeakFinding& a, const LeakFinding& b) { return a.category < b.category; });
        return std::move(out_);
    }

private:
    void emit(LeakCategory c, Severity s, const Part& p, std::size_t offset, std::size_t length, std::string desc,
              AppId app_override = AppId::Unknown) {
        if (seen_.count(c)) return;
        seen_.insert(c);
        LeakFinding f;
        f.category = c;
        f.severity = s;
        f.app = v_.t.app_hint.value_or(app_override);
        f.evidence = {v_.t.index, p.id, offset, length};
        f.description = std::move(desc);
        out_.push_back(std::move(f));
    }

    void message_rule(const std::vector<std::pair<const Part*, std::vector<KeyValue>>>& kvs) {
        for (const auto& [p, list] : kvs) {
            if (p->id == TransactionPart::Url) continue;
            for (const auto& kv : list) {
                if (is_message_key(kv.key) && has_letter(kv.value) && !text::is_url(kv.value)) {
                    emit(LeakCategory::PlaintextMessage, Severity::High, *p, kv.offset, kv.length,
                         "plaintext message field '" + kv.key + "'");
                    return;
                }
            }
        }
        if (v_.t.request_body.empty() && v_.t.response_body.empty()) return;
        std::size_t path_off = 0;
        const auto path = text::lower(url_path(v_.t.url, path_off));
        for (auto frag : kChatPathFragments) {
            const auto pos = path.find(frag);
            if (pos != std::string::npos) {
                emit(LeakCategory::PlaintextMessage, Severity::High, v_.url, path_off + pos, frag.size(),
                     "plaintext payload on chat endpoint '" + std::string(frag) + "'");
                return;
            }
        }
    }

    void image_rule() {
        if (has_image_magic(v_.t.response_body)) {
            emit(LeakCategory::PlaintextImage, Severity::High, v_.resp_body, 0, v_.t.response_body.size(),
                 "image bytes in plaintext response");
        } else if (has_image_magic(v_.t.request_body)) {
            emit(LeakCategory::PlaintextImage, Severity::High, v_.req_body, 0, v_.t.request_body.size(),
                 "image bytes in plaintext request");
        }
    }

    void image_url_rule(const std::vector<std::pair<const Part*, std::vector<KeyValue>>>& kvs) {
        for (const auto& [p, list] : kvs) {
            if (p->id == TransactionPart::Url || is_binary(p->text)) continue;
            for (const auto& m : text::find_urls(p->text)) {
                if (is_image_url(m.value)) {
                    emit(LeakCategory::PlaintextImageUrl, Severity::Medium, *p, m.offset, m.length,
                         "image URL in plaintext body");
                    return;
                }
            }
        }
    }

    void location_rule(const std::vector<std::pair<const Part*, std::vector<KeyValue>>>& kvs) {
        const Severity sev = v_.t.tls ? Severity::Medium : Severity::High;
        for (const auto& [p, list] : kvs) {
            if (auto span = keyed_pair(list)) {
                emit(LeakCategory::ExactLocation, sev, *p, span->offset, span->length, "keyed latitude/longitude");
                return;
            }
            if (is_binary(p->text)) continue;
            const auto pairs = find_coordinate_pairs(p->text);
            if (!pairs.empty()) {
                emit(LeakCategory::ExactLocation, sev, *p, p->base + pairs[0].offset, pairs[0].length,
                     "decimal-degree coordinate pair");
                return;
            }
        }
    }

    void coarse_rule(const std::vector<std::pair<const Part*, std::vector<KeyValue>>>& kvs) {
        const Severity sev = v_.t.tls ? Severity::Info : Severity::Medium;
        for (const auto& [p, list] : kvs) {
            for (const auto& kv : list) {
                const bool coarse = std::find(std::begin(kCoarseKeys), std::end(kCoarseKeys), kv.key) != std::end(kCoarseKeys);
                if (coarse && !text::trim(kv.value).empty()) {
                    emit(LeakCategory::CoarseLocation, sev, *p, kv.offset, kv.length, "coarse location field '" + kv.key + "'");
                    return;
                }
            }
        }
    }

    void email_rule() {
        for (const Part* p : {&v_.url, &v_.req_hdr, &v_.req_body, &v_.resp_body}) {
            if (is_binary(p->text)) continue;
            const auto found = text::find_emails(p->text);
            if (!found.empty()) {
                emit(LeakCategory::EmailAddress, Severity::Medium, *p, found[0].offset, found[0].length,
                     "email address in plaintext");
                return;
            }
        }
    }

    void token_rule() {
        const Severity sev = v_.t.tls ? Severity::Info : Severity::Medium;
        for (const auto& tok : tokens_) {
            if (tok.token.size() < kMinTokenLength) continue;
            for (const Part* p : {&v_.url, &v_.req_hdr, &v_.req_body, &v_.resp_hdr, &v_.resp_body}) {
                const auto pos = p->text.find(tok.token);
                if (pos != std::string_view::npos) {
                    emit(LeakCategory::TokenInTransit, sev, *p, pos, tok.token.size(),
                         std::string(provider_name(tok.provider)) + " token recovered from " + tok.source.file_path,
                         tok.app);
                    return;
                }
            }
        }
    }

    void filename_rule() {
        std::size_t path_off = 0;
        const auto path = url_path(v_.t.url, path_off);
        const auto slash = path.rfind('/');
        const auto segment = path.substr(slash + 1);
        const auto pairs = find_coordinate_pairs(segment);
        if (!pairs.empty()) {
            const Severity sev = Severity::High;
            emit(LeakCategory::LocationInFilename, sev, v_.url, path_off + slash + 1 + pairs[0].offset, pairs[0].length,
                 "coordinate pair in URL filename");
        }
    }

    TxnView v_;
    std::span<const AuthToken> tokens_;
    std::set<LeakCategory> seen_;
    std::vector<LeakFinding> out_;
};

}  // namespace

IngestResult ingest_transactions(std::istream& in) {
    if (!in) throw IngestError("transaction stream is not readable");
    IngestResult out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        HttpTransaction t;
        const auto why = parse_line(line, t);
        if (!why.empty()) {
            out.warnings.push_back("line " + std::to_string(line_no) + ": " + why);
            continue;
        }
        t.line = line_no;
        t.index = out.transactions.size();
        out.transactions.push_back(std::move(t));
    }
    if (in.bad()) throw IngestError("read error after line " + std::to_string(line_no));
    return out;
}

IngestResult ingest_transactions_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IngestError("cannot open transaction log " + path);
    return ingest_transactions(f);
}

std::string transaction_to_ndjson(const HttpTransaction& t) {
    auto bytes = [](const std::string& s) {
        return base64_encode(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    };
    json j;
    j["ts"] = t.ts;
    j["method"] = t.method;
    j["url"] = t.url;
    j["tls"] = t.tls;
    j["req_headers"] = json::object();
    for (const auto& [k, v] : t.request_headers) j["req_headers"][k] = v;
    j["req_body_b64"] = bytes(t.request_body);
    j["status"] = t.response_status;
    j["resp_headers"] = json::object();
    for (const auto& [k, v] : t.response_headers) j["resp_headers"][k] = v;
    j["resp_body_b64"] = bytes(t.response_body);
    if (t.app_hint) j["app"] = std::string(app_name(*t.app_hint));
    return j.dump();
}

std::string_view leak_category_name(LeakCategory c) {
    switch (c) {
        case LeakCategory::PlaintextMessage: return "PlaintextMessage";
        case LeakCategory::PlaintextImage: return "PlaintextImage";
        case LeakCategory::PlaintextImageUrl: return "PlaintextImageUrl";
        case LeakCategory::ExactLocation: return "ExactLocation";
        case LeakCategory::CoarseLocation: return "CoarseLocation";
        case LeakCategory::EmailAddress: return "EmailAddress";
        case LeakCategory::TokenInTransit: return "TokenInTransit";
        case LeakCategory::LocationInFilename: return "LocationInFilename";
    }
    return "PlaintextMessage";
}

std::optional<LeakCategory> parse_leak_category(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(LeakCategory::LocationInFilename); ++i) {
        const auto c = static_cast<LeakCategory>(i);
        if (leak_category_name(c) == name) return c;
    }
    return std::nullopt;
}

std::string_view severity_name(Severity s) {
    switch (s) {
        case Severity::Info: return "info";
        case Severity::Medium: return "medium";
        case Severity::High: return "high";
    }
    return "info";
}

std::string_view transaction_part_name(TransactionPart p) {
    switch (p) {
        case TransactionPart::Url: return "url";
        case TransactionPart::RequestHeaders: return "request_headers";
        case TransactionPart::RequestBody: return "request_body";
        case TransactionPart::ResponseHeaders: return "response_headers";
        case TransactionPart::ResponseBody: return "response_body";
    }
    return "url";
}

std::vector<CoordinatePair> find_coordinate_pairs(std::string_view s) {
    std::vector<CoordinatePair> out;
    const auto ds = find_decimals(s);
    for (std::size_t i = 0; i + 1 < ds.size(); ++i) {
        const auto& a = ds[i];
        const auto& b = ds[i + 1];
        const std::size_t gap = b.offset - (a.offset + a.length);
        if (gap > kCoordinatePairWindow) continue;
        if (!valid_lat(a.value) || !valid_lon(b.value)) continue;
        out.push_back({a.value, b.value, a.offset, b.offset + b.length - a.offset});
        ++i;
    }
    return out;
}

std::vector<LeakFinding> detect_leaks(std::span<const HttpTransaction> transactions,
                                      std::span<const AuthToken> known_tokens) {
    std::vector<LeakFinding> out;
    for (const auto& t : transactions) {
        auto f = Detector(t, known_tokens).run();
        out.insert(out.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
    }
    return out;
}

// --- matrix ------------------------------------------------------------------

std::string_view matrix_column_name(MatrixColumn c) {
    switch (c) {
        case MatrixColumn::Messages: return "Messages";
        case MatrixColumn::Images: return "Images";
        case MatrixColumn::Location: return "Location";
        case MatrixColumn::Email: return "Email Address";
        case MatrixColumn::Auth: return "Authentication Method";
    }
    return "Messages";
}

namespace {

struct ClassInfo {
    std::string_view id;
    std::string_view phrase;
};

// Strongest first.
constexpr ClassInfo kMessageClasses[] = {
    {"network_plaintext", "unencrypted over network"},
    {"database", "unencrypted in database"},
    {"cache_preview", "only last received message (cache preview)"},
};
constexpr ClassInfo kImageClasses[] = {
    {"network_plaintext", "image bytes unencrypted over network"},
    {"network_urls", "image links over network"},
    {"cached_files", "cached image files"},
    {"urls_on_device", "image URLs stored on device"},
};
constexpr ClassInfo kLocationClasses[] = {
    {"filename", "exact location sent in image filename"},
    {"network_exact", "exact location over network"},
    {"device_exact", "exact location stored on device"},
    {"network_coarse", "country/state/distance over network"},
    {"device_coarse", "country/state/distance stored on device"},
    {"suburb_level", "location at suburb level"},
};
constexpr ClassInfo kEmailClasses[] = {
    {"network_plaintext", "email unencrypted over network"},
    {"on_device", "email stored on device"},
};

std::span<const ClassInfo> classes_for(MatrixColumn c) {
    switch (c) {
        case MatrixColumn::Messages: return kMessageClasses;
        case MatrixColumn::Images: return kImageClasses;
        case MatrixColumn::Location: return kLocationClasses;
        case MatrixColumn::Email: return kEmailClasses;
        case MatrixColumn::Auth: return {};
    }
    return {};
}

constexpr std::size_t kEvidencePerClass = 3;

std::string source_ref(const ArtifactSource& s) {
    std::string out = s.file_path;
    if (!s.detail.empty()) out += " (" + s.detail + ")";
    if (s.byte_range) out += " [" + std::to_string(s.byte_range->offset) + "+" + std::to_string(s.byte_range->length) + "]";
    return out;
}

std::string finding_ref(const LeakFinding& f) {
    return "transaction #" + std::to_string(f.evidence.transaction_index) + " " +
           std::string(transaction_part_name(f.evidence.part)) + "[" + std::to_string(f.evidence.offset) + "+" +
           std::to_string(f.evidence.length) + "]";
}

class CellBuilder {
public:
    void add(std::string_view cls, std::string ref) {
        auto& refs = hits_[std::string(cls)];
        ++counts_[std::string(cls)];
        if (refs.size() < kEvidencePerClass) refs.push_back(std::move(ref));
    }

    MatrixCell finish(MatrixColumn col) const {
        MatrixCell cell;
        auto order = classes_for(col);
        std::vector<std::string> ids;
        if (order.empty()) {
            for (const auto& [k, _] : hits_) ids.push_back(k);
        } else {
            for (const auto& ci : order) {
                if (hits_.count(std::string(ci.id))) ids.push_back(std::string(ci.id));
            }
        }
        if (ids.empty()) return cell;
        cell.primary = col == MatrixColumn::Auth ? join(ids) : ids.front();
        for (const auto& id : ids) {
            cell.classes.push_back(id);
            const auto& refs = hits_.at(id);
            for (const auto& r : refs) cell.evidence.push_back(id + ": " + r);
            const auto n = counts_.at(id);
            if (n > refs.size()) cell.evidence.push_back(id + ": +" + std::to_string(n - refs.size()) + " more");
        }
        return cell;
    }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out;
        for (const auto& s : v) out += (out.empty() ? "" : " + ") + s;
        return out;
    }
    std::map<std::string, std::vector<std::string>> hits_;
    std::map<std::string, std::size_t> counts_;
};

}  // namespace

std::string describe_matrix_class(MatrixColumn col, std::string_view cls) {
    if (cls == kNoneObserved) return std::string(kNoneObserved);
    for (const auto& ci : classes_for(col)) {
        if (ci.id == cls) return std::string(ci.phrase);
    }
    return std::string(cls);
}

std::vector<MatrixRow> build_leak_matrix(std::span<const LeakFinding> findings, const EvidenceBundle& bundle,
                                         std::span<const AppId> apps) {
    std::vector<AppId> wanted(apps.begin(), apps.end());
    if (wanted.empty()) wanted.assign(kKnownApps.begin(), kKnownApps.end());

    std::vector<MatrixRow> rows;
    for (AppId app : wanted) {
        CellBuilder msg, img, loc, mail, auth;

        for (const auto& m : bundle.messages) {
            if (m.app == app && m.source.kind == FileKind::SqliteDb) msg.add("database", source_ref(m.source));
        }
        for (const auto& p : bundle.previews) {
            if (p.app != app) continue;
            if (!p.last_message.empty()) msg.add("cache_preview", source_ref(p.source));
        }

        for (const auto& i : bundle.images) {
            if (i.app == app) img.add("cached_files", source_ref(i.bytes_ref));
        }
        for (const auto& p : bundle.profiles) {
            if (p.app == app && p.picture_url) img.add("urls_on_device", source_ref(p.source));
        }
        for (const auto& m : bundle.media) {
            if (m.app != app) continue;
            const bool image_link = std::any_of(m.urls.begin(), m.urls.end(), [](const std::string& u) { return is_image_url(u); });
            if (image_link) img.add("urls_on_device", source_ref(m.source));
        }

        for (const auto& l : bundle.locations) {
            if (l.app != app) continue;
            switch (l.precision) {
                case Precision::Exact: loc.add("device_exact", source_ref(l.source)); break;
                case Precision::Region: loc.add("device_coarse", source_ref(l.source)); break;
                case Precision::Suburb: loc.add("suburb_level", source_ref(l.source)); break;
            }
        }

        for (const auto& e : bundle.emails) {
            if (e.app == app) mail.add("on_device", source_ref(e.source));
        }
        for (const auto& t : bundle.tokens) {
            if (t.app == app) auth.add(std::string(provider_name(t.provider)) + " Token", source_ref(t.source));
        }

        for (const auto& f : findings) {
            if (f.app != app) continue;
            const auto ref = finding_ref(f);
            switch (f.category) {
                case LeakCategory::PlaintextMessage: msg.add("network_plaintext", ref); break;
                case LeakCategory::PlaintextImage: img.add("network_plaintext", ref); break;
                case LeakCategory::PlaintextImageUrl: img.add("network_urls", ref); break;
                case LeakCategory::ExactLocation: loc.add("network_exact", ref); break;
                case LeakCategory::LocationInFilename: loc.add("filename", ref); break;
                case LeakCategory::CoarseLocation: loc.add("network_coarse", ref); break;
                case LeakCategory::EmailAddress: mail.add("network_plaintext", ref); break;
                case LeakCategory::TokenInTransit: break;  // the token itself is already counted from the device
            }
        }

        MatrixRow row;
        row.app = app;
        row.cells[MatrixColumn::Messages] = msg.finish(MatrixColumn::Messages);
        row.cells[MatrixColumn::Images] = img.finish(MatrixColumn::Images);
        row.cells[MatrixColumn::Location] = loc.finish(MatrixColumn::Location);
        row.cells[MatrixColumn::Email] = mail.finish(MatrixColumn::Email);
        row.cells[MatrixColumn::Auth] = auth.finish(MatrixColumn::Auth);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace gsnx
