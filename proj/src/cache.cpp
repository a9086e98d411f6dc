#include "cache.hpp"

#include <json.hpp>

#include <cstring>

#include "digest.hpp"
#include "errors.hpp"
#include "text_util.hpp"

namespace gsnx {

namespace {

std::string_view as_chars(std::span<const std::uint8_t> b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

/// End (one past) of the balanced JSON object starting at `begin`, honoring strings.
std::optional<std::size_t> object_end(std::string_view s, std::size_t begin) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = begin; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (c == '\\') ++i;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{' || c == '[') ++depth;
        else if (c == '}' || c == ']') {
            if (--depth == 0) return i + 1;
        }
    }
    return std::nullopt;
}

constexpr std::string_view kMatchIdKeys[] = {"match_id", "matchId", "matchID", "match"};
constexpr std::string_view kMatchedKeys[] = {"matched", "is_match", "isMatch"};
constexpr std::string_view kDateKeys[] = {"date", "match_date", "created_date", "created", "timestamp"};

std::optional<Instant> json_instant(const nlohmann::json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) {
        try {
            return normalize_epoch(v.get<std::int64_t>()).instant;
        } catch (const Error&) {
            return std::nullopt;
        }
    }
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (auto t = parse_instant(s)) return t;
        if (auto n = text::parse_int(s)) {
            if (*n >= 0) return normalize_epoch(*n).instant;
        }
    }
    return std::nullopt;
}

void collect_events(const nlohmann::json& j, VolleyParse& out) {
    if (j.is_array()) {
        for (const auto& el : j) collect_events(el, out);
        return;
    }
    if (!j.is_object()) return;
    std::optional<std::string> id;
    for (auto key : kMatchIdKeys) {
        auto it = j.find(std::string(key));
        if (it != j.end() && it->is_string() && !it->get<std::string>().empty()) {
            id = it->get<std::string>();
            break;
        }
    }
    if (id) {
        VolleyMatchEvent ev;
        ev.match_id = *id;
        for (auto key : kMatchedKeys) {
            auto it = j.find(std::string(key));
            if (it != j.end() && it->is_boolean()) {
                ev.matched = it->get<bool>();
                break;
            }
        }
        std::optional<Instant> at;
        for (auto key : kDateKeys) {
            auto it = j.find(std::string(key));
            if (it != j.end() && (at = json_instant(*it))) break;
        }
        if (at) {
            ev.occurred_at = *at;
            out.events.push_back(std::move(ev));
        } else {
            out.warnings.push_back("match " + *id + " has no parseable date");
        }
    }
    for (const auto& [key, v] : j.items()) {
        if (v.is_structured()) collect_events(v, out);
    }
}

/// Length of a well-formed UTF-8 printable sequence at `i`, 0 if none.
std::size_t printable_at(std::span<const std::uint8_t> b, std::size_t i) {
    const std::uint8_t c = b[i];
    if (c >= 0x20 && c < 0x7F) return 1;
    std::size_t n = 0;
    if ((c & 0xE0) == 0xC0 && c >= 0xC2) n = 2;
    else if ((c & 0xF0) == 0xE0) n = 3;
    else if ((c & 0xF8) == 0xF0 && c <= 0xF4) n = 4;
    else return 0;
    if (i + n > b.size()) return 0;
    for (std::size_t k = 1; k < n; ++k) {
        if ((b[i + k] & 0xC0) != 0x80) return 0;
    }
    return n;
}

}  // namespace

ImageFormat sniff_image_format(std::span<const std::uint8_t> b) {
    auto at = [&](std::size_t off, std::string_view m) {
        return b.size() >= off + m.size() && std::memcmp(b.data() + off, m.data(), m.size()) == 0;
    };
    if (at(0, "\xFF\xD8\xFF")) return ImageFormat::Jpeg;
    if (at(0, "\x89PNG\r\n\x1A\n")) return ImageFormat::Png;
    if (at(0, "RIFF") && at(8, "WEBP")) return ImageFormat::WebP;
    return ImageFormat::Unknown;
}

PicassoEntry parse_picasso_pair(std::span<const std::uint8_t> meta_bytes, std::span<const std::uint8_t> image_bytes,
                                const ArtifactSource& meta_source, const ArtifactSource& image_source) {
    std::string_view meta = as_chars(meta_bytes);
    std::optional<std::string> url;
    while (!meta.empty()) {
        const auto nl = meta.find('\n');
        std::string_view line = meta.substr(0, nl);
        meta = nl == std::string_view::npos ? std::string_view{} : meta.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.rfind("GET ", 0) != 0) continue;
        std::string_view target = line.substr(4);
        const auto sp = target.find(' ');
        target = target.substr(0, sp);
        if (!target.empty()) {
            url = std::string(target);
            break;
        }
    }
    if (!url) throw CacheParseError("no GET request line in " + (meta_source.file_path.empty() ? "meta" : meta_source.file_path));

    PicassoEntry e;
    e.meta_path = meta_source.file_path;
    e.image_path = image_source.file_path;
    e.request_url = *url;
    e.image.origin_url = *url;
    e.image.content_hash = sha256_hex(image_bytes);
    e.image.format = sniff_image_format(image_bytes);
    e.image.bytes_ref = image_source;
    e.image.meta_ref = meta_source;
    return e;
}

VolleyParse parse_volley_match_cache(std::span<const std::uint8_t> bytes) {
    VolleyParse out;
    const std::string_view s = as_chars(bytes);
    std::size_t pos = 0;
    bool any_json = false;
    while ((pos = s.find('{', pos)) != std::string_view::npos) {
        const auto end = object_end(s, pos);
        if (!end) break;
        auto j = nlohmann::json::parse(s.substr(pos, *end - pos), nullptr, false);
        if (j.is_discarded()) {
            ++pos;
            continue;
        }
        any_json = true;
        collect_events(j, out);
        pos = *end;
    }
    if (!any_json && !bytes.empty()) out.warnings.push_back("no JSON object found");
    return out;
}

std::vector<PrintableRun> printable_runs(std::span<const std::uint8_t> bytes, std::size_t min_run) {
    std::vector<PrintableRun> out;
    std::size_t i = 0;
    while (i < bytes.size()) {
        std::size_t n = printable_at(bytes, i);
        if (n == 0) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::size_t code_points = 0;
        while (i < bytes.size() && (n = printable_at(bytes, i)) != 0) {
            i += n;
            ++code_points;
        }
        if (code_points >= min_run) out.push_back({start, std::string(as_chars(bytes.subspan(start, i - start)))});
    }
    return out;
}

std::vector<CarvedMessagePreview> carve_string_records(std::span<const std::uint8_t> bytes, const RecordGrammar& grammar,
                                                       const ArtifactSource& source) {
    const auto runs = printable_runs(bytes, grammar.min_run);
    std::vector<bool> used(runs.size(), false);
    auto gap = [&](std::size_t a, std::size_t b) {  // bytes between run a's end and run b's start, a < b
        return runs[b].offset - (runs[a].offset + runs[a].text.size());
    };
    auto is_url_run = [&](std::size_t i) { return text::is_url(runs[i].text); };

    std::vector<CarvedMessagePreview> out;
    for (std::size_t u = 0; u < runs.size(); ++u) {
        if (!is_url_run(u) || used[u]) continue;
        std::vector<std::size_t> before, after;
        for (std::size_t k = u; k > 0 && before.size() < grammar.fields_before_url;) {
            const std::size_t prev = k - 1;
            if (used[prev] || is_url_run(prev) || gap(prev, k) > grammar.window) break;
            before.insert(before.begin(), prev);
            k = prev;
        }
        for (std::size_t k = u; k + 1 < runs.size() && after.size() < grammar.fields_after_url;) {
            const std::size_t next = k + 1;
            if (is_url_run(next) || gap(k, next) > grammar.window) break;
            after.push_back(next);
            k = next;
        }
        if (before.empty() && after.empty()) continue;

        CarvedMessagePreview p;
        p.profile_pic_url = runs[u].text;
        if (!before.empty()) p.username = runs[before.back()].text;
        if (!after.empty()) p.last_message = runs[after[0]].text;
        if (after.size() > 1) p.location_suburb = runs[after[1]].text;
        const std::size_t first = before.empty() ? u : before.front();
        const std::size_t last = after.empty() ? u : after.back();
        p.source = source;
        p.source.byte_range = ByteRange{runs[first].offset, runs[last].offset + runs[last].text.size() - runs[first].offset};
        for (auto i : before) used[i] = true;
        for (auto i : after) used[i] = true;
        used[u] = true;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace gsnx
