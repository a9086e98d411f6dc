#include "prefs.hpp"

#include <expat.h>

#include <algorithm>
#include <memory>

#include "errors.hpp"
#include "text_util.hpp"

namespace gsnx {

namespace {

using Parser = std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)>;

std::optional<PrefsType> element_type(std::string_view name) {
    if (name == "string") return PrefsType::String;
    if (name == "int") return PrefsType::Int;
    if (name == "long") return PrefsType::Long;
    if (name == "boolean") return PrefsType::Boolean;
    if (name == "float") return PrefsType::Float;
    return std::nullopt;
}

struct ParseState {
    XML_Parser parser = nullptr;
    PrefsDocument* doc = nullptr;
    int depth = 0;
    bool saw_root = false;
    std::optional<std::string> error;
    std::uint64_t error_offset = 0;

    // The element currently being read at depth 2.
    std::optional<PrefsType> current_type;
    std::string current_name;
    std::string current_text;
    std::optional<std::string> current_value_attr;

    void fail(std::string msg) {
        if (error) return;
        error = std::move(msg);
        error_offset = static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser));
        XML_StopParser(parser, XML_FALSE);
    }
};

void add_entry(ParseState& st) {
    PrefsValue v;
    v.type = *st.current_type;
    if (v.type == PrefsType::String) {
        v.text = st.current_text;
        v.parsed = v.text;
    } else {
        if (!st.current_value_attr) {
            st.fail("element '" + st.current_name + "' lacks a value attribute");
            return;
        }
        v.text = *st.current_value_attr;
        switch (v.type) {
            case PrefsType::Int:
            case PrefsType::Long: {
                auto n = text::parse_int(v.text);
                if (!n) {
                    st.fail("non-integer value for '" + st.current_name + "'");
                    return;
                }
                v.parsed = *n;
                break;
            }
            case PrefsType::Boolean:
                if (v.text != "true" && v.text != "false") {
                    st.fail("non-boolean value for '" + st.current_name + "'");
                    return;
                }
                v.parsed = v.text == "true";
                break;
            case PrefsType::Float: {
                auto d = text::parse_double(v.text);
                if (!d) {
                    st.fail("non-numeric value for '" + st.current_name + "'");
                    return;
                }
                v.parsed = *d;
                break;
            }
            case PrefsType::String: break;
        }
    }
    auto [it, inserted] = st.doc->entries.emplace(st.current_name, std::move(v));
    if (!inserted) st.doc->warnings.push_back("duplicate prefs key '" + st.current_name + "' kept first value");
}

void XMLCALL on_start(void* ud, const XML_Char* name, const XML_Char** attrs) {
    auto& st = *static_cast<ParseState*>(ud);
    ++st.depth;
    const std::string_view el(name);
    if (st.depth == 1) {
        if (el != "map") st.fail("root element is <" + std::string(el) + ">, expected <map>");
        st.saw_root = true;
        return;
    }
    if (st.depth != 2) return;
    st.current_type = element_type(el);
    st.current_name.clear();
    st.current_text.clear();
    st.current_value_attr.reset();
    bool has_name = false;
    for (int i = 0; attrs[i]; i += 2) {
        const std::string_view key(attrs[i]);
        if (key == "name") {
            st.current_name = attrs[i + 1];
            has_name = true;
        } else if (key == "value") {
            st.current_value_attr = attrs[i + 1];
        }
    }
    if (!st.current_type) {
        st.doc->warnings.push_back("unsupported prefs element <" + std::string(el) + "> skipped");
        return;
    }
    if (!has_name) st.fail("<" + std::string(el) + "> without a name attribute");
}

void XMLCALL on_end(void* ud, const XML_Char*) {
    auto& st = *static_cast<ParseState*>(ud);
    if (st.depth == 2 && st.current_type && !st.error) add_entry(st);
    if (st.depth == 2) st.current_type.reset();
    --st.depth;
}

void XMLCALL on_text(void* ud, const XML_Char* s, int len) {
    auto& st = *static_cast<ParseState*>(ud);
    if (st.depth == 2 && st.current_type == PrefsType::String) st.current_text.append(s, static_cast<std::size_t>(len));
}

bool is_facebook_token_file(std::string_view base) {
    return base == kFacebookTokenCacheFile || base == kFacebookWebViewTokenFile;
}

const std::string* string_value(const PrefsValue& v) { return std::get_if<std::string>(&v.parsed); }

std::optional<std::int64_t> integer_value(const PrefsValue& v) {
    if (auto* n = std::get_if<std::int64_t>(&v.parsed)) return *n;
    if (auto* s = std::get_if<std::string>(&v.parsed)) return text::parse_int(*s);
    return std::nullopt;
}

std::optional<double> decimal_value(const PrefsValue& v) {
    if (auto* d = std::get_if<double>(&v.parsed)) return *d;
    if (auto* n = std::get_if<std::int64_t>(&v.parsed)) return static_cast<double>(*n);
    if (auto* s = std::get_if<std::string>(&v.parsed)) return text::parse_double(*s);
    return std::nullopt;
}

/// Longest string value among keys accepted by `pred`; ties broken by key order.
template <class Pred>
std::optional<std::pair<std::string, std::string>> longest_token(const PrefsDocument& doc, Pred pred) {
    std::optional<std::pair<std::string, std::string>> best;
    for (const auto& [key, v] : doc.entries) {
        const std::string* s = string_value(v);
        if (!s || s->empty() || !text::contains_ci(key, "token") || !pred(key)) continue;
        if (!best || s->size() > best->second.size()) best = std::make_pair(key, *s);
    }
    return best;
}

bool is_owner_key(std::string_view key) {
    const std::string k = text::lower(key);
    return k.find("user") != std::string::npos && k.find("id") != std::string::npos &&
           k.find("token") == std::string::npos && k.find("session") == std::string::npos;
}

bool is_lat_key(std::string_view key) { return text::contains_ci(key, "lat"); }
bool is_lon_key(std::string_view key) { return text::contains_ci(key, "lon") || text::contains_ci(key, "lng"); }

}  // namespace

std::string_view prefs_type_name(PrefsType t) {
    switch (t) {
        case PrefsType::String: return "string";
        case PrefsType::Int: return "int";
        case PrefsType::Long: return "long";
        case PrefsType::Boolean: return "boolean";
        case PrefsType::Float: return "float";
    }
    return "string";
}

PrefsDocument parse_prefs_xml(std::string_view textual, ArtifactSource source) {
    return parse_prefs_xml(std::span(reinterpret_cast<const std::uint8_t*>(textual.data()), textual.size()),
                           std::move(source));
}

PrefsDocument parse_prefs_xml(std::span<const std::uint8_t> bytes, ArtifactSource source) {
    PrefsDocument doc;
    doc.source = std::move(source);
    Parser parser(XML_ParserCreate(nullptr), &XML_ParserFree);
    if (!parser) throw PrefsParseError("cannot create XML parser", 0);
    ParseState st;
    st.parser = parser.get();
    st.doc = &doc;
    XML_SetUserData(parser.get(), &st);
    XML_SetElementHandler(parser.get(), on_start, on_end);
    XML_SetCharacterDataHandler(parser.get(), on_text);
    const auto status = XML_Parse(parser.get(), reinterpret_cast<const char*>(bytes.data()),
                                  static_cast<int>(bytes.size()), XML_TRUE);
    if (st.error) throw PrefsParseError(*st.error, st.error_offset);
    if (status != XML_STATUS_OK) {
        throw PrefsParseError(XML_ErrorString(XML_GetErrorCode(parser.get())),
                              static_cast<std::uint64_t>(XML_GetCurrentByteIndex(parser.get())));
    }
    if (!st.saw_root) throw PrefsParseError("no root element", 0);
    return doc;
}

PrefsFindings extract_known_prefs(const PrefsDocument& doc, AppId app) {
    PrefsFindings out;
    const std::string base = text::basename(doc.source.file_path);
    std::set<std::string> consumed;
    bool recognized = false;

    auto make_token = [&](TokenProvider provider, const std::pair<std::string, std::string>& kv) {
        AuthToken t;
        t.app = app;
        t.provider = provider;
        t.token = kv.second;
        t.source = doc.source;
        t.source.detail = "key=" + kv.first;
        out.tokens.push_back(std::move(t));
        consumed.insert(kv.first);
    };
    auto take_owner = [&] {
        for (const auto& [key, v] : doc.entries) {
            const std::string* s = string_value(v);
            if (!is_owner_key(key) || !s || s->empty()) continue;
            out.owner_id = *s;
            consumed.insert(key);
            out.disclosures.insert(std::string(kDisclosureOwnerFromPrefs));
            break;
        }
    };
    auto take_last_active = [&](auto key_pred) {
        for (const auto& [key, v] : doc.entries) {
            if (!key_pred(key)) continue;
            const auto raw = integer_value(v);
            if (!raw) {
                out.warnings.push_back(doc.source.file_path + ": non-integer activity time in '" + key + "'");
                continue;
            }
            try {
                out.last_active = normalize_epoch(*raw);
                consumed.insert(key);
            } catch (const Error& e) {
                out.warnings.push_back(doc.source.file_path + ": " + e.what());
            }
            break;
        }
    };

    if (is_facebook_token_file(base)) {
        recognized = true;
        if (auto kv = longest_token(doc, [](std::string_view) { return true; })) {
            make_token(TokenProvider::Facebook, *kv);
            out.disclosures.insert(std::string(kDisclosureFacebookTokenKey));
        }
        // Other SDK bookkeeping keys (expires, permissions, ...) are expected here.
        for (const auto& [key, v] : doc.entries) consumed.insert(key);
    } else if (app == AppId::Grindr && base == "Rules.xml") {
        recognized = true;
        if (auto kv = longest_token(doc, [](std::string_view) { return true; })) make_token(TokenProvider::Grindr, *kv);
        for (const auto& [key, v] : doc.entries) {
            const std::string* s = string_value(v);
            if (text::contains_ci(key, "session")) {
                out.warnings.push_back(doc.source.file_path + ": session id '" + key + "' present (not modeled)");
                consumed.insert(key);
            } else if (s && (text::contains_ci(key, "email") || text::is_email(*s)) && text::is_email(*s)) {
                out.emails.push_back(*s);
                consumed.insert(key);
            }
        }
        take_last_active([](std::string_view k) { return text::contains_ci(k, "last") && text::contains_ci(k, "active"); });
    } else if (app == AppId::Skout && base == "LOGIN_PREFS.xml") {
        recognized = true;
        if (auto kv = longest_token(doc, [](std::string_view) { return true; })) {
            make_token(TokenProvider::Facebook, *kv);
            out.disclosures.insert(std::string(kDisclosureFacebookTokenKey));
        }
        take_owner();
    } else if (app == AppId::Skout && base == "LOCATION_PREFS.xml") {
        recognized = true;
        take_last_active([](std::string_view k) { return k == "LOCATION_LAST_SENT_TIME"; });
    } else if (app == AppId::Tinder && base == "SP.xml") {
        recognized = true;
        auto is_fb = [](std::string_view k) { return text::contains_ci(k, "facebook") || text::contains_ci(k, "fb"); };
        if (auto kv = longest_token(doc, is_fb)) make_token(TokenProvider::Facebook, *kv);
        if (auto kv = longest_token(doc, [&](std::string_view k) { return !is_fb(k); }))
            make_token(TokenProvider::Tinder, *kv);
        take_owner();

        std::optional<std::pair<std::string, double>> lat, lon;
        for (const auto& [key, v] : doc.entries) {
            const auto d = decimal_value(v);
            if (!d) continue;
            if (!lat && is_lat_key(key) && *d >= -90.0 && *d <= 90.0) lat = std::make_pair(key, *d);
            else if (!lon && is_lon_key(key) && *d >= -180.0 && *d <= 180.0) lon = std::make_pair(key, *d);
        }
        if (lat && lon) {
            LocationFix fix;
            fix.app = app;
            fix.precision = Precision::Exact;
            fix.lat = lat->second;
            fix.lon = lon->second;
            fix.source = doc.source;
            fix.source.detail = "keys=" + lat->first + "," + lon->first;
            out.locations.push_back(std::move(fix));
            consumed.insert(lat->first);
            consumed.insert(lon->first);
            out.disclosures.insert(std::string(kDisclosureLatLonKeys));
        }
    } else if (app == AppId::MiuMeet) {
        if (auto kv = longest_token(doc, [](std::string_view) { return true; })) {
            recognized = true;
            make_token(TokenProvider::MiuMeet, *kv);
        }
    }

    if (recognized) {
        const auto unknown = std::count_if(doc.entries.begin(), doc.entries.end(),
                                           [&](const auto& kv) { return !consumed.count(kv.first); });
        if (unknown > 0)
            out.warnings.push_back(doc.source.file_path + ": " + std::to_string(unknown) + " unrecognized key(s) ignored");
    }
    return out;
}

}  // namespace gsnx
