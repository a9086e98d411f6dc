#define GSNX_BUILDING_LIBRARY
#include "gsnx/gsnx.h"

#include <curl/curl.h>

#include <cstring>
#include <fstream>
#include <memory>
#include <mutex>

#include "errors.hpp"
#include "forge.hpp"
#include "report.hpp"

using namespace gsnx;

struct gsnx_response {
    int status = 0;
    std::string body;
    bool set = false;
};

namespace {

thread_local std::string t_last_error;

gsnx_status fail(gsnx_status s, std::string msg) {
    t_last_error = std::move(msg);
    return s;
}

/// Runs `fn`, translating exceptions into status codes.
template <typename F>
gsnx_status guarded(F&& fn) {
    try {
        t_last_error.clear();
        fn();
        return GSNX_OK;
    } catch (const Error& e) {
        return fail(static_cast<gsnx_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(GSNX_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(GSNX_E_INTERNAL, e.what());
    } catch (...) {
        return fail(GSNX_E_INTERNAL, "unknown failure");
    }
}

char* dup(std::string_view s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.data(), s.size());
    p[s.size()] = '\0';
    return p;
}

void need(const void* p, const char* what) {
    if (!p) throw Error(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
}

Instant instant_arg(const char* iso, const char* what) {
    auto t = parse_instant(iso);
    if (!t) throw UsageError(std::string(what) + " '" + iso + "' is not an ISO-8601 UTC time");
    return *t;
}

std::size_t curl_sink(char* data, std::size_t size, std::size_t n, void* user) {
    static_cast<std::string*>(user)->append(data, size * n);
    return size * n;
}

class CurlTransport final : public Transport {
public:
    TransportResponse request(const std::string& url) override {
        static std::once_flag once;
        std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
        std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> h(curl_easy_init(), curl_easy_cleanup);
        if (!h) throw Error(ErrorCode::OnlineCheckFailed, "curl init failed");
        TransportResponse r;
        curl_easy_setopt(h.get(), CURLOPT_URL, url.c_str());
        curl_easy_setopt(h.get(), CURLOPT_WRITEFUNCTION, curl_sink);
        curl_easy_setopt(h.get(), CURLOPT_WRITEDATA, &r.body);
        curl_easy_setopt(h.get(), CURLOPT_TIMEOUT, 20L);
        curl_easy_setopt(h.get(), CURLOPT_PROTOCOLS, static_cast<long>(CURLPROTO_HTTPS));
        const CURLcode rc = curl_easy_perform(h.get());
        if (rc != CURLE_OK) throw Error(ErrorCode::OnlineCheckFailed, curl_easy_strerror(rc));
        long status = 0;
        curl_easy_getinfo(h.get(), CURLINFO_RESPONSE_CODE, &status);
        r.status = static_cast<int>(status);
        return r;
    }
};

class CallbackTransport final : public Transport {
public:
    CallbackTransport(gsnx_transport_fn fn, void* user) : fn_(fn), user_(user) {}
    TransportResponse request(const std::string& url) override {
        gsnx_response resp;
        if (fn_(user_, url.c_str(), &resp) != 0) throw Error(ErrorCode::OnlineCheckFailed, "transport callback failed");
        if (!resp.set) throw Error(ErrorCode::OnlineCheckFailed, "transport callback returned no response");
        return {resp.status, std::move(resp.body)};
    }

private:
    gsnx_transport_fn fn_;
    void* user_;
};

}  // namespace

struct gsnx_session {
    std::filesystem::path root;
    ExtractOptions options;
    std::optional<Extraction> extraction;
    std::optional<std::string> http_log;
    std::optional<NetworkAnalysis> network;
    IdentityMap identities;
    struct Contact {
        Identity a, b;
        std::optional<Instant> before;
    };
    std::optional<Contact> contact;
    std::unique_ptr<Transport> transport;  // null: built-in HTTPS transport
    bool allow_online = false;

    Extraction& extracted() {
        if (!extraction) extraction = extract_evidence(root, options);
        return *extraction;
    }
    const NetworkAnalysis* analysed() {
        if (!http_log) return nullptr;
        if (!network) network = analyze_network(*http_log, extracted().bundle);
        return &*network;
    }
    Transport& online_transport() {
        if (!transport) transport = std::make_unique<CurlTransport>();
        return *transport;
    }
};

extern "C" {

void gsnx_string_free(char* s) { std::free(s); }

const char* gsnx_version(void) {
    static const std::string v(tool_version());
    return v.c_str();
}

const char* gsnx_status_name(gsnx_status status) {
    switch (status) {
        case GSNX_OK: return "ok";
        case GSNX_E_INVALID_ARGUMENT: return "invalid_argument";
        case GSNX_E_SCAN: return "scan_error";
        case GSNX_E_PREFS_PARSE: return "prefs_parse_error";
        case GSNX_E_DB_OPEN: return "db_open_error";
        case GSNX_E_CACHE_PARSE: return "cache_parse_error";
        case GSNX_E_MALFORMED_TIMESTAMP: return "malformed_timestamp";
        case GSNX_E_INGEST: return "ingest_error";
        case GSNX_E_FORGE: return "forge_error";
        case GSNX_E_USAGE: return "usage_error";
        case GSNX_E_NOT_APPLICABLE: return "not_applicable";
        case GSNX_E_IO: return "io_error";
        case GSNX_E_ONLINE_CHECK_FAILED: return "online_check_failed";
        case GSNX_E_INTERNAL: return "internal_error";
    }
    return "unknown_status";
}

const char* gsnx_last_error(void) { return t_last_error.c_str(); }

gsnx_status gsnx_session_open(const char* evidence_root, gsnx_session** out) {
    return guarded([&] {
        need(evidence_root, "evidence_root");
        need(out, "out");
        *out = nullptr;
        std::error_code ec;
        if (!std::filesystem::is_directory(evidence_root, ec))
            throw ScanError(std::string(evidence_root) + " is not a readable directory");
        auto s = std::make_unique<gsnx_session>();
        s->root = evidence_root;
        *out = s.release();
    });
}

void gsnx_session_close(gsnx_session* session) { delete session; }

gsnx_status gsnx_session_set_registry(gsnx_session* session, const char* config_path) {
    return guarded([&] {
        need(session, "session");
        session->options.registry = config_path ? AppRegistry::from_config_file(config_path) : AppRegistry::defaults();
        session->extraction.reset();
        session->network.reset();
    });
}

gsnx_status gsnx_session_set_acquisition_time(gsnx_session* session, const char* iso_time) {
    return guarded([&] {
        need(session, "session");
        session->options.acquisition_time.reset();
        if (iso_time) session->options.acquisition_time = instant_arg(iso_time, "acquisition time");
        session->extraction.reset();
        session->network.reset();
    });
}

gsnx_status gsnx_scan(gsnx_session* session, char** json_out) {
    return guarded([&] {
        need(session, "session");
        need(json_out, "json_out");
        *json_out = dup(catalog_to_json(scan_root(session->root, session->options.registry)));
    });
}

gsnx_status gsnx_extract(gsnx_session* session) {
    return guarded([&] {
        need(session, "session");
        session->extracted();
    });
}

gsnx_status gsnx_attach_http_log(gsnx_session* session, const char* path) {
    return guarded([&] {
        need(session, "session");
        need(path, "path");
        session->http_log = path;
        session->network.reset();
        session->analysed();
    });
}

gsnx_status gsnx_set_identity_map(gsnx_session* session, const char* path) {
    return guarded([&] {
        need(session, "session");
        session->identities = path ? IdentityMap::from_file(path) : IdentityMap{};
    });
}

gsnx_status gsnx_set_contact(gsnx_session* session, const char* identity_a, const char* identity_b, const char* before_iso) {
    return guarded([&] {
        need(session, "session");
        if (!identity_a && !identity_b) {
            session->contact.reset();
            return;
        }
        need(identity_a, "identity_a");
        need(identity_b, "identity_b");
        gsnx_session::Contact c{parse_identity(identity_a), parse_identity(identity_b), std::nullopt};
        if (before_iso) c.before = instant_arg(before_iso, "before");
        session->contact = std::move(c);
    });
}

gsnx_status gsnx_report(gsnx_session* session, const char* format, const char* report_time_iso, char** out) {
    return guarded([&] {
        need(session, "session");
        need(format, "format");
        need(out, "out");
        if (std::string_view(format) != "json" && std::string_view(format) != "text")
            throw UsageError("unknown report format '" + std::string(format) + "' (expected json or text)");
        ReportOptions ro;
        if (report_time_iso) ro.report_time = instant_arg(report_time_iso, "report time");
        ro.allow_online_token_check = session->allow_online;
        if (session->allow_online) ro.transport = &session->online_transport();
        auto& ex = session->extracted();
        Report r = build_report(ex, session->analysed(), ro);
        if (session->contact) {
            const auto& c = *session->contact;
            r.contact = contact_evidence(ex.bundle, c.a, c.b, c.before, session->identities);
        }
        *out = dup(emit_report(r, format));
    });
}

gsnx_status gsnx_contact_evidence(gsnx_session* session, const char* identity_a, const char* identity_b, const char* before_iso,
                                  char** json_out) {
    return guarded([&] {
        need(session, "session");
        need(identity_a, "identity_a");
        need(identity_b, "identity_b");
        need(json_out, "json_out");
        std::optional<Instant> before;
        if (before_iso) before = instant_arg(before_iso, "before");
        const Identity a = parse_identity(identity_a), b = parse_identity(identity_b);
        *json_out = dup(contact_to_json(contact_evidence(session->extracted().bundle, a, b, before, session->identities)));
    });
}

gsnx_status gsnx_response_set(gsnx_response* response, int http_status, const char* body, size_t body_len) {
    return guarded([&] {
        need(response, "response");
        if (body_len) need(body, "body");
        response->status = http_status;
        response->body.assign(body ? body : "", body_len);
        response->set = true;
    });
}

gsnx_status gsnx_set_transport(gsnx_session* session, gsnx_transport_fn fn, void* user) {
    return guarded([&] {
        need(session, "session");
        session->transport.reset();
        if (fn) session->transport = std::make_unique<CallbackTransport>(fn, user);
    });
}

gsnx_status gsnx_set_online_token_check(gsnx_session* session, int allow) {
    return guarded([&] {
        need(session, "session");
        session->allow_online = allow != 0;
    });
}

gsnx_status gsnx_verify_tokens(gsnx_session* session, char** json_out) {
    return guarded([&] {
        need(session, "session");
        need(json_out, "json_out");
        const auto& tokens = session->extracted().bundle.tokens;
        RefusalTransport refuse;
        Transport& t = session->allow_online ? session->online_transport() : static_cast<Transport&>(refuse);
        std::vector<TokenReport> out;
        for (auto& a : classify_tokens(tokens)) {
            auto v = verify_token(a.token, t, session->allow_online);
            a.verified_identity = v.identity;
            out.push_back({std::move(a), std::move(v)});
        }
        *json_out = dup(token_reports_to_json(out));
    });
}

gsnx_status gsnx_forge(const char* spec_path, const char* outdir, char** manifest_out) {
    return guarded([&] {
        need(spec_path, "spec_path");
        need(outdir, "outdir");
        if (manifest_out) *manifest_out = nullptr;
        const auto m = forge_corpus(load_forge_spec(spec_path), outdir);
        if (manifest_out) *manifest_out = dup(manifest_to_json(m));
    });
}

gsnx_status gsnx_forge_canonical_spec(char** json_out) {
    return guarded([&] {
        need(json_out, "json_out");
        *json_out = dup(forge_spec_to_json(canonical_spec()));
    });
}

const char* gsnx_lookup_app(const char* package_dir_name) {
    if (!package_dir_name) return "Unknown";
    return app_name(lookup_app(package_dir_name)).data();
}

gsnx_status gsnx_normalize_epoch(int64_t raw, int64_t* epoch_ms_out, int* unit_out) {
    return guarded([&] {
        need(epoch_ms_out, "epoch_ms_out");
        const auto r = normalize_epoch(raw);
        *epoch_ms_out = to_epoch_ms(r.instant);
        if (unit_out) *unit_out = r.unit == EpochUnit::Milliseconds ? 1 : 0;
    });
}

gsnx_status gsnx_graph_request_url(const char* token, char** url_out) {
    return guarded([&] {
        need(token, "token");
        need(url_out, "url_out");
        AuthToken t;
        t.provider = TokenProvider::Facebook;
        t.token = token;
        *url_out = dup(build_graph_request(t));
    });
}

}  // extern "C"
