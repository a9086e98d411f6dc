// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "gsnx/gsnx.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Str {
    char* p = nullptr;
    ~Str() { gsnx_string_free(p); }
    std::string s() const { return p ? p : ""; }
};

struct Scratch {
    fs::path path;
    Scratch() {
        static std::mt19937_64 g(std::random_device{}());
        path = fs::temp_directory_path() / ("gsnx-capi-" + std::to_string(g()));
        fs::create_directories(path);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

void write(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

// Small corpus with Facebook tokens for two apps and a Grindr token.
const Scratch& corpus() {
    static Scratch s;
    static const bool ready = [] {
        write(s.path / "spec.json", R"({"seed": 3, "apps": {
            "Skout": {"profiles": 2, "messages": 3, "credentials": 1},
            "Grindr": {"profiles": 2, "messages": 4, "credentials": 1}},
            "leaks": [{"app": "Grindr", "category": "ExactLocation", "count": 2}]})");
        Str manifest;
        REQUIRE(gsnx_forge((s.path / "spec.json").c_str(), (s.path / "out").c_str(), &manifest.p) == GSNX_OK);
        REQUIRE(json::parse(manifest.s()).contains("planted_leaks"));
        return true;
    }();
    (void)ready;
    return s;
}

std::string evidence() { return (corpus().path / "out/evidence").string(); }
std::string http_log() { return (corpus().path / "out/transactions.ndjson").string(); }

struct Counter {
    int calls = 0;
    std::string last_url;
};

int counting_transport(void* user, const char* url, gsnx_response* response) {
    auto* c = static_cast<Counter*>(user);
    ++c->calls;
    c->last_url = url;
    const std::string body = R"({"id":"1","name":"N"})";
    return gsnx_response_set(response, 200, body.data(), body.size()) == GSNX_OK ? 0 : 1;
}

int failing_transport(void*, const char*, gsnx_response*) { return 7; }

}  // namespace

TEST_CASE("helpers and status codes") {
    CHECK(std::string(gsnx_version()) == "0.3.0");
    CHECK(std::string(gsnx_status_name(GSNX_OK)) != "");
    CHECK(std::string(gsnx_status_name(GSNX_E_SCAN)) != std::string(gsnx_status_name(GSNX_E_IO)));
    CHECK(std::string(gsnx_lookup_app("com.tinder")) == "Tinder");
    CHECK(std::string(gsnx_lookup_app("com.example.notes")) == "Unknown");
    CHECK(std::string(gsnx_lookup_app("")) == "Unknown");

    std::int64_t ms = 0;
    int unit = -1;
    CHECK(gsnx_normalize_epoch(1403136000, &ms, &unit) == GSNX_OK);
    CHECK(ms == 1403136000000);
    CHECK(unit == 0);
    CHECK(gsnx_normalize_epoch(1403136000123, &ms, &unit) == GSNX_OK);
    CHECK(ms == 1403136000123);
    CHECK(unit == 1);
    CHECK(gsnx_normalize_epoch(-5, &ms, &unit) == GSNX_E_MALFORMED_TIMESTAMP);
    CHECK(std::string(gsnx_last_error()) != "");
    CHECK(gsnx_normalize_epoch(0, nullptr, &unit) == GSNX_E_INVALID_ARGUMENT);

    Str url;
    CHECK(gsnx_graph_request_url("CAAX1", &url.p) == GSNX_OK);
    CHECK(url.s() == "https://graph.facebook.com/me?access_token=CAAX1");
    Str empty;
    CHECK(gsnx_graph_request_url("", &empty.p) == GSNX_E_INVALID_ARGUMENT);
    CHECK(empty.p == nullptr);
    CHECK(gsnx_graph_request_url(nullptr, &empty.p) == GSNX_E_INVALID_ARGUMENT);
    gsnx_string_free(nullptr);
}

TEST_CASE("session errors") {
    gsnx_session* s = nullptr;
    CHECK(gsnx_session_open(nullptr, &s) == GSNX_E_INVALID_ARGUMENT);
    CHECK(gsnx_session_open("/nonexistent/gsnx/root", &s) == GSNX_E_SCAN);
    CHECK(s == nullptr);
    CHECK(gsnx_scan(nullptr, nullptr) == GSNX_E_INVALID_ARGUMENT);
    gsnx_session_close(nullptr);

    REQUIRE(gsnx_session_open(evidence().c_str(), &s) == GSNX_OK);
    Str out;
    CHECK(gsnx_report(s, "xml", nullptr, &out.p) == GSNX_E_USAGE);
    CHECK(gsnx_report(s, "json", "yesterday", &out.p) == GSNX_E_USAGE);
    CHECK(gsnx_set_contact(s, "Grindr", "Grindr:1", nullptr) == GSNX_E_USAGE);
    CHECK(gsnx_attach_http_log(s, "/nonexistent/gsnx/log.ndjson") == GSNX_E_INGEST);
    CHECK(gsnx_session_set_registry(s, "/nonexistent/gsnx/registry.tsv") == GSNX_E_IO);
    CHECK(gsnx_session_set_acquisition_time(s, "not a time") == GSNX_E_USAGE);
    gsnx_session_close(s);
}

TEST_CASE("scan, extract and report through the C API") {
    gsnx_session* s = nullptr;
    REQUIRE(gsnx_session_open(evidence().c_str(), &s) == GSNX_OK);
    Str scan;
    REQUIRE(gsnx_scan(s, &scan.p) == GSNX_OK);
    const auto cat = json::parse(scan.s());
    CHECK(cat["installs"].size() == 2);

    REQUIRE(gsnx_extract(s) == GSNX_OK);
    REQUIRE(gsnx_attach_http_log(s, http_log().c_str()) == GSNX_OK);
    Str a, b, text;
    REQUIRE(gsnx_report(s, "json", "2014-06-20T00:00:00Z", &a.p) == GSNX_OK);
    REQUIRE(gsnx_report(s, "json", "2014-06-20T00:00:00Z", &b.p) == GSNX_OK);
    CHECK(a.s() == b.s());
    const auto r = json::parse(a.s());
    CHECK(r["meta"]["generated_at"] == "2014-06-20T00:00:00Z");
    CHECK(r["findings"].size() == 2);
    CHECK(r["matrix"].size() == 2);
    CHECK(r["contact"].is_null());
    REQUIRE(gsnx_report(s, "text", nullptr, &text.p) == GSNX_OK);
    CHECK(text.s().find("Grindr") != std::string::npos);
    gsnx_session_close(s);
}

TEST_CASE("contact evidence through the C API") {
    gsnx_session* s = nullptr;
    REQUIRE(gsnx_session_open(evidence().c_str(), &s) == GSNX_OK);
    Str rep;
    REQUIRE(gsnx_report(s, "json", nullptr, &rep.p) == GSNX_OK);
    const auto r = json::parse(rep.s());
    std::string owner;
    for (const auto& i : r["installs"])
        if (i["app"] == "Grindr") owner = i["owner_id"];
    REQUIRE_FALSE(owner.empty());
    std::string peer;
    for (const auto& m : r["artifacts"]["messages"]) {
        if (m["app"] != "Grindr") continue;
        peer = m["sender_id"] == owner ? m["recipient_id"] : m["sender_id"];
        break;
    }
    REQUIRE_FALSE(peer.empty());
    Str ce;
    REQUIRE(gsnx_contact_evidence(s, ("Grindr:" + owner).c_str(), ("Grindr:" + peer).c_str(), nullptr, &ce.p) == GSNX_OK);
    const auto c = json::parse(ce.s());
    REQUIRE(c.is_object());
    CHECK(c["message_count"].get<int>() >= 1);
    Str none;
    REQUIRE(gsnx_contact_evidence(s, "Grindr:nobody", "Grindr:nobody-else", nullptr, &none.p) == GSNX_OK);
    CHECK(json::parse(none.s()).is_null());
    gsnx_session_close(s);
}

TEST_CASE("token checks send nothing unless allowed") {
    gsnx_session* s = nullptr;
    REQUIRE(gsnx_session_open(evidence().c_str(), &s) == GSNX_OK);
    Counter counter;
    REQUIRE(gsnx_set_transport(s, counting_transport, &counter) == GSNX_OK);

    Str off;
    REQUIRE(gsnx_verify_tokens(s, &off.p) == GSNX_OK);
    Str rep;
    REQUIRE(gsnx_report(s, "json", nullptr, &rep.p) == GSNX_OK);
    CHECK(counter.calls == 0);
    const auto tokens = json::parse(off.s());
    REQUIRE(tokens.is_array());
    REQUIRE_FALSE(tokens.empty());
    for (const auto& t : tokens) CHECK(t["verification"]["status"] == "disabled");

    REQUIRE(gsnx_set_online_token_check(s, 1) == GSNX_OK);
    Str on;
    REQUIRE(gsnx_verify_tokens(s, &on.p) == GSNX_OK);
    int facebook = 0;
    for (const auto& t : json::parse(on.s())) {
        if (t["token"]["provider"] == "Facebook") {
            ++facebook;
            CHECK(t["verification"]["status"] == "verified");
            CHECK(t["verification"]["identity"]["name"] == "N");
        } else {
            CHECK(t["verification"]["status"] == "not_applicable");
        }
    }
    CHECK(facebook >= 1);
    CHECK(counter.calls == facebook);
    CHECK(counter.last_url.rfind("https://graph.facebook.com/me?access_token=", 0) == 0);

    REQUIRE(gsnx_set_transport(s, failing_transport, nullptr) == GSNX_OK);
    Str failed;
    REQUIRE(gsnx_verify_tokens(s, &failed.p) == GSNX_OK);
    for (const auto& t : json::parse(failed.s()))
        if (t["token"]["provider"] == "Facebook") CHECK(t["verification"]["status"] == "online_check_failed");

    REQUIRE(gsnx_set_online_token_check(s, 0) == GSNX_OK);
    const int before = counter.calls;
    REQUIRE(gsnx_set_transport(s, counting_transport, &counter) == GSNX_OK);
    Str again;
    REQUIRE(gsnx_verify_tokens(s, &again.p) == GSNX_OK);
    CHECK(counter.calls == before);
    gsnx_session_close(s);
}

TEST_CASE("forge through the C API") {
    Str spec;
    REQUIRE(gsnx_forge_canonical_spec(&spec.p) == GSNX_OK);
    CHECK(json::parse(spec.s())["seed"] == 42);

    Scratch dir;
    write(dir.path / "bad.json", R"({"seed": 1, "apps": {"Nope": {}}})");
    CHECK(gsnx_forge((dir.path / "bad.json").c_str(), (dir.path / "o1").c_str(), nullptr) == GSNX_E_FORGE);
    write(dir.path / "ok.json", R"({"seed": 1, "apps": {"Tinder": {"messages": 1}}})");
    CHECK(gsnx_forge((dir.path / "ok.json").c_str(), (dir.path / "o2").c_str(), nullptr) == GSNX_OK);
    CHECK(gsnx_forge((dir.path / "ok.json").c_str(), (dir.path / "o2").c_str(), nullptr) == GSNX_E_FORGE);
    CHECK(gsnx_forge(nullptr, (dir.path / "o3").c_str(), nullptr) == GSNX_E_INVALID_ARGUMENT);
}
