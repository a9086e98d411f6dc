// Command-line front end. Talks to the library only through gsnx/gsnx.h.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsnx/gsnx.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct Failure {
    gsnx_status status;
    std::string message;
};

void check(gsnx_status s) {
    if (s != GSNX_OK) throw Failure{s, gsnx_last_error()};
}

struct Owned {
    char* p = nullptr;
    ~Owned() { gsnx_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

using Session = std::unique_ptr<gsnx_session, decltype(&gsnx_session_close)>;

Session open(const std::string& root, const std::string& registry, const std::string& acquired) {
    gsnx_session* s = nullptr;
    check(gsnx_session_open(root.c_str(), &s));
    Session session(s, gsnx_session_close);
    if (!registry.empty()) check(gsnx_session_set_registry(s, registry.c_str()));
    if (!acquired.empty()) check(gsnx_session_set_acquisition_time(s, acquired.c_str()));
    return session;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw Failure{GSNX_E_IO, "cannot write " + out_path};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forensic extraction and leak analysis for Android dating-app evidence"};
    app.set_version_flag("--version", std::string("gsnx ") + gsnx_version());
    app.require_subcommand(1);

    std::string root, registry, acquired, out, format = "json", report_time, http_log, identity_map, before;
    std::vector<std::string> contact;
    bool allow_online = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("root", root, "Evidence root (data partition or data/data)")->required();
        sub->add_option("--registry", registry, "Extended app registry file");
        sub->add_option("--acquisition-time", acquired, "Acquisition time, ISO-8601 UTC");
    };
    auto add_report = [&](CLI::App* sub) {
        sub->add_option("--out,-o", out, "Write the report here instead of stdout");
        sub->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
        sub->add_option("--report-time", report_time, "Timestamp recorded in the report, ISO-8601 UTC");
        sub->add_option("--identity-map", identity_map, "Cross-app identity equivalences");
        sub->add_option("--contact", contact, "Add a contact section for two identities (App:id)")->expected(2);
        sub->add_option("--before", before, "Only contact before this time, ISO-8601 UTC");
        sub->add_flag("--allow-online-token-check", allow_online, "Query the Graph API for recovered Facebook tokens");
    };

    auto* scan = app.add_subcommand("scan", "Catalog files and detect installed apps");
    add_common(scan);

    auto* extract = app.add_subcommand("extract", "Extract artifacts and write a report");
    add_common(extract);
    add_report(extract);
    extract->add_option("--http-log", http_log, "NDJSON HTTP transaction log");

    auto* netscan = app.add_subcommand("netscan", "Extract plus HTTP-log leak analysis");
    add_common(netscan);
    add_report(netscan);
    netscan->add_option("--http-log", http_log, "NDJSON HTTP transaction log")->required();

    auto* correlate = app.add_subcommand("correlate", "Contact evidence between two identities");
    add_common(correlate);
    correlate->add_option("--contact", contact, "Two identities, App:id")->expected(2)->required();
    correlate->add_option("--before", before, "Only evidence before this time, ISO-8601 UTC");
    correlate->add_option("--identity-map", identity_map, "Cross-app identity equivalences");

    std::string spec_path, outdir;
    bool print_canonical = false;
    auto* forge = app.add_subcommand("forge", "Write a synthetic evidence corpus");
    forge->add_option("spec", spec_path, "Forge spec (JSON)");
    forge->add_option("outdir", outdir, "Output directory (absent or empty)");
    forge->add_flag("--print-canonical-spec", print_canonical, "Print the built-in reference spec and exit");

    auto* verify = app.add_subcommand("verify-token", "Classify recovered tokens, optionally checking them online");
    add_common(verify);
    verify->add_flag("--allow-online-token-check", allow_online, "Query the Graph API for recovered Facebook tokens");

    std::string token;
    auto* graph = app.add_subcommand("graph-url", "Print the Graph API request for a Facebook token (nothing is sent)");
    graph->add_option("token", token)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*scan) {
            auto s = open(root, registry, acquired);
            Owned j;
            check(gsnx_scan(s.get(), &j.p));
            emit(j.str(), "");
        } else if (*extract || *netscan) {
            auto s = open(root, registry, acquired);
            if (!identity_map.empty()) check(gsnx_set_identity_map(s.get(), identity_map.c_str()));
            if (!contact.empty()) check(gsnx_set_contact(s.get(), contact[0].c_str(), contact[1].c_str(), opt(before)));
            if (!http_log.empty()) check(gsnx_attach_http_log(s.get(), http_log.c_str()));
            check(gsnx_set_online_token_check(s.get(), allow_online ? 1 : 0));
            Owned r;
            check(gsnx_report(s.get(), format.c_str(), opt(report_time), &r.p));
            emit(r.str(), out);
        } else if (*correlate) {
            auto s = open(root, registry, acquired);
            if (!identity_map.empty()) check(gsnx_set_identity_map(s.get(), identity_map.c_str()));
            Owned j;
            check(gsnx_contact_evidence(s.get(), contact[0].c_str(), contact[1].c_str(), opt(before), &j.p));
            emit(j.str(), "");
        } else if (*forge) {
            if (print_canonical) {
                Owned j;
                check(gsnx_forge_canonical_spec(&j.p));
                emit(j.str(), "");
            } else {
                if (spec_path.empty() || outdir.empty()) {
                    std::cerr << "forge: spec and outdir are required\n";
                    return kExitUsage;
                }
                Owned m;
                check(gsnx_forge(spec_path.c_str(), outdir.c_str(), &m.p));
                std::cerr << "forged corpus in " << outdir << "\n";
            }
        } else if (*verify) {
            auto s = open(root, registry, acquired);
            check(gsnx_set_online_token_check(s.get(), allow_online ? 1 : 0));
            Owned j;
            check(gsnx_verify_tokens(s.get(), &j.p));
            emit(j.str(), "");
        } else if (*graph) {
            Owned u;
            check(gsnx_graph_request_url(token.c_str(), &u.p));
            emit(u.str() + "\n", "");
        }
    } catch (const Failure& f) {
        std::cerr << "gsnx: " << gsnx_status_name(f.status) << ": " << f.message << "\n";
        return f.status == GSNX_E_USAGE || f.status == GSNX_E_INVALID_ARGUMENT ? kExitUsage : kExitError;
    }
    return kExitOk;
}
