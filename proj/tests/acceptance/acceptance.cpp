// Acceptance gate: one PASS/FAIL line per criterion; non-zero exit when any fails.

#include <curl/curl.h>

#include <chrono>
#include <iostream>
#include <random>

#include "../support/oracles.hpp"
#include "correlate.hpp"
#include "db_extract.hpp"
#include "forge.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "schema.hpp"
#include "tokens.hpp"

namespace fs = std::filesystem;
using namespace gsnx;

namespace {

// Pinned tolerances.
constexpr double kRoundTripSecondsLimit = 10.0;
constexpr double kRequiredRecall = 1.0;
constexpr std::size_t kAllowedFalsePositives = 0;
constexpr double kRequiredOverlap = 1.0;
constexpr std::size_t kAllowedMatrixMismatches = 0;
constexpr int kEpochSamplesPerBranch = 10000;
constexpr int kTokenSamples = 1000;
// The literal request prefix as quoted in the reference description of the token lookup.
constexpr std::string_view kQuotedGraphPrefix = "https://graph.facebook.com/me?access_token=";

int failures = 0;

void verdict(bool ok, std::string_view name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << " | " << detail << "\n";
    if (!ok) ++failures;
}

void show_problems(const std::vector<std::string>& problems, std::size_t limit = 10) {
    for (std::size_t i = 0; i < problems.size() && i < limit; ++i) std::cout << "    " << problems[i] << "\n";
}

struct Canonical {
    oracle::TempDir dir{"accept"};
    ForgeManifest manifest;
    fs::path evidence;
    fs::path log;
};

Canonical& canonical() {
    static Canonical c;
    static const bool ready = [] {
        c.manifest = forge_corpus(canonical_spec(), c.dir.path() / "corpus");
        c.evidence = c.dir.path() / "corpus" / kForgeEvidenceDir;
        c.log = c.dir.path() / "corpus" / kForgeLogFile;
        return true;
    }();
    (void)ready;
    return c;
}

std::string full_run_json(const fs::path& evidence, const fs::path& log) {
    auto ex = extract_evidence(evidence);
    auto net = analyze_network(log.string(), ex.bundle);
    return emit_report(build_report(ex, &net), "json");
}

void round_trip() {
    const auto t0 = std::chrono::steady_clock::now();
    oracle::TempDir dir("roundtrip");
    const auto m = forge_corpus(canonical_spec(), dir.path());
    const auto ex = extract_evidence(dir.path() / kForgeEvidenceDir);
    const auto links = link_profile_images(ex.bundle);
    const auto report = emit_report(build_report(ex, nullptr), "json");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<std::pair<std::string, oracle::Diff>> parts = {
        {"messages", oracle::compare_messages(m.messages, ex.bundle.messages)},
        {"profiles", oracle::compare_profiles(m.profiles, ex.bundle.profiles)},
        {"matches", oracle::compare_matches(m.matches, ex.bundle.matches)},
        {"tokens", oracle::compare_tokens(m.tokens, ex.bundle.tokens)},
        {"image_links", oracle::compare_image_links(m.image_links, links)},
    };
    bool ok = secs < kRoundTripSecondsLimit && !report.empty();
    std::string detail;
    std::vector<std::string> problems;
    for (auto& [name, d] : parts) {
        ok = ok && d.problems.empty() && d.recovered == d.expected && d.expected > 0;
        detail += name + " " + std::to_string(d.recovered) + "/" + std::to_string(d.expected) + ", ";
        problems.insert(problems.end(), d.problems.begin(), d.problems.end());
    }
    char t[32];
    std::snprintf(t, sizeof t, "%.3f", secs);
    verdict(ok, "round_trip_fidelity", detail + "runtime " + t + " s (limit " + std::to_string(int(kRoundTripSecondsLimit)) + " s)");
    show_problems(problems);
}

void schema_coverage() {
    const auto& reg = SchemaRegistry::instance();
    const std::size_t g = reg.tables_for(AppId::Grindr).size(), s = reg.tables_for(AppId::Skout).size(),
                      t = reg.tables_for(AppId::Tinder).size();
    auto& c = canonical();
    const auto ex = extract_evidence(c.evidence);
    std::vector<std::string> problems;
    std::size_t checked = 0;
    for (AppId app : {AppId::Grindr, AppId::Skout, AppId::Tinder}) {
        for (const TableSpec* spec : reg.tables_for(app)) {
            bool found = false;
            for (const auto& tr : ex.tables) {
                if (tr.table != spec->table_name) continue;
                if (owning_install(ex.catalog, tr.db_path) == nullptr) continue;
                if (owning_install(ex.catalog, tr.db_path)->app != app) continue;
                found = true;
                ++checked;
                if (!tr.matched || tr.column_overlap < kRequiredOverlap)
                    problems.push_back(std::string(app_name(app)) + "." + std::string(spec->table_name) + " overlap " +
                                       std::to_string(tr.column_overlap));
            }
            if (!found) problems.push_back(std::string(app_name(app)) + "." + std::string(spec->table_name) + " not in forged db");
        }
    }
    const bool ok = g == 11 && s == 2 && t == 9 && problems.empty() && checked == 22;
    verdict(ok, "schema_coverage",
            "registry Grindr " + std::to_string(g) + "/11, Skout " + std::to_string(s) + "/2, Tinder " + std::to_string(t) +
                "/9; forged tables at 100% overlap " + std::to_string(checked) + "/22");
    show_problems(problems);
}

void matrix_reproduction() {
    auto& c = canonical();
    const auto ex = extract_evidence(c.evidence);
    const auto net = analyze_network(c.log.string(), ex.bundle);
    const auto rows = render_summary_matrix(ex.bundle, net.findings);
    std::size_t mismatches = 0, cells = 0;
    std::vector<std::string> problems;
    for (const auto& [app, cols] : oracle::expected_matrix()) {
        const MatrixRow* row = nullptr;
        for (const auto& r : rows)
            if (r.app == app) row = &r;
        for (const auto& [col, want] : cols) {
            ++cells;
            const std::string got = row ? row->cells.at(col).primary : "<no row>";
            if (got != want) {
                ++mismatches;
                problems.push_back(std::string(app_name(app)) + " / " + std::string(matrix_column_name(col)) + ": want " + want +
                                   ", got " + got);
            }
        }
    }
    const bool ok = mismatches <= kAllowedMatrixMismatches && rows.size() == oracle::expected_matrix().size();
    verdict(ok, "summary_matrix", std::to_string(rows.size()) + " rows, " + std::to_string(cells) + " cells, " +
                                      std::to_string(mismatches) + " mismatches");
    show_problems(problems);
}

void token_url() {
    AuthToken t;
    t.provider = TokenProvider::Facebook;
    t.token = "T";
    const std::string url = build_graph_request(t);
    bool ok = url == std::string(kQuotedGraphPrefix) + "T";

    std::mt19937_64 rng(20150101);
    CURL* h = curl_easy_init();
    int bad = 0;
    for (int i = 0; i < kTokenSamples; ++i) {
        std::string tok;
        const auto len = 1 + rng() % 200;
        for (std::size_t k = 0; k < len; ++k) tok.push_back(static_cast<char>(1 + rng() % 255));
        t.token = tok;
        const std::string got = build_graph_request(t);
        char* esc = curl_easy_escape(h, tok.data(), static_cast<int>(tok.size()));
        const std::string want = std::string(kQuotedGraphPrefix) + esc;
        curl_free(esc);
        if (got != want || got.rfind(kQuotedGraphPrefix, 0) != 0) ++bad;
    }
    curl_easy_cleanup(h);
    ok = ok && bad == 0;
    verdict(ok, "token_url_exactness",
            "\"T\" -> " + url + "; " + std::to_string(kTokenSamples - bad) + "/" + std::to_string(kTokenSamples) +
                " random tokens match the curl encoder");
}

void leak_detection() {
    const auto spec = oracle::leak_benchmark_spec(7);
    const auto log = forge_transaction_log(spec);
    std::istringstream in(log.ndjson);
    const auto ingested = ingest_transactions(in);
    const auto findings = detect_leaks(ingested.transactions, log.tokens);
    const auto s = oracle::score_findings(log.planted, findings);
    const bool ok = log.planted.size() == 50 && log.decoys == 200 && s.recall() >= kRequiredRecall &&
                    s.false_positive <= kAllowedFalsePositives && ingested.warnings.empty();
    char r[32];
    std::snprintf(r, sizeof r, "%.1f%%", 100.0 * s.recall());
    verdict(ok, "leak_precision_recall",
            std::to_string(log.planted.size()) + " planted, " + std::to_string(log.decoys) + " decoys; recall " + r +
                ", false positives " + std::to_string(s.false_positive));
    show_problems(s.misses);
}

void determinism() {
    auto& c = canonical();
    const std::string a = full_run_json(c.evidence, c.log);
    const std::string b = full_run_json(c.evidence, c.log);
    oracle::TempDir d1("det1"), d2("det2");
    forge_corpus(canonical_spec(), d1.path());
    forge_corpus(canonical_spec(), d2.path());
    const bool trees = oracle::digest_tree(d1.path()) == oracle::digest_tree(d2.path());
    verdict(a == b && !a.empty() && trees, "determinism",
            "two full runs: " + std::string(a == b ? "byte-identical" : "DIFFERENT") + " (" + std::to_string(a.size()) +
                " bytes); forged trees " + (trees ? "identical" : "DIFFERENT"));
}

void immutability() {
    auto& c = canonical();
    const auto before = oracle::digest_tree(c.dir.path());
    full_run_json(c.evidence, c.log);
    const auto after = oracle::digest_tree(c.dir.path());
    std::size_t changed = 0;
    for (const auto& [p, d] : before) {
        auto it = after.find(p);
        if (it == after.end() || it->second != d) ++changed;
    }
    const bool ok = changed == 0 && before.size() == after.size() && !before.empty();
    verdict(ok, "evidence_immutability",
            std::to_string(before.size()) + " files digested, " + std::to_string(changed) + " changed, " +
                std::to_string(after.size() - std::min(after.size(), before.size())) + " added");
}

void epochs() {
    std::mt19937_64 rng(1970);
    int bad = 0;
    auto check = [&](std::int64_t raw, EpochUnit unit, std::int64_t ms) {
        const auto r = normalize_epoch(raw);
        if (r.unit != unit || format_instant(r.instant) != oracle::brute_force_utc(ms)) ++bad;
    };
    for (int i = 0; i < kEpochSamplesPerBranch; ++i) {
        const std::int64_t s = static_cast<std::int64_t>(rng() % 100000000001ull);  // [0, 1e11]
        check(s, EpochUnit::Seconds, s * 1000);
        const std::int64_t ms = 100000000001ll + static_cast<std::int64_t>(rng() % 4000000000000ull);
        check(ms, EpochUnit::Milliseconds, ms);
    }
    const bool boundary = normalize_epoch(100000000000).unit == EpochUnit::Seconds &&
                          normalize_epoch(100000000001).unit == EpochUnit::Milliseconds &&
                          format_instant(normalize_epoch(1403136000).instant) == "2014-06-19T00:00:00Z" &&
                          format_instant(normalize_epoch(1403136000000).instant) == "2014-06-19T00:00:00Z";
    verdict(bad == 0 && boundary, "epoch_handling",
            std::to_string(2 * kEpochSamplesPerBranch - bad) + "/" + std::to_string(2 * kEpochSamplesPerBranch) +
                " agree with the calendar walk; 1e11 -> seconds, 1e11+1 -> ms: " + (boundary ? "ok" : "WRONG"));
}

void generic_sweep_check() {
    oracle::TempDir dir("sweep");
    const std::string rel = "data/data/com.example.chatter/databases/store.db";
    const auto fx = forge_unknown_app_database(dir.path() / rel, 11, false);
    const auto c = generic_sweep(AppId::Unknown, dir.path(), {rel, FileKind::SqliteDb, std::nullopt, {}});
    std::size_t hit = 0;
    for (std::size_t i = 0; i < fx.message_ids.size(); ++i) {
        for (const auto& m : c.partial.messages)
            if (m.message_id == fx.message_ids[i] && m.body == fx.bodies[i]) {
                ++hit;
                break;
            }
    }
    const std::string rel2 = "data/data/com.example.metrics/databases/numbers.db";
    const auto fx2 = forge_unknown_app_database(dir.path() / rel2, 11, true);
    const auto c2 = generic_sweep(AppId::Unknown, dir.path(), {rel2, FileKind::SqliteDb, std::nullopt, {}});
    const std::size_t candidates = c2.partial.messages.size() + c2.partial.media.size() + c2.partial.emails.size();

    // the same databases found by a full extraction of the tree
    const auto ex = extract_evidence(dir.path());
    const bool via_pipeline = ex.bundle.messages.size() == fx.message_ids.size();

    const bool ok = !fx.message_ids.empty() && hit == fx.message_ids.size() && candidates == 0 && fx2.numeric_rows > 0 &&
                    via_pipeline;
    verdict(ok, "generic_sweep",
            "message-like db: " + std::to_string(hit) + "/" + std::to_string(fx.message_ids.size()) +
                " recovered; numbers-only db (" + std::to_string(fx2.numeric_rows) + " rows): " + std::to_string(candidates) +
                " candidates; pipeline sweep " + (via_pipeline ? "ok" : "MISSING"));
}

}  // namespace

int main() {
    curl_global_init(CURL_GLOBAL_DEFAULT);
    const std::pair<const char*, void (*)()> criteria[] = {
        {"round_trip_fidelity", round_trip}, {"schema_coverage", schema_coverage}, {"summary_matrix", matrix_reproduction},
        {"token_url_exactness", token_url},  {"leak_precision_recall", leak_detection}, {"determinism", determinism},
        {"evidence_immutability", immutability}, {"epoch_handling", epochs},      {"generic_sweep", generic_sweep_check},
    };
    for (const auto& [name, fn] : criteria) {
        try {
            fn();
        } catch (const std::exception& e) {
            verdict(false, name, std::string("threw: ") + e.what());
        }
    }
    curl_global_cleanup();
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << "\n";
    return failures == 0 ? 0 : 1;
}
