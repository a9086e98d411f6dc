#include "report.hpp"

#include <json.hpp>

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "digest.hpp"
#include "errors.hpp"

#ifndef GSNX_VERSION
#define GSNX_VERSION "0.0.0"
#endif

namespace gsnx {

using nlohmann::json;

std::string_view tool_version() { return GSNX_VERSION; }

namespace {

// --- JSON encoders -------------------------------------------------------------

json opt_instant(const std::optional<Instant>& t) { return t ? json(format_instant(*t)) : json(nullptr); }

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json to_json(const ArtifactSource& s) {
    json j;
    j["file_path"] = s.file_path;
    j["kind"] = std::string(file_kind_name(s.kind));
    j["detail"] = s.detail;
    if (s.byte_range) j["byte_range"] = {{"offset", s.byte_range->offset}, {"length", s.byte_range->length}};
    else j["byte_range"] = nullptr;
    return j;
}

json refs_json(const std::vector<ArtifactSource>& refs) {
    json a = json::array();
    for (const auto& r : refs) a.push_back(to_json(r));
    return a;
}

json to_json(const ChatMessage& m) {
    return {{"app", app_name(m.app)},
            {"message_id", m.message_id},
            {"sender_id", m.sender_id},
            {"recipient_id", m.recipient_id},
            {"counterpart_id", m.counterpart_id},
            {"thread_id", m.thread_id},
            {"sent_at", format_instant(m.sent_at)},
            {"body", m.body},
            {"body_is_media", m.body_is_media},
            {"direction", direction_name(m.direction)},
            {"unread", opt(m.unread)},
            {"failed", opt(m.failed)},
            {"message_type", m.message_type},
            {"admin_origin", m.admin_origin},
            {"confidence", m.confidence == Confidence::Exact ? "exact" : "heuristic"},
            {"source", to_json(m.source)}};
}

json to_json(const ProfileRecord& p) {
    return {{"app", app_name(p.app)},
            {"profile_id", p.profile_id},
            {"display_name", opt(p.display_name)},
            {"birth_date", opt(p.birth_date)},
            {"age", opt(p.age)},
            {"social_ids", p.social_ids},
            {"image_hash", opt(p.image_hash)},
            {"picture_url", opt(p.picture_url)},
            {"last_seen", opt_instant(p.last_seen)},
            {"last_message_at", opt_instant(p.last_message_at)},
            {"distance_m", opt(p.distance_m)},
            {"is_owner", p.is_owner},
            {"origin_table", p.origin_table},
            {"raw_fields", p.raw_fields},
            {"source", to_json(p.source)}};
}

json to_json(const MatchRecord& m) {
    return {{"app", app_name(m.app)},
            {"match_id", m.match_id},
            {"counterpart_user_id", m.counterpart_user_id},
            {"counterpart_name", opt(m.counterpart_name)},
            {"created_at", format_instant(m.created_at)},
            {"last_activity", opt_instant(m.last_activity)},
            {"viewed", opt(m.viewed)},
            {"raw_fields", m.raw_fields},
            {"source", to_json(m.source)}};
}

std::string_view precision_name(Precision p) {
    switch (p) {
        case Precision::Exact: return "exact";
        case Precision::Suburb: return "suburb";
        case Precision::Region: return "region";
    }
    return "exact";
}

json to_json(const LocationFix& l) {
    json j{{"app", app_name(l.app)},
           {"precision", precision_name(l.precision)},
           {"at", opt_instant(l.at)},
           {"subject", l.subject_profile ? json(*l.subject_profile) : json("owner")},
           {"source", to_json(l.source)}};
    switch (l.precision) {
        case Precision::Exact:
            j["lat"] = l.lat;
            j["lon"] = l.lon;
            break;
        case Precision::Suburb: j["suburb"] = l.suburb; break;
        case Precision::Region:
            j["country"] = l.country;
            j["state"] = l.state;
            j["distance_m"] = opt(l.distance_m);
            break;
    }
    return j;
}

json to_json(const AuthToken& t) {
    return {{"app", app_name(t.app)},
            {"provider", provider_name(t.provider)},
            {"token", t.token},
            {"expiry_hint", opt_instant(t.expiry_hint)},
            {"source", to_json(t.source)}};
}

json to_json(const CachedImage& i) {
    return {{"app", app_name(i.app)},
            {"origin_url", opt(i.origin_url)},
            {"content_hash", i.content_hash},
            {"format", image_format_name(i.format)},
            {"bytes_ref", to_json(i.bytes_ref)},
            {"meta_ref", i.meta_ref ? to_json(*i.meta_ref) : json(nullptr)}};
}

json to_json(const MediaRecord& m) {
    return {{"app", app_name(m.app)},
            {"kind", media_kind_name(m.kind)},
            {"media_id", m.media_id},
            {"owner_user_id", m.owner_user_id},
            {"created_at", opt_instant(m.created_at)},
            {"text", m.text},
            {"urls", m.urls},
            {"confidence", m.confidence == Confidence::Exact ? "exact" : "heuristic"},
            {"source", to_json(m.source)}};
}

json to_json(const LeakFinding& f) {
    return {{"category", leak_category_name(f.category)},
            {"severity", severity_name(f.severity)},
            {"app", app_name(f.app)},
            {"evidence",
             {{"transaction", f.evidence.transaction_index},
              {"part", transaction_part_name(f.evidence.part)},
              {"offset", f.evidence.offset},
              {"length", f.evidence.length}}},
            {"description", f.description}};
}

json to_json(const MatrixRow& r) {
    json cells = json::object();
    for (const auto& [col, cell] : r.cells) {
        cells[std::string(matrix_column_name(col))] = {{"primary", cell.primary},
                                                        {"summary", describe_matrix_class(col, cell.primary)},
                                                        {"classes", cell.classes},
                                                        {"evidence", cell.evidence}};
    }
    return {{"app", app_name(r.app)}, {"cells", cells}};
}

json to_json(const ArtifactCounts& c) {
    return {{"messages", c.messages}, {"profiles", c.profiles},   {"matches", c.matches},       {"locations", c.locations},
            {"tokens", c.tokens},     {"images", c.images},       {"media", c.media},           {"emails", c.emails},
            {"activity", c.activity}, {"device_ids", c.device_ids}, {"volley", c.volley},       {"previews", c.previews},
            {"raw_rows", c.raw_rows}};
}

json to_json(const TimelineEvent& e) {
    return {{"at", format_instant(e.at)},
            {"kind", event_kind_name(e.kind)},
            {"app", app_name(e.app)},
            {"summary", e.summary},
            {"refs", refs_json(e.refs)}};
}

json to_json(const Identity& id) { return format_identity(id); }

json bundle_json(const EvidenceBundle& b) {
    json j;
    auto list = [](const auto& v) {
        json a = json::array();
        for (const auto& x : v) a.push_back(to_json(x));
        return a;
    };
    j["messages"] = list(b.messages);
    j["profiles"] = list(b.profiles);
    j["matches"] = list(b.matches);
    j["locations"] = list(b.locations);
    j["tokens"] = list(b.tokens);
    j["images"] = list(b.images);
    j["media"] = list(b.media);
    json emails = json::array();
    for (const auto& e : b.emails)
        emails.push_back({{"app", app_name(e.app)},
                          {"address", e.address},
                          {"confidence", e.confidence == Confidence::Exact ? "exact" : "heuristic"},
                          {"source", to_json(e.source)}});
    j["emails"] = emails;
    json activity = json::array();
    for (const auto& a : b.activity)
        activity.push_back({{"app", app_name(a.app)}, {"at", format_instant(a.at)}, {"label", a.label}, {"source", to_json(a.source)}});
    j["activity"] = activity;
    json devs = json::array();
    for (const auto& d : b.device_ids)
        devs.push_back({{"app", app_name(d.app)}, {"name", d.name}, {"value", d.value}, {"source", to_json(d.source)}});
    j["device_ids"] = devs;
    json volley = json::array();
    for (const auto& v : b.volley)
        volley.push_back({{"app", app_name(v.app)},
                          {"match_id", v.event.match_id},
                          {"matched", v.event.matched},
                          {"occurred_at", format_instant(v.event.occurred_at)},
                          {"source", to_json(v.source)}});
    j["volley"] = volley;
    json previews = json::array();
    for (const auto& p : b.previews)
        previews.push_back({{"app", app_name(p.app)},
                            {"username", p.username},
                            {"profile_pic_url", p.profile_pic_url},
                            {"last_message", p.last_message},
                            {"location_suburb", p.location_suburb},
                            {"source", to_json(p.source)}});
    j["previews"] = previews;
    json raw = json::array();
    for (const auto& r : b.side_rows)
        raw.push_back({{"app", app_name(r.app)}, {"table", r.table}, {"fields", r.fields}, {"source", to_json(r.source)}});
    j["raw_rows"] = raw;
    return j;
}

json tokens_json(std::span<const TokenReport> reports) {
    json tokens = json::array();
    for (const auto& t : reports) {
        json v{{"status", verify_status_name(t.verification.status)}, {"note", t.verification.note}};
        if (t.verification.identity)
            v["identity"] = {{"name", t.verification.identity->name}, {"account_id", t.verification.identity->account_id}};
        tokens.push_back({{"token", to_json(t.assessment.token)},
                          {"graph_url", opt(t.assessment.graph_url)},
                          {"risk_notes", t.assessment.risk_notes},
                          {"verification", v}});
    }
    return tokens;
}

json contact_json(const std::optional<ContactEvidence>& contact) {
    if (!contact) return nullptr;
    const auto& c = *contact;
    return {{"identity_a", to_json(c.identity_a)},
            {"identity_b", to_json(c.identity_b)},
            {"first_contact", format_instant(c.first_contact)},
            {"last_contact", format_instant(c.last_contact)},
            {"message_count", c.message_count},
            {"match_count", c.match_count},
            {"supporting", refs_json(c.supporting)}};
}

json report_json(const Report& r) {
    json j;
    json inputs = json::array();
    for (const auto& f : r.inputs)
        inputs.push_back({{"path", f.path},
                          {"size_bytes", f.size_bytes},
                          {"sha256", f.sha256},
                          {"kind", file_kind_name(f.kind)},
                          {"app", app_name(f.app)}});
    j["meta"] = {{"tool", "gsnx"},
                 {"version", r.version},
                 {"digest_algorithm", r.digest_algorithm},
                 {"evidence_root", r.evidence_root},
                 {"evidence_root_hash", r.evidence_root_hash},
                 {"generated_at", r.generated_at},
                 {"disclosures", r.disclosures},
                 {"external_storage_entries", r.external_storage_entries},
                 {"inputs", inputs}};

    json installs = json::array();
    for (const auto& i : r.installs)
        installs.push_back({{"app", app_name(i.app)},
                            {"package_path", i.package_path},
                            {"version_hint", opt(i.version_hint)},
                            {"registry_extended", i.registry_extended},
                            {"owner_id", r.owners.count(i.app) ? json(r.owners.at(i.app)) : json(nullptr)}});
    j["installs"] = installs;

    json matrix = json::array();
    for (const auto& row : r.matrix) matrix.push_back(to_json(row));
    j["matrix"] = matrix;

    json counts = json::object();
    for (const auto& [app, c] : r.counts) counts[std::string(app_name(app))] = to_json(c);
    j["counts"] = counts;

    json tables = json::array();
    for (const auto& t : r.tables)
        tables.push_back({{"database", t.db_path}, {"table", t.table}, {"matched", t.matched}, {"column_overlap", t.column_overlap}});
    j["tables"] = tables;

    json findings = json::array();
    for (const auto& f : r.findings) findings.push_back(to_json(f));
    j["findings"] = findings;
    j["transactions"] = r.transactions;

    json timeline = json::array();
    for (const auto& e : r.timeline) timeline.push_back(to_json(e));
    j["timeline"] = timeline;

    json links = json::array();
    for (const auto& l : r.image_links)
        links.push_back({{"app", app_name(l.app)},
                         {"profile_id", l.profile_id},
                         {"image_index", l.image_index},
                         {"content_hash", l.content_hash},
                         {"origin_url", l.origin_url},
                         {"reason", l.reason}});
    j["image_links"] = links;

    json history = json::array();
    for (const auto& h : r.location_history) {
        json e = to_json(h.fix);
        e["untimed"] = h.untimed;
        history.push_back(std::move(e));
    }
    j["location_history"] = history;

    j["token_analysis"] = tokens_json(r.tokens);

    j["contact"] = contact_json(r.contact);

    j["artifacts"] = bundle_json(r.bundle);
    j["warnings"] = r.warnings;
    return j;
}

// --- text digest ---------------------------------------------------------------

std::string pad(std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
}

std::string report_text(const Report& r) {
    std::ostringstream os;
    os << "gsnx " << r.version << " report\n";
    os << "evidence root: " << r.evidence_root << "\n";
    os << "evidence hash (" << r.digest_algorithm << "): " << r.evidence_root_hash << "\n";
    os << "generated at: " << r.generated_at << "\n";
    os << "input files: " << r.inputs.size() << ", external storage entries: " << r.external_storage_entries << "\n\n";

    os << "Installed apps\n";
    if (r.installs.empty()) os << "  (none)\n";
    for (const auto& i : r.installs) {
        os << "  " << pad(std::string(app_name(i.app)), 12) << i.package_path;
        if (i.registry_extended) os << " (extended registry)";
        if (r.owners.count(i.app)) os << "  owner=" << r.owners.at(i.app);
        os << "\n";
    }

    os << "\nSummary matrix\n" << matrix_to_text(r.matrix);

    os << "\nArtifacts per app\n";
    for (const auto& [app, c] : r.counts) {
        os << "  " << pad(std::string(app_name(app)), 12) << "messages=" << c.messages << " profiles=" << c.profiles
           << " matches=" << c.matches << " locations=" << c.locations << " tokens=" << c.tokens
           << " images=" << c.images << " media=" << c.media << " emails=" << c.emails << " previews=" << c.previews
           << " raw_rows=" << c.raw_rows << "\n";
    }

    os << "\nNetwork findings (" << r.findings.size() << " from " << r.transactions << " transactions)\n";
    for (const auto& f : r.findings) {
        os << "  #" << f.evidence.transaction_index << " " << pad(std::string(leak_category_name(f.category)), 20)
           << pad(std::string(severity_name(f.severity)), 7) << pad(std::string(app_name(f.app)), 11) << f.description
           << "\n";
    }

    os << "\nTokens\n";
    for (const auto& t : r.tokens) {
        const auto& tok = t.assessment.token;
        os << "  " << pad(std::string(app_name(tok.app)), 11) << pad(std::string(provider_name(tok.provider)), 9)
           << tok.source.file_path << "  [" << verify_status_name(t.verification.status) << "]\n";
        if (t.assessment.graph_url) os << "    " << *t.assessment.graph_url << "\n";
        for (const auto& n : t.assessment.risk_notes) os << "    - " << n << "\n";
    }

    if (r.contact) {
        const auto& c = *r.contact;
        os << "\nContact " << format_identity(c.identity_a) << " <-> " << format_identity(c.identity_b) << ": "
           << c.message_count << " message(s), " << c.match_count << " match(es), first " << format_instant(c.first_contact)
           << ", last " << format_instant(c.last_contact) << "\n";
    }

    os << "\nTimeline (" << r.timeline.size() << " events)\n";
    for (const auto& e : r.timeline) {
        os << "  " << format_instant(e.at) << "  " << pad(std::string(app_name(e.app)), 11)
           << pad(std::string(event_kind_name(e.kind)), 15) << e.summary << "\n";
    }

    os << "\nHeuristics used\n";
    for (const auto& d : r.disclosures) os << "  - " << d << "\n";

    os << "\nWarnings (" << r.warnings.size() << ")\n";
    for (const auto& w : r.warnings) os << "  - " << w << "\n";
    return os.str();
}

std::optional<Instant> latest_instant(const EvidenceBundle& b) {
    std::optional<Instant> best;
    auto see = [&](const std::optional<Instant>& t) {
        if (t && (!best || *t > *best)) best = t;
    };
    for (const auto& m : b.messages) see(m.sent_at);
    for (const auto& m : b.matches) {
        see(m.created_at);
        see(m.last_activity);
    }
    for (const auto& v : b.volley) see(v.event.occurred_at);
    for (const auto& a : b.activity) see(a.at);
    for (const auto& m : b.media) see(m.created_at);
    for (const auto& l : b.locations) see(l.at);
    return best;
}

}  // namespace

std::string evidence_root_hash(std::span<const InputFile> inputs) {
    std::string text;
    for (const auto& f : inputs) text += f.path + "\t" + std::to_string(f.size_bytes) + "\t" + f.sha256 + "\n";
    return sha256_hex(std::string_view(text));
}

std::vector<MatrixRow> render_summary_matrix(const EvidenceBundle& bundle, std::span<const LeakFinding> findings) {
    std::vector<AppId> apps;
    for (const auto& i : bundle.installs) {
        if (i.app != AppId::Unknown && std::find(apps.begin(), apps.end(), i.app) == apps.end()) apps.push_back(i.app);
    }
    if (apps.empty()) return {};
    return build_leak_matrix(findings, bundle, apps);
}

std::string matrix_to_text(std::span<const MatrixRow> rows) {
    if (rows.empty()) return "  (no apps detected)\n";
    std::ostringstream os;
    os << "  " << pad("App", 12);
    for (auto c : kMatrixColumns) os << pad(std::string(matrix_column_name(c)), 44);
    os << "\n";
    for (const auto& r : rows) {
        os << "  " << pad(std::string(app_name(r.app)), 12);
        for (auto c : kMatrixColumns) {
            const auto& cell = r.cells.at(c);
            os << pad(describe_matrix_class(c, cell.primary), 44);
        }
        os << "\n";
    }
    return os.str();
}

Report build_report(const Extraction& ex, const NetworkAnalysis* net, const ReportOptions& options) {
    Report r;
    r.version = std::string(tool_version());
    r.digest_algorithm = std::string(kDigestAlgorithm);
    r.evidence_root = ex.catalog.root.generic_string();
    r.external_storage_entries = ex.catalog.external_entries;
    for (const auto& e : ex.catalog.entries) {
        InputFile f{e.path, e.size_bytes, {}, e.kind, e.app};
        try {
            f.sha256 = sha256_file(ex.catalog.root / e.path);
        } catch (const Error&) {
            // unreadable files were already reported by the scanner
        }
        r.inputs.push_back(std::move(f));
    }
    r.evidence_root_hash = evidence_root_hash(r.inputs);

    r.bundle = ex.bundle;
    r.installs = ex.bundle.installs;
    r.owners = ex.bundle.owners;
    r.tables = ex.tables;
    r.warnings = ex.bundle.warnings;

    std::span<const LeakFinding> findings;
    std::span<const HttpTransaction> txns;
    if (net) {
        findings = net->findings;
        txns = net->transactions;
        r.findings = net->findings;
        r.transactions = net->transactions.size();
        r.warnings.insert(r.warnings.end(), net->warnings.begin(), net->warnings.end());
    }

    r.matrix = render_summary_matrix(ex.bundle, findings);
    const auto& b = ex.bundle;
    for (const auto& i : b.installs) r.counts[i.app];
    auto count = [&](const auto& v, std::size_t ArtifactCounts::*field) {
        for (const auto& x : v) ++(r.counts[x.app].*field);
    };
    count(b.messages, &ArtifactCounts::messages);
    count(b.profiles, &ArtifactCounts::profiles);
    count(b.matches, &ArtifactCounts::matches);
    count(b.locations, &ArtifactCounts::locations);
    count(b.tokens, &ArtifactCounts::tokens);
    count(b.images, &ArtifactCounts::images);
    count(b.media, &ArtifactCounts::media);
    count(b.emails, &ArtifactCounts::emails);
    count(b.activity, &ArtifactCounts::activity);
    count(b.device_ids, &ArtifactCounts::device_ids);
    count(b.volley, &ArtifactCounts::volley);
    count(b.previews, &ArtifactCounts::previews);
    count(b.side_rows, &ArtifactCounts::raw_rows);

    r.timeline = build_timeline(b, findings, txns);
    r.image_links = link_profile_images(b);
    r.location_history = location_history(b);

    RefusalTransport refuse;
    Transport& transport = options.transport ? *options.transport : static_cast<Transport&>(refuse);
    for (const auto& a : classify_tokens(b.tokens)) {
        TokenReport t{a, verify_token(a.token, transport, options.allow_online_token_check)};
        r.tokens.push_back(std::move(t));
    }

    std::set<std::string> disclosures = b.disclosures;
    if (b.epoch_seconds + b.epoch_milliseconds > 0) {
        disclosures.insert("epoch values resolved: " + std::to_string(b.epoch_seconds) + " as seconds, " +
                           std::to_string(b.epoch_milliseconds) + " as milliseconds");
    }
    if (net) {
        disclosures.insert("network findings: coordinate pairs need " +
                           std::to_string(kMinCoordinateFractionDigits) + "+ fraction digits within " +
                           std::to_string(kCoordinatePairWindow) + " bytes, or lat/lon-named keys");
        disclosures.insert("network findings: message payloads recognized by chat endpoint paths or message/text/body field names");
    }
    r.disclosures.assign(disclosures.begin(), disclosures.end());

    const auto when = options.report_time ? options.report_time : latest_instant(b);
    r.generated_at = format_instant(when.value_or(Instant{}));
    return r;
}

std::string emit_report(const Report& report, std::string_view format) {
    if (format == "json") return report_json(report).dump(2) + "\n";
    if (format == "text") return report_text(report);
    throw UsageError("unknown report format '" + std::string(format) + "' (expected json or text)");
}

std::string contact_to_json(const std::optional<ContactEvidence>& contact) { return contact_json(contact).dump(2) + "\n"; }

std::string token_reports_to_json(std::span<const TokenReport> reports) { return tokens_json(reports).dump(2) + "\n"; }

std::string catalog_to_json(const ScanCatalog& catalog) {
    json j;
    j["root"] = catalog.root.generic_string();
    json installs = json::array();
    for (const auto& i : catalog.installs)
        installs.push_back({{"app", app_name(i.app)},
                            {"package_path", i.package_path},
                            {"version_hint", opt(i.version_hint)},
                            {"registry_extended", i.registry_extended}});
    j["installs"] = installs;
    json entries = json::array();
    for (const auto& e : catalog.entries)
        entries.push_back({{"path", e.path}, {"kind", file_kind_name(e.kind)}, {"size_bytes", e.size_bytes}, {"app", app_name(e.app)}});
    j["entries"] = entries;
    j["external_storage_entries"] = catalog.external_entries;
    j["warnings"] = catalog.warnings;
    return j.dump(2) + "\n";
}

}  // namespace gsnx
