#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "correlate.hpp"
#include "netleak.hpp"
#include "pipeline.hpp"
#include "tokens.hpp"

namespace gsnx {

std::string_view tool_version();

struct InputFile {
    std::string path;
    std::uint64_t size_bytes = 0;
    std::string sha256;  // empty when unreadable
    FileKind kind = FileKind::Opaque;
    AppId app = AppId::Unknown;
};

struct ArtifactCounts {
    std::size_t messages = 0, profiles = 0, matches = 0, locations = 0, tokens = 0, images = 0, media = 0, emails = 0,
                activity = 0, device_ids = 0, volley = 0, previews = 0, raw_rows = 0;
};

struct TokenReport {
    TokenAssessment assessment;
    VerifyOutcome verification;
};

struct Report {
    // meta
    std::string version;
    std::string digest_algorithm;
    std::string evidence_root;
    std::string evidence_root_hash;
    std::string generated_at;
    std::vector<std::string> disclosures;
    std::vector<InputFile> inputs;
    std::size_t external_storage_entries = 0;

    std::vector<AppInstall> installs;
    std::map<AppId, std::string> owners;
    std::vector<MatrixRow> matrix;
    std::map<AppId, ArtifactCounts> counts;
    std::vector<TableReport> tables;
    std::vector<LeakFinding> findings;
    std::size_t transactions = 0;
    std::vector<TimelineEvent> timeline;
    std::vector<ImageLink> image_links;
    std::vector<HistoryEntry> location_history;
    std::vector<TokenReport> tokens;
    std::optional<ContactEvidence> contact;
    EvidenceBundle bundle;
    std::vector<std::string> warnings;
};

struct ReportOptions {
    /// Defaults to the latest instant found in the evidence, so identical inputs give identical reports.
    std::optional<Instant> report_time;
    bool allow_online_token_check = false;
    Transport* transport = nullptr;  // RefusalTransport when null
};

/// SHA-256 over "path\tsize\tsha256\n" lines of the catalog, in path order.
std::string evidence_root_hash(std::span<const InputFile> inputs);

Report build_report(const Extraction& extraction, const NetworkAnalysis* network, const ReportOptions& options = {});

/// One row per detected install (deduplicated by app), five columns each.
std::vector<MatrixRow> render_summary_matrix(const EvidenceBundle& bundle, std::span<const LeakFinding> findings);
std::string matrix_to_text(std::span<const MatrixRow> rows);

/// "json" (key-sorted, schema-stable) or "text". Throws UsageError for anything else.
std::string emit_report(const Report& report, std::string_view format);

std::string contact_to_json(const std::optional<ContactEvidence>& contact);
std::string token_reports_to_json(std::span<const TokenReport> reports);
std::string catalog_to_json(const ScanCatalog& catalog);

}  // namespace gsnx
