#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "netleak.hpp"
#include "scanner.hpp"
#include "schema.hpp"

namespace gsnx {

struct ExtractOptions {
    AppRegistry registry = AppRegistry::defaults();
    /// When set, messages later than this plus one day are reported as warnings.
    std::optional<Instant> acquisition_time;
};

struct TableReport {
    std::string db_path;
    std::string table;
    bool matched = false;
    double column_overlap = 0.0;
};

struct Extraction {
    ScanCatalog catalog;
    EvidenceBundle bundle;
    std::vector<TableReport> tables;  // every table of every database read
};

inline constexpr std::string_view kDisclosureEpochUnits =
    "epoch integers above 100000000000 read as milliseconds, otherwise seconds";
inline constexpr std::string_view kDisclosureCarvedSuburb =
    "suburb carved from a cache record is attributed to the device owner";

/// scan -> prefs -> databases -> caches. Evidence files are only read.
Extraction extract_evidence(const std::filesystem::path& root, const ExtractOptions& options = {});

struct NetworkAnalysis {
    std::vector<HttpTransaction> transactions;
    std::vector<LeakFinding> findings;
    std::vector<std::string> warnings;
};

/// Ingests the log and runs detection with the bundle's recovered tokens.
NetworkAnalysis analyze_network(const std::string& http_log_path, const EvidenceBundle& bundle);

}  // namespace gsnx
