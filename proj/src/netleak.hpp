#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace gsnx {

struct HttpTransaction {
    std::size_t index = 0;  // position among accepted transactions
    std::size_t line = 0;   // 1-based line in the log
    double ts = 0.0;        // epoch seconds as captured
    Instant at{};
    std::string method;
    std::string url;
    std::map<std::string, std::string> request_headers;
    std::string request_body;  // raw bytes
    int response_status = 0;
    std::map<std::string, std::string> response_headers;
    std::string response_body;  // raw bytes
    bool tls = false;
    std::optional<AppId> app_hint;
};

struct IngestResult {
    std::vector<HttpTransaction> transactions;
    std::vector<std::string> warnings;  // one per skipped line
};

/// NDJSON, one transaction object per line. Blank lines are ignored; malformed lines are skipped and counted.
/// Throws IngestError when the stream itself is unreadable.
IngestResult ingest_transactions(std::istream& in);
IngestResult ingest_transactions_file(const std::string& path);

/// One NDJSON line (no trailing newline) for a transaction; inverse of ingest.
std::string transaction_to_ndjson(const HttpTransaction& t);

enum class LeakCategory {
    PlaintextMessage,
    PlaintextImage,
    PlaintextImageUrl,
    ExactLocation,
    CoarseLocation,
    EmailAddress,
    TokenInTransit,
    LocationInFilename,
};
std::string_view leak_category_name(LeakCategory c);
std::optional<LeakCategory> parse_leak_category(std::string_view name);

enum class Severity { Info, Medium, High };
std::string_view severity_name(Severity s);

enum class TransactionPart { Url, RequestHeaders, RequestBody, ResponseHeaders, ResponseBody };
std::string_view transaction_part_name(TransactionPart p);

struct EvidenceSpan {
    std::size_t transaction_index = 0;
    TransactionPart part = TransactionPart::Url;
    std::size_t offset = 0;
    std::size_t length = 0;
};

struct LeakFinding {
    LeakCategory category = LeakCategory::PlaintextMessage;
    Severity severity = Severity::Info;
    AppId app = AppId::Unknown;
    EvidenceSpan evidence;
    std::string description;
};

/// Tokens shorter than this are not searched for in traffic.
inline constexpr std::size_t kMinTokenLength = 8;
/// Max bytes between the two numbers of an unkeyed coordinate pair.
inline constexpr std::size_t kCoordinatePairWindow = 40;
inline constexpr std::size_t kMinCoordinateFractionDigits = 4;

/// Pure; at most one finding per (transaction, category), ordered by transaction then category.
std::vector<LeakFinding> detect_leaks(std::span<const HttpTransaction> transactions,
                                      std::span<const AuthToken> known_tokens = {});

struct CoordinatePair {
    double lat = 0.0;
    double lon = 0.0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

/// Unkeyed decimal-degree pairs in `s` (4+ fraction digits, in range, gap within the window).
std::vector<CoordinatePair> find_coordinate_pairs(std::string_view s);

// --- summary matrix ----------------------------------------------------------

enum class MatrixColumn { Messages, Images, Location, Email, Auth };
std::string_view matrix_column_name(MatrixColumn c);
inline constexpr MatrixColumn kMatrixColumns[] = {MatrixColumn::Messages, MatrixColumn::Images, MatrixColumn::Location,
                                                   MatrixColumn::Email, MatrixColumn::Auth};

inline constexpr std::string_view kNoneObserved = "none observed";

struct MatrixCell {
    std::string primary = std::string(kNoneObserved);  // strongest evidence class
    std::vector<std::string> classes;                   // every class observed, strongest first
    std::vector<std::string> evidence;                  // pointers into the bundle / transaction log
};

struct MatrixRow {
    AppId app = AppId::Unknown;
    std::map<MatrixColumn, MatrixCell> cells;
};

/// Human phrase for a cell class id.
std::string describe_matrix_class(MatrixColumn col, std::string_view cls);

/// Rows for `apps` (all eight known apps when empty), merging on-device and network evidence.
std::vector<MatrixRow> build_leak_matrix(std::span<const LeakFinding> findings, const EvidenceBundle& bundle,
                                         std::span<const AppId> apps = {});

}  // namespace gsnx
