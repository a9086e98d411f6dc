#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "model.hpp"
#include "netleak.hpp"

namespace gsnx {

struct AppCounts {
    int profiles = 0;
    int messages = 0;
    int matches = 0;
    int images = 0;
    int locations = 0;
    int previews = 0;
    int credentials = 0;  // non-zero writes the app's token prefs files
};

struct MalformedInjection {
    bool prefs = false;
    bool database = false;
    bool cache = false;
    bool log = false;
};

struct LeakRequest {
    AppId app = AppId::Unknown;
    LeakCategory category = LeakCategory::PlaintextMessage;
    int count = 1;
};

struct ForgeSpec {
    std::uint64_t seed = 0;
    std::map<AppId, AppCounts> apps;
    MalformedInjection inject_malformed;
    std::vector<LeakRequest> leaks;
    int decoys = 0;
    /// ECMAScript regexes; generation fails if any synthetic PII value matches one.
    std::vector<std::string> deny_patterns;
};

/// Throws ForgeError on unknown apps/categories, negative counts or invalid patterns.
ForgeSpec parse_forge_spec(std::string_view json_text);
ForgeSpec load_forge_spec(const std::filesystem::path& path);
std::string forge_spec_to_json(const ForgeSpec& spec);

/// Seed 42 with every app populated and one planted leak per matrix-relevant class.
ForgeSpec canonical_spec();

struct ImageLinkTruth {
    AppId app = AppId::Unknown;
    std::string profile_id;
    std::string origin_url;
    std::string content_hash;
};

struct PlantedLeak {
    std::size_t transaction_index = 0;
    LeakCategory category = LeakCategory::PlaintextMessage;
    AppId app = AppId::Unknown;
};

struct ForgedLog {
    std::string ndjson;
    std::vector<PlantedLeak> planted;
    std::size_t transactions = 0;  // valid lines
    std::size_t decoys = 0;
    std::size_t malformed_lines = 0;
    std::vector<AuthToken> tokens;  // the prefs tokens the log refers to
};

struct ForgeManifest {
    std::map<AppId, std::string> owners;
    std::vector<ChatMessage> messages;
    std::vector<ProfileRecord> profiles;
    std::vector<MatchRecord> matches;
    std::vector<AuthToken> tokens;
    std::vector<ImageLinkTruth> image_links;
    std::vector<LocationFix> locations;
    std::vector<CarvedMessagePreview> previews;
    std::vector<EmailRecord> emails;
    std::vector<VolleyRecord> volley;
    std::vector<std::string> files;  // relative to the evidence root
    std::size_t injected_faults = 0;  // evidence-tree faults; bad log lines are in log.malformed_lines
    ForgedLog log;
};

inline constexpr std::string_view kForgeEvidenceDir = "evidence";
inline constexpr std::string_view kForgeLogFile = "transactions.ndjson";
inline constexpr std::string_view kForgeManifestFile = "manifest.json";

/// Writes outdir/evidence/data/data/<package>/..., outdir/transactions.ndjson and outdir/manifest.json.
/// Throws ForgeError when outdir exists and is not empty.
ForgeManifest forge_corpus(const ForgeSpec& spec, const std::filesystem::path& outdir);

/// Planted leaks plus decoys, shuffled deterministically.
ForgedLog forge_transaction_log(const ForgeSpec& spec);

std::string manifest_to_json(const ForgeManifest& manifest);

/// Tokens the forge writes for `app` (Facebook and/or native), derived from the seed only.
std::vector<AuthToken> forged_tokens(std::uint64_t seed, AppId app);

struct SweepFixture {
    std::vector<std::string> message_ids;  // "table#rowid=N"
    std::vector<std::string> bodies;
    std::size_t numeric_rows = 0;
};

/// A database of an app outside the registry. With `numbers_only`, every column is numeric.
SweepFixture forge_unknown_app_database(const std::filesystem::path& file, std::uint64_t seed, bool numbers_only);

/// Deterministic 1x1 baseline JPEG; `tag` goes into a COM segment so hashes differ.
std::vector<std::uint8_t> tiny_jpeg(std::string_view tag);
/// Deterministic 1x1 lossless WebP.
std::vector<std::uint8_t> tiny_webp();

}  // namespace gsnx
