#pragma once

// Core evidence types shared by every extraction stage.

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace gsnx {

/// UTC instant with millisecond resolution. Device timezone is never applied.
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

enum class AppId { Badoo, Grindr, Skout, Tinder, MeetMe, Jaumo, FullCircle, MiuMeet, Unknown };

inline constexpr std::array<AppId, 8> kKnownApps = {
    AppId::Badoo, AppId::Grindr, AppId::Skout,      AppId::Tinder,
    AppId::MeetMe, AppId::Jaumo, AppId::FullCircle, AppId::MiuMeet,
};

std::string_view app_name(AppId app);
/// Accepts canonical names ("Meet Me", "MeetMe", "meetme" ...). Unknown on no match.
AppId parse_app_name(std::string_view name);

enum class FileKind { SqliteDb, PrefsXml, Jpeg, WebP, Png, Json, PicassoMeta, Opaque };
std::string_view file_kind_name(FileKind kind);

struct ByteRange {
    std::uint64_t offset = 0;
    std::uint64_t length = 0;
    auto operator<=>(const ByteRange&) const = default;
};

struct ArtifactSource {
    std::string file_path;  // relative to the evidence root, generic form
    FileKind kind = FileKind::Opaque;
    std::optional<ByteRange> byte_range;
    std::string detail;  // e.g. "chat#rowid=3"; empty for whole-file artifacts
    auto operator<=>(const ArtifactSource&) const = default;
};

struct AppInstall {
    AppId app = AppId::Unknown;
    std::string package_path;  // relative, e.g. data/data/com.tinder
    std::optional<std::string> version_hint;
    bool registry_extended = false;
};

enum class Direction { Inbound, Outbound, Unknown };
std::string_view direction_name(Direction d);

enum class Confidence { Exact, Heuristic };

struct ChatMessage {
    AppId app = AppId::Unknown;
    std::string message_id;
    std::string sender_id;     // empty when the source does not record it
    std::string recipient_id;  // empty when the source does not record it
    std::string counterpart_id;  // chat partner when only the partner is recorded
    std::string thread_id;       // Match_id / chatID when present
    Instant sent_at{};
    std::string body;
    bool body_is_media = false;
    Direction direction = Direction::Unknown;
    std::optional<bool> unread;
    std::optional<bool> failed;
    std::string message_type;  // raw Type cell
    bool admin_origin = false;
    Confidence confidence = Confidence::Exact;
    ArtifactSource source;
};

struct ProfileRecord {
    AppId app = AppId::Unknown;
    std::string profile_id;
    std::optional<std::string> display_name;
    std::optional<std::string> birth_date;  // YYYY-MM-DD
    std::optional<int> age;
    std::map<std::string, std::string> social_ids;  // Facebook / Twitter / Instagram
    std::optional<std::string> image_hash;
    std::optional<std::string> picture_url;
    std::optional<Instant> last_seen;
    std::optional<Instant> last_message_at;
    std::optional<double> distance_m;
    bool is_owner = false;
    std::string origin_table;
    std::map<std::string, std::string> raw_fields;
    ArtifactSource source;
};

struct MatchRecord {
    AppId app = AppId::Unknown;
    std::string match_id;
    std::string counterpart_user_id;
    std::optional<std::string> counterpart_name;
    Instant created_at{};
    std::optional<Instant> last_activity;
    std::optional<bool> viewed;
    std::map<std::string, std::string> raw_fields;
    ArtifactSource source;
};

enum class Precision { Exact, Suburb, Region };

struct LocationFix {
    AppId app = AppId::Unknown;
    Precision precision = Precision::Exact;
    double lat = 0.0;
    double lon = 0.0;
    std::string suburb;
    std::string country;
    std::string state;
    std::optional<double> distance_m;
    std::optional<Instant> at;
    std::optional<std::string> subject_profile;  // absent means the device owner
    ArtifactSource source;
};

enum class TokenProvider { Facebook, Grindr, Tinder, MiuMeet, Other };
std::string_view provider_name(TokenProvider p);

struct AuthToken {
    AppId app = AppId::Unknown;
    TokenProvider provider = TokenProvider::Other;
    std::string token;
    ArtifactSource source;
    std::optional<Instant> expiry_hint;
};

enum class ImageFormat { Jpeg, WebP, Png, Unknown };
std::string_view image_format_name(ImageFormat f);

struct CachedImage {
    AppId app = AppId::Unknown;
    std::optional<std::string> origin_url;
    std::string content_hash;  // SHA-256 hex of the bytes at bytes_ref
    ImageFormat format = ImageFormat::Unknown;
    ArtifactSource bytes_ref;
    std::optional<ArtifactSource> meta_ref;  // Picasso .o file
};

enum class MediaKind { Moment, Photo, PhotoMoment, Url };
std::string_view media_kind_name(MediaKind k);

struct MediaRecord {
    AppId app = AppId::Unknown;
    MediaKind kind = MediaKind::Url;
    std::string media_id;
    std::string owner_user_id;
    std::optional<Instant> created_at;
    std::string text;
    std::vector<std::string> urls;
    Confidence confidence = Confidence::Exact;
    ArtifactSource source;
};

struct EmailRecord {
    AppId app = AppId::Unknown;
    std::string address;
    Confidence confidence = Confidence::Exact;
    ArtifactSource source;
};

struct ActivityMarker {
    AppId app = AppId::Unknown;
    Instant at{};
    std::string label;
    ArtifactSource source;
};

struct DeviceIdentifier {
    AppId app = AppId::Unknown;
    std::string name;  // deviceId, network type, ...
    std::string value;
    ArtifactSource source;
};

struct VolleyMatchEvent {
    std::string match_id;
    bool matched = false;
    Instant occurred_at{};
};

struct VolleyRecord {
    AppId app = AppId::Unknown;
    VolleyMatchEvent event;
    ArtifactSource source;
};

struct CarvedMessagePreview {
    AppId app = AppId::Unknown;
    std::string username;
    std::string profile_pic_url;
    std::string last_message;
    std::string location_suburb;
    ArtifactSource source;
};

/// Row kept verbatim from a table that has no normalized form.
struct RawRow {
    AppId app = AppId::Unknown;
    std::string table;
    std::map<std::string, std::string> fields;
    ArtifactSource source;
};

struct EvidenceBundle {
    std::filesystem::path root;
    std::vector<AppInstall> installs;
    std::map<AppId, std::string> owners;  // owner profile id per app, when known
    std::vector<ChatMessage> messages;
    std::vector<ProfileRecord> profiles;
    std::vector<MatchRecord> matches;
    std::vector<LocationFix> locations;
    std::vector<AuthToken> tokens;
    std::vector<CachedImage> images;
    std::vector<MediaRecord> media;
    std::vector<EmailRecord> emails;
    std::vector<ActivityMarker> activity;
    std::vector<DeviceIdentifier> device_ids;
    std::vector<VolleyRecord> volley;
    std::vector<CarvedMessagePreview> previews;
    std::vector<RawRow> side_rows;
    std::vector<std::string> warnings;
    std::set<std::string> disclosures;  // heuristics that contributed to any artifact
    std::size_t epoch_seconds = 0;       // raw epoch values resolved as seconds
    std::size_t epoch_milliseconds = 0;  // ... and as milliseconds
};

// --- epoch handling -------------------------------------------------------

enum class EpochUnit { Seconds, Milliseconds };
std::string_view epoch_unit_name(EpochUnit u);

struct EpochResolution {
    Instant instant{};
    EpochUnit unit = EpochUnit::Seconds;
};

/// Values above this are milliseconds. 1e11 s is year ~5138, 1e11 ms is 1973.
inline constexpr std::int64_t kMillisecondThreshold = 100'000'000'000;

/// Throws MalformedTimestamp for negative input.
EpochResolution normalize_epoch(std::int64_t raw);

/// "2014-06-19T00:00:00Z", with ".mmm" only when the millisecond part is non-zero.
std::string format_instant(Instant t);
/// Parses the subset produced by format_instant plus fractional seconds and "+00:00".
std::optional<Instant> parse_instant(std::string_view text);
std::string format_date(Instant t);

std::int64_t to_epoch_ms(Instant t);

// --- app registry ---------------------------------------------------------

struct RegistryEntry {
    std::string package;  // directory name under data/data
    AppId app = AppId::Unknown;
    bool extended = false;
};

struct RegistryMatch {
    AppId app = AppId::Unknown;
    bool extended = false;
};

/// Package-name registry: a fixed section of the four documented packages plus
/// an editable extended section loaded from a `package_path<TAB>app_name` file.
class AppRegistry {
public:
    /// Built-in packages plus the default extended entries.
    static AppRegistry defaults();
    /// Built-in packages plus entries from `path` (replacing the default extended section).
    static AppRegistry from_config_file(const std::filesystem::path& path);
    static AppRegistry from_config_text(std::string_view text);

    RegistryMatch lookup(std::string_view package_dir_name) const;
    std::optional<std::string> package_for(AppId app) const;
    const std::vector<RegistryEntry>& entries() const { return entries_; }

private:
    std::vector<RegistryEntry> entries_;
};

/// Case-sensitive exact match against the default registry.
AppId lookup_app(std::string_view package_dir_name);

}  // namespace gsnx
