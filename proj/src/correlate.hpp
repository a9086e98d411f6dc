#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"
#include "netleak.hpp"

namespace gsnx {

enum class EventKind { Message, Match, Moment, Location, TokenActivity, LastActive };
std::string_view event_kind_name(EventKind k);

struct TimelineEvent {
    Instant at{};
    EventKind kind = EventKind::Message;
    AppId app = AppId::Unknown;
    std::string summary;
    std::vector<ArtifactSource> refs;
};

/// Ordered by (at, app, kind); ties keep bundle order. TokenInTransit findings add token_activity
/// events when their transactions are supplied.
std::vector<TimelineEvent> build_timeline(const EvidenceBundle& bundle, std::span<const LeakFinding> findings = {},
                                          std::span<const HttpTransaction> transactions = {});

struct ImageLink {
    AppId app = AppId::Unknown;
    std::string profile_id;
    std::size_t image_index = 0;  // into bundle.images
    std::string content_hash;
    std::string origin_url;
    std::string reason;  // "image_hash" or "picture_url"
};

std::vector<ImageLink> link_profile_images(const EvidenceBundle& bundle);

struct Identity {
    AppId app = AppId::Unknown;
    std::string profile_id;
    auto operator<=>(const Identity&) const = default;
};

std::string format_identity(const Identity& id);
/// "App:profile_id"; throws UsageError on a missing separator or unknown app.
Identity parse_identity(std::string_view text);

/// Analyst-asserted equivalences between identities on different apps.
class IdentityMap {
public:
    /// Lines `app:profile_id=app:profile_id`; '#' comments and blank lines ignored.
    /// Throws UsageError naming the offending line.
    static IdentityMap parse(std::string_view text);
    static IdentityMap from_file(const std::string& path);

    void assert_equivalent(const Identity& a, const Identity& b);
    Identity canonical(const Identity& id) const;

private:
    std::map<Identity, Identity> parent_;
};

struct ContactEvidence {
    Identity identity_a;
    Identity identity_b;
    Instant first_contact{};
    Instant last_contact{};
    std::size_t message_count = 0;
    std::size_t match_count = 0;
    std::vector<ArtifactSource> supporting;
};

/// Messages and matches linking a and b, restricted to at < before when given.
std::optional<ContactEvidence> contact_evidence(const EvidenceBundle& bundle, const Identity& a, const Identity& b,
                                                std::optional<Instant> before = std::nullopt,
                                                const IdentityMap& identities = {});

struct HistoryEntry {
    LocationFix fix;
    bool untimed = false;
};

/// Owner fixes ordered by time; untimed fixes last, flagged.
std::vector<HistoryEntry> location_history(const EvidenceBundle& bundle);

}  // namespace gsnx
