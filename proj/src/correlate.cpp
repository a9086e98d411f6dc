#include "correlate.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "text_util.hpp"

namespace gsnx {

std::string_view event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Message: return "message";
        case EventKind::Match: return "match";
        case EventKind::Moment: return "moment";
        case EventKind::Location: return "location";
        case EventKind::TokenActivity: return "token_activity";
        case EventKind::LastActive: return "last_active";
    }
    return "message";
}

namespace {

std::string clip(std::string_view s, std::size_t n = 60) {
    if (s.size() <= n) return std::string(s);
    return std::string(s.substr(0, n)) + "...";
}

std::string fmt_coord(double v) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << v;
    return os.str();
}

}  // namespace

std::vector<TimelineEvent> build_timeline(const EvidenceBundle& bundle, std::span<const LeakFinding> findings,
                                          std::span<const HttpTransaction> transactions) {
    std::vector<TimelineEvent> ev;
    for (const auto& m : bundle.messages) {
        std::string who = !m.sender_id.empty() ? m.sender_id + " -> " + m.recipient_id : "with " + m.counterpart_id;
        ev.push_back({m.sent_at, EventKind::Message, m.app,
                      "message " + who + ": " + (m.body_is_media ? std::string("[media]") : clip(m.body)), {m.source}});
    }
    for (const auto& m : bundle.matches) {
        ev.push_back({m.created_at, EventKind::Match, m.app, "match " + m.match_id + " with " + m.counterpart_user_id,
                      {m.source}});
    }
    for (const auto& v : bundle.volley) {
        ev.push_back({v.event.occurred_at, EventKind::Match, v.app,
                      "cached match event " + v.event.match_id + (v.event.matched ? " (matched)" : ""), {v.source}});
    }
    for (const auto& m : bundle.media) {
        if ((m.kind == MediaKind::Moment || m.kind == MediaKind::PhotoMoment) && m.created_at) {
            ev.push_back({*m.created_at, EventKind::Moment, m.app, "moment " + m.media_id + ": " + clip(m.text), {m.source}});
        }
    }
    for (const auto& l : bundle.locations) {
        if (!l.at) continue;
        std::string what = l.precision == Precision::Exact ? fmt_coord(l.lat) + "," + fmt_coord(l.lon)
                           : l.precision == Precision::Suburb ? l.suburb
                                                              : l.country + "/" + l.state;
        ev.push_back({*l.at, EventKind::Location, l.app, "location " + what, {l.source}});
    }
    for (const auto& a : bundle.activity) {
        ev.push_back({a.at, EventKind::LastActive, a.app, a.label, {a.source}});
    }
    for (const auto& f : findings) {
        if (f.category != LeakCategory::TokenInTransit) continue;
        if (f.evidence.transaction_index >= transactions.size()) continue;
        const auto& t = transactions[f.evidence.transaction_index];
        ArtifactSource ref;
        ref.file_path = "http-log";
        ref.detail = "transaction #" + std::to_string(t.index);
        ev.push_back({t.at, EventKind::TokenActivity, f.app, f.description, {ref}});
    }
    std::stable_sort(ev.begin(), ev.end(), [](const TimelineEvent& a, const TimelineEvent& b) {
        if (a.at != b.at) return a.at < b.at;
        if (a.app != b.app) return a.app < b.app;
        return a.kind < b.kind;
    });
    return ev;
}

std::vector<ImageLink> link_profile_images(const EvidenceBundle& bundle) {
    std::vector<ImageLink> out;
    for (const auto& p : bundle.profiles) {
        for (std::size_t i = 0; i < bundle.images.size(); ++i) {
            const auto& img = bundle.images[i];
            if (img.app != p.app || !img.origin_url) continue;
            std::string reason;
            if (p.image_hash && !p.image_hash->empty() && img.origin_url->find(*p.image_hash) != std::string::npos)
                reason = "image_hash";
            else if (p.picture_url && *p.picture_url == *img.origin_url)
                reason = "picture_url";
            if (reason.empty()) continue;
            out.push_back({p.app, p.profile_id, i, img.content_hash, *img.origin_url, reason});
        }
    }
    return out;
}

std::string format_identity(const Identity& id) { return std::string(app_name(id.app)) + ":" + id.profile_id; }

Identity parse_identity(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == s.size())
        throw UsageError("identity must be app:profile_id, got '" + std::string(s) + "'");
    Identity id;
    id.app = parse_app_name(text::trim(s.substr(0, colon)));
    if (id.app == AppId::Unknown) throw UsageError("unknown app in identity '" + std::string(s) + "'");
    id.profile_id = text::trim(s.substr(colon + 1));
    return id;
}

IdentityMap IdentityMap::parse(std::string_view text) {
    IdentityMap m;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string line = text::trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("identity map line " + std::to_string(line_no) + ": expected app:id=app:id");
        try {
            m.assert_equivalent(parse_identity(line.substr(0, eq)), parse_identity(line.substr(eq + 1)));
        } catch (const UsageError& e) {
            throw UsageError("identity map line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return m;
}

IdentityMap IdentityMap::from_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw UsageError("cannot read identity map " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str());
}

Identity IdentityMap::canonical(const Identity& id) const {
    Identity cur = id;
    for (auto it = parent_.find(cur); it != parent_.end() && !(it->second == cur); it = parent_.find(cur))
        cur = it->second;
    return cur;
}

void IdentityMap::assert_equivalent(const Identity& a, const Identity& b) {
    const Identity ra = canonical(a);
    const Identity rb = canonical(b);
    if (ra == rb) return;
    // smaller identity becomes the representative so the result is order independent
    if (ra < rb) parent_[rb] = ra;
    else parent_[ra] = rb;
}

std::optional<ContactEvidence> contact_evidence(const EvidenceBundle& bundle, const Identity& a, const Identity& b,
                                                std::optional<Instant> before, const IdentityMap& identities) {
    const Identity ca = identities.canonical(a);
    const Identity cb = identities.canonical(b);
    if (ca == cb) return std::nullopt;

    auto owner_of = [&](AppId app) -> std::string {
        auto it = bundle.owners.find(app);
        return it == bundle.owners.end() ? std::string() : it->second;
    };
    auto links = [&](AppId app, std::initializer_list<std::string> ids) {
        std::set<Identity> who;
        for (const auto& id : ids) {
            if (!id.empty()) who.insert(identities.canonical({app, id}));
        }
        return who.count(ca) && who.count(cb);
    };

    ContactEvidence ce;
    ce.identity_a = a;
    ce.identity_b = b;
    bool any = false;
    auto note = [&](Instant at, const ArtifactSource& src) {
        if (!any || at < ce.first_contact) ce.first_contact = at;
        if (!any || at > ce.last_contact) ce.last_contact = at;
        any = true;
        ce.supporting.push_back(src);
    };

    for (const auto& m : bundle.messages) {
        if (before && !(m.sent_at < *before)) continue;
        const bool linked = !m.sender_id.empty() || !m.recipient_id.empty()
                                ? links(m.app, {m.sender_id, m.recipient_id})
                                : links(m.app, {owner_of(m.app), m.counterpart_id});
        if (!linked) continue;
        ++ce.message_count;
        note(m.sent_at, m.source);
    }
    for (const auto& m : bundle.matches) {
        if (before && !(m.created_at < *before)) continue;
        if (!links(m.app, {owner_of(m.app), m.counterpart_user_id})) continue;
        ++ce.match_count;
        note(m.created_at, m.source);
    }
    if (!any) return std::nullopt;
    return ce;
}

std::vector<HistoryEntry> location_history(const EvidenceBundle& bundle) {
    std::vector<HistoryEntry> out;
    for (const auto& l : bundle.locations) {
        if (l.subject_profile) continue;
        out.push_back({l, !l.at.has_value()});
    }
    std::stable_sort(out.begin(), out.end(), [](const HistoryEntry& a, const HistoryEntry& b) {
        if (a.untimed != b.untimed) return !a.untimed;
        if (a.untimed) return false;
        return *a.fix.at < *b.fix.at;
    });
    return out;
}

}  // namespace gsnx
