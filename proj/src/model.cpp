#include "model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace gsnx {

namespace {

struct AppNameRow {
    AppId app;
    std::string_view name;
};

constexpr AppNameRow kAppNames[] = {
    {AppId::Badoo, "Badoo"},   {AppId::Grindr, "Grindr"},         {AppId::Skout, "Skout"},
    {AppId::Tinder, "Tinder"}, {AppId::MeetMe, "Meet Me"},        {AppId::Jaumo, "Jaumo"},
    {AppId::FullCircle, "FullCircle"}, {AppId::MiuMeet, "MiuMeet"}, {AppId::Unknown, "Unknown"},
};

// Documented private storage paths.
constexpr std::pair<std::string_view, AppId> kBuiltinPackages[] = {
    {"com.badoo.mobile", AppId::Badoo},
    {"com.grindapp.android", AppId::Grindr},
    {"com.skout.android", AppId::Skout},
    {"com.tinder", AppId::Tinder},
};

// Best-effort identifiers for the remaining apps; editable via the registry config.
constexpr std::string_view kDefaultExtendedConfig =
    "data/data/com.myyearbook.m\tMeet Me\n"
    "data/data/com.jaumo\tJaumo\n"
    "data/data/com.fullcircle.android\tFullCircle\n"
    "data/data/com.miumeet.android\tMiuMeet\n";

std::string squash(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::vector<RegistryEntry> builtin_entries() {
    std::vector<RegistryEntry> out;
    for (auto [pkg, app] : kBuiltinPackages) out.push_back({std::string(pkg), app, false});
    return out;
}

}  // namespace

std::string_view app_name(AppId app) {
    for (const auto& row : kAppNames) {
        if (row.app == app) return row.name;
    }
    return "Unknown";
}

AppId parse_app_name(std::string_view name) {
    const std::string key = squash(name);
    if (key.empty()) return AppId::Unknown;
    for (const auto& row : kAppNames) {
        if (squash(row.name) == key) return row.app;
    }
    if (key == "blendr") return AppId::Badoo;
    if (key == "muimeet") return AppId::MiuMeet;
    return AppId::Unknown;
}

std::string_view file_kind_name(FileKind kind) {
    switch (kind) {
        case FileKind::SqliteDb: return "SqliteDb";
        case FileKind::PrefsXml: return "PrefsXml";
        case FileKind::Jpeg: return "Jpeg";
        case FileKind::WebP: return "WebP";
        case FileKind::Png: return "Png";
        case FileKind::Json: return "Json";
        case FileKind::PicassoMeta: return "PicassoMeta";
        case FileKind::Opaque: return "Opaque";
    }
    return "Opaque";
}

std::string_view direction_name(Direction d) {
    switch (d) {
        case Direction::Inbound: return "inbound";
        case Direction::Outbound: return "outbound";
        case Direction::Unknown: return "unknown";
    }
    return "unknown";
}

std::string_view provider_name(TokenProvider p) {
    switch (p) {
        case TokenProvider::Facebook: return "Facebook";
        case TokenProvider::Grindr: return "Grindr";
        case TokenProvider::Tinder: return "Tinder";
        case TokenProvider::MiuMeet: return "MiuMeet";
        case TokenProvider::Other: return "Other";
    }
    return "Other";
}

std::string_view image_format_name(ImageFormat f) {
    switch (f) {
        case ImageFormat::Jpeg: return "JPEG";
        case ImageFormat::WebP: return "WebP";
        case ImageFormat::Png: return "PNG";
        case ImageFormat::Unknown: return "unknown";
    }
    return "unknown";
}

std::string_view media_kind_name(MediaKind k) {
    switch (k) {
        case MediaKind::Moment: return "moment";
        case MediaKind::Photo: return "photo";
        case MediaKind::PhotoMoment: return "photo_moment";
        case MediaKind::Url: return "url";
    }
    return "url";
}

std::string_view epoch_unit_name(EpochUnit u) {
    return u == EpochUnit::Seconds ? "seconds" : "milliseconds";
}

EpochResolution normalize_epoch(std::int64_t raw) {
    if (raw < 0) throw MalformedTimestamp("negative epoch value " + std::to_string(raw));
    using std::chrono::milliseconds;
    if (raw > kMillisecondThreshold) return {Instant{milliseconds{raw}}, EpochUnit::Milliseconds};
    return {Instant{milliseconds{raw * 1000}}, EpochUnit::Seconds};
}

std::int64_t to_epoch_ms(Instant t) { return t.time_since_epoch().count(); }

std::string format_instant(Instant t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const auto ms_of_day = (t - day).count();
    const auto secs = ms_of_day / 1000;
    const auto ms = ms_of_day % 1000;
    char buf[48];
    if (ms == 0) {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", int(ymd.year()),
                      unsigned(ymd.month()), unsigned(ymd.day()), static_cast<long long>(secs / 3600),
                      static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60));
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ", int(ymd.year()),
                      unsigned(ymd.month()), unsigned(ymd.day()), static_cast<long long>(secs / 3600),
                      static_cast<long long>(secs / 60 % 60), static_cast<long long>(secs % 60),
                      static_cast<long long>(ms));
    }
    return buf;
}

std::string format_date(Instant t) {
    return format_instant(t).substr(0, 10);
}

std::optional<Instant> parse_instant(std::string_view s) {
    using namespace std::chrono;
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
        if (pos + len > s.size()) return std::nullopt;
        int v = 0;
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
        if (ec != std::errc{} || p != s.data() + pos + len) return std::nullopt;
        return v;
    };
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    auto y = num(0, 4), mo = num(5, 2), d = num(8, 2);
    if (!y || !mo || !d) return std::nullopt;
    year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;
    Instant out{sys_days{ymd}};
    if (s.size() == 10) return out;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto h = num(11, 2), mi = num(14, 2), se = num(17, 2);
    if (!h || !mi || !se || s[13] != ':' || s[16] != ':' || *h > 23 || *mi > 59 || *se > 60)
        return std::nullopt;
    out += hours{*h} + minutes{*mi} + seconds{*se};
    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        int digits = 0;
        int ms = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            if (digits < 3) ms = ms * 10 + (s[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0) return std::nullopt;
        for (int i = digits; i < 3; ++i) ms *= 10;
        out += milliseconds{ms};
    }
    const auto rest = s.substr(pos);
    if (rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000") return out;
    return std::nullopt;
}

// --- registry ---------------------------------------------------------------

AppRegistry AppRegistry::defaults() { return from_config_text(kDefaultExtendedConfig); }

AppRegistry AppRegistry::from_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read registry config " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_config_text(ss.str());
}

AppRegistry AppRegistry::from_config_text(std::string_view text) {
    AppRegistry reg;
    reg.entries_ = builtin_entries();
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos)
            throw UsageError("registry config line " + std::to_string(line_no) + ": expected package_path<TAB>app_name");
        std::string_view package_path = line.substr(0, tab);
        while (!package_path.empty() && package_path.back() == '/') package_path.remove_suffix(1);
        const auto slash = package_path.rfind('/');
        const std::string package(slash == std::string_view::npos ? package_path : package_path.substr(slash + 1));
        const AppId app = parse_app_name(line.substr(tab + 1));
        if (package.empty() || app == AppId::Unknown)
            throw UsageError("registry config line " + std::to_string(line_no) + ": unknown app or empty package");
        const bool clash = std::any_of(reg.entries_.begin(), reg.entries_.end(), [&](const RegistryEntry& e) {
            return e.package == package || e.app == app;
        });
        if (clash)
            throw UsageError("registry config line " + std::to_string(line_no) + ": package or app already registered");
        reg.entries_.push_back({package, app, true});
    }
    return reg;
}

RegistryMatch AppRegistry::lookup(std::string_view package_dir_name) const {
    for (const auto& e : entries_) {
        if (e.package == package_dir_name) return {e.app, e.extended};
    }
    return {};
}

std::optional<std::string> AppRegistry::package_for(AppId app) const {
    for (const auto& e : entries_) {
        if (e.app == app) return e.package;
    }
    return std::nullopt;
}

AppId lookup_app(std::string_view package_dir_name) {
    static const AppRegistry reg = AppRegistry::defaults();
    return reg.lookup(package_dir_name).app;
}

}  // namespace gsnx
