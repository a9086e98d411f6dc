#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "model.hpp"

namespace gsnx {

enum class PrefsType { String, Int, Long, Boolean, Float };
std::string_view prefs_type_name(PrefsType t);

struct PrefsValue {
    PrefsType type = PrefsType::String;
    std::string text;  // verbatim
    std::variant<std::string, std::int64_t, bool, double> parsed;
};

struct PrefsDocument {
    ArtifactSource source;
    std::map<std::string, PrefsValue> entries;
    std::vector<std::string> warnings;
};

/// Android shared_prefs dialect: a root <map> of typed children.
/// Throws PrefsParseError (with byte offset) on malformed XML or a non-<map> root.
PrefsDocument parse_prefs_xml(std::span<const std::uint8_t> bytes, ArtifactSource source = {});
PrefsDocument parse_prefs_xml(std::string_view text, ArtifactSource source = {});

struct PrefsFindings {
    std::vector<AuthToken> tokens;
    std::vector<LocationFix> locations;
    std::vector<std::string> emails;
    std::optional<EpochResolution> last_active;
    std::optional<std::string> owner_id;
    std::vector<std::string> warnings;
    std::set<std::string> disclosures;
};

inline constexpr std::string_view kFacebookTokenCacheFile = "com.facebook.SharedPreferencesTokenCachingStrategy.DEFAULT_KEY.xml";
inline constexpr std::string_view kFacebookWebViewTokenFile = "com.facebook.AuthorizationClient.WebViewAuthHandler.TOKEN_STORE_KEY.xml";

inline constexpr std::string_view kDisclosureLatLonKeys =
    "prefs latitude/longitude located by key substring (lat, lon, lng) with in-range decimal values";
inline constexpr std::string_view kDisclosureFacebookTokenKey =
    "Facebook token taken from the longest string value whose key contains 'token'";
inline constexpr std::string_view kDisclosureOwnerFromPrefs =
    "owner profile id taken from a prefs key containing 'user' and 'id'";

/// Pure given (doc, app). Unknown apps get only the Facebook token file rules.
PrefsFindings extract_known_prefs(const PrefsDocument& doc, AppId app);

}  // namespace gsnx
