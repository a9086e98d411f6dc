#include "schema.hpp"

#include <algorithm>

#include "text_util.hpp"

namespace gsnx {

namespace {

using R = ColumnRole;

// Grindr: grindr.db
constexpr ColumnSpec kGrindrBlocks[] = {{"profile", R::ForeignKey}, {"timeStamp", R::Timestamp}, {"isBlocked", R::Flag}};
constexpr ColumnSpec kGrindrBodyTypeField[] = {{"fieldID", R::Id}, {"name", R::Text}};
constexpr ColumnSpec kGrindrBroadcast[] = {{"messageID", R::Id}, {"expirationDate", R::Timestamp}};
constexpr ColumnSpec kGrindrChat[] = {
    {"messageID", R::Id},     {"Source", R::ForeignKey}, {"Target", R::ForeignKey}, {"Timestamp", R::Timestamp},
    {"Type", R::Text},        {"Body", R::Text},         {"Unread", R::Flag},        {"Failed", R::Flag},
};
constexpr ColumnSpec kGrindrEthnicityField[] = {{"fieldID", R::Id}, {"Name", R::Text}};
constexpr ColumnSpec kGrindrFlagReason[] = {{"fieldID", R::Id}, {"Name", R::Text}};
constexpr ColumnSpec kGrindrImageGallery[] = {{"messageID", R::ForeignKey}, {"mediaHash", R::MediaHash}, {"Profile", R::ForeignKey}};
constexpr ColumnSpec kGrindrLookingFor[] = {{"Profile", R::ForeignKey}, {"lookingForId", R::ForeignKey}};
constexpr ColumnSpec kGrindrLookingForField[] = {{"fieldID", R::Id}, {"Name", R::Text}};
constexpr ColumnSpec kGrindrModeration[] = {
    {"messageID", R::Id}, {"Message", R::Text}, {"Type", R::Text}, {"mediaHash", R::MediaHash}, {"Unread", R::Flag},
};
constexpr ColumnSpec kGrindrProfile[] = {
    {"profileID", R::Id},          {"about", R::Text},
    {"age", R::Number},            {"birthdate", R::Timestamp},
    {"isBlocked", R::Flag},        {"isBlocker", R::Flag},
    {"bodyType", R::ForeignKey},   {"children", R::Number},
    {"displayName", R::Text},      {"ethnicity", R::ForeignKey},
    {"weight", R::Number},         {"facebookID", R::Text},
    {"headline", R::Text},         {"headlineDate", R::Timestamp},
    {"height", R::Number},         {"isCurrent", R::Flag},
    {"isFave", R::Flag},           {"Version", R::Text},
    {"profileImageHash", R::MediaHash}, {"relationshipStatus", R::ForeignKey},
    {"showAge", R::Flag},          {"showDistance", R::Flag},
    {"twitterID", R::Text},        {"instagramID", R::Text},
    {"lastSeen", R::Timestamp},    {"profileStatus", R::Unused},
};

// Skout: skout.db
constexpr ColumnSpec kSkoutUsers[] = {
    {"userID", R::Id}, {"userName", R::Text}, {"picUrl", R::Url}, {"userLastMessageID", R::ForeignKey},
    {"lastMessageTimestamp", R::Timestamp},
};
constexpr ColumnSpec kSkoutMessages[] = {
    {"messageID", R::Id},       {"Timestamp", R::Timestamp}, {"fromUserID", R::ForeignKey},
    {"toUserID", R::ForeignKey}, {"chatID", R::ForeignKey},  {"Type", R::Text},
    {"Message", R::Text},       {"addedFrom", R::Unused},    {"messageOrdered", R::Flag},
};

// Tinder: tinder.db
constexpr ColumnSpec kTinderMessages[] = {
    {"User_id", R::ForeignKey}, {"Match_id", R::ForeignKey}, {"Client_created", R::Unused}, {"Created", R::Timestamp},
    {"Has_error", R::Flag},     {"Text", R::Text},           {"Viewed", R::Flag},
};
constexpr ColumnSpec kTinderAnalyticEvents[] = {{"timestamp", R::Timestamp}, {"Name", R::Text}, {"Params", R::Params}};
constexpr ColumnSpec kTinderFacebookFriends[] = {
    {"Id", R::Id}, {"Name", R::Text}, {"Avatar_url", R::Url}, {"State", R::Unused}, {"Tinder", R::ForeignKey},
};
constexpr std::span<const ColumnSpec> kTinderMatchRequests{};
constexpr ColumnSpec kTinderMatches[] = {
    {"Id", R::Id},          {"User_id", R::ForeignKey},   {"Created", R::Timestamp},       {"Last_activity", R::Timestamp},
    {"Server_message_count", R::Unused}, {"Touched", R::Flag}, {"Viewed", R::Flag},          {"User_name", R::Text},
    {"Draft_msg", R::Unused}, {"Reported_for", R::Flag}, {"Gender", R::Number},            {"Following", R::Flag},
};
constexpr ColumnSpec kTinderMomentLikes[] = {
    {"Date", R::Timestamp}, {"Moment_id", R::ForeignKey}, {"Liked_by_id", R::ForeignKey}, {"Thumb_url", R::Url},
    {"Has_been_viewed", R::Flag}, {"Mixed_id", R::Id},    {"By_user_id", R::ForeignKey},
};
constexpr ColumnSpec kTinderMoments[] = {
    {"Id", R::Id},             {"User_id", R::ForeignKey},  {"Created", R::Timestamp}, {"Text", R::Text},
    {"Photo_id", R::ForeignKey}, {"Filter", R::Text},       {"Text_alignment", R::Text}, {"Text_size", R::Number},
    {"Text_height", R::Number}, {"Is_pending", R::Flag},     {"Has_failed", R::Flag},   {"Rated_type", R::Number},
    {"Num_likes", R::Number},
};
constexpr ColumnSpec kTinderPhotos[] = {
    {"Id", R::Id},                 {"User_id", R::ForeignKey},     {"Image_url", R::Url},
    {"Origin_x", R::Number},       {"Origin_y", R::Number},        {"Height", R::Number},
    {"Width", R::Number},          {"Xoffset_percent", R::Number}, {"Yoffset_percent", R::Number},
    {"Xdistance_Percent", R::Number}, {"Ydistance_Percent", R::Number}, {"Photo_order", R::Number},
};
constexpr ColumnSpec kTinderPhotoMoments[] = {
    {"Id", R::Id}, {"Large", R::Url}, {"Med", R::Url}, {"Orig", R::Url}, {"Small", R::Url}, {"thumb", R::Url},
};

constexpr TableSpec kTables[] = {
    {AppId::Grindr, "blocks", kGrindrBlocks},
    {AppId::Grindr, "bodyTypeField", kGrindrBodyTypeField},
    {AppId::Grindr, "broadcast", kGrindrBroadcast},
    {AppId::Grindr, "chat", kGrindrChat},
    {AppId::Grindr, "ethnicityField", kGrindrEthnicityField},
    {AppId::Grindr, "flagReason", kGrindrFlagReason},
    {AppId::Grindr, "imageGallery", kGrindrImageGallery},
    {AppId::Grindr, "lookingFor", kGrindrLookingFor},
    {AppId::Grindr, "lookingForField", kGrindrLookingForField},
    {AppId::Grindr, "moderation", kGrindrModeration},
    {AppId::Grindr, "profile", kGrindrProfile},
    {AppId::Skout, "skoutUsersTable", kSkoutUsers},
    {AppId::Skout, "skoutMessages", kSkoutMessages},
    {AppId::Tinder, "messages", kTinderMessages},
    {AppId::Tinder, "Analytic_Events", kTinderAnalyticEvents},
    {AppId::Tinder, "facebook_friends", kTinderFacebookFriends},
    {AppId::Tinder, "Match_requests", kTinderMatchRequests},
    {AppId::Tinder, "matches", kTinderMatches},
    {AppId::Tinder, "Moment_likes", kTinderMomentLikes},
    {AppId::Tinder, "moments", kTinderMoments},
    {AppId::Tinder, "photos", kTinderPhotos},
    {AppId::Tinder, "photo_moments", kTinderPhotoMoments},
};

}  // namespace

std::string_view column_role_name(ColumnRole r) {
    switch (r) {
        case R::Id: return "id";
        case R::ForeignKey: return "foreign_key";
        case R::Timestamp: return "timestamp";
        case R::Text: return "text";
        case R::Flag: return "flag";
        case R::Number: return "number";
        case R::Url: return "url";
        case R::MediaHash: return "media_hash";
        case R::Params: return "params";
        case R::Unused: return "unused";
    }
    return "unused";
}

SchemaRegistry::SchemaRegistry() : tables_(kTables) {}

const SchemaRegistry& SchemaRegistry::instance() {
    static const SchemaRegistry reg;
    return reg;
}

std::vector<const TableSpec*> SchemaRegistry::tables_for(AppId app) const {
    std::vector<const TableSpec*> out;
    for (const auto& t : tables_) {
        if (t.app == app) out.push_back(&t);
    }
    return out;
}

const TableSpec* SchemaRegistry::find(AppId app, std::string_view table_name) const {
    for (const auto& t : tables_) {
        if (t.app == app && t.table_name == table_name) return &t;
    }
    return nullptr;
}

double column_overlap(const TableSpec& spec, std::span<const std::string> columns) {
    if (spec.columns.empty()) return 1.0;
    std::size_t hit = 0;
    for (const auto& c : spec.columns) {
        const bool present = std::any_of(columns.begin(), columns.end(),
                                         [&](const std::string& have) { return text::iequals(have, c.name); });
        if (present) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(spec.columns.size());
}

TableMatch match_table(AppId app, std::string_view table_name, std::span<const std::string> columns) {
    TableMatch m;
    m.table_name = std::string(table_name);
    const TableSpec* spec = SchemaRegistry::instance().find(app, table_name);
    if (!spec) return m;
    m.column_overlap = column_overlap(*spec, columns);
    if (m.column_overlap >= kColumnOverlapThreshold) m.matched_spec = spec;
    return m;
}

}  // namespace gsnx
