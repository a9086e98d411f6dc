#include "tokens.hpp"

#include <json.hpp>

#include "errors.hpp"

namespace gsnx {

std::string percent_encode(std::string_view s) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (unsigned char c : s) {
        const bool unreserved = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                                c == '-' || c == '.' || c == '_' || c == '~';
        if (unreserved) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(kHex[c >> 4]);
            out.push_back(kHex[c & 0xF]);
        }
    }
    return out;
}

std::string build_graph_request(const AuthToken& token) {
    if (token.provider != TokenProvider::Facebook)
        throw NotApplicable(std::string(provider_name(token.provider)) + " tokens have no Graph endpoint");
    if (token.token.empty()) throw Error(ErrorCode::InvalidArgument, "empty token");
    return std::string(kGraphMePrefix) + percent_encode(token.token);
}

TokenAssessment classify_token(const AuthToken& token, std::span<const AuthToken> peers) {
    TokenAssessment a;
    a.token = token;
    if (token.provider == TokenProvider::Facebook) {
        if (!token.token.empty()) a.graph_url = build_graph_request(token);
        a.risk_notes.push_back(
            "Facebook token: links this app account to a Facebook identity; Graph lookup of the account holder possible");
    } else {
        a.risk_notes.push_back(std::string(provider_name(token.provider)) +
                               " token: grants access to the app account while unexpired");
    }
    for (const auto& p : peers) {
        if (p.token == token.token && p.app != token.app) {
            a.risk_notes.push_back("same token value also recovered from " + std::string(app_name(p.app)) + " (" +
                                   p.source.file_path + ")");
        }
    }
    return a;
}

std::vector<TokenAssessment> classify_tokens(std::span<const AuthToken> tokens) {
    std::vector<TokenAssessment> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(classify_token(t, tokens));
    return out;
}

TransportResponse RefusalTransport::request(const std::string&) {
    throw Error(ErrorCode::OnlineCheckFailed, std::string(kOnlineCheckDisabledNote));
}

std::string_view verify_status_name(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::Verified: return "verified";
        case VerifyStatus::Disabled: return "disabled";
        case VerifyStatus::NotApplicable: return "not_applicable";
        case VerifyStatus::Rejected: return "rejected";
        case VerifyStatus::OnlineCheckFailed: return "online_check_failed";
    }
    return "disabled";
}

VerifyOutcome verify_token(const AuthToken& token, Transport& transport, bool online_allowed) {
    VerifyOutcome out;
    if (!online_allowed) {
        out.status = VerifyStatus::Disabled;
        out.note = std::string(kOnlineCheckDisabledNote);
        return out;
    }
    if (dynamic_cast<RefusalTransport*>(&transport)) {
        out.status = VerifyStatus::Disabled;
        out.note = std::string(kOnlineCheckDisabledNote);
        return out;
    }
    std::string url;
    try {
        url = build_graph_request(token);
    } catch (const Error& e) {
        out.status = VerifyStatus::NotApplicable;
        out.note = e.what();
        return out;
    }
    TransportResponse resp;
    try {
        resp = transport.request(url);
    } catch (const std::exception& e) {
        out.status = VerifyStatus::OnlineCheckFailed;
        out.note = std::string("online check failed: ") + e.what();
        return out;
    }
    if (resp.status != 200) {
        out.status = VerifyStatus::Rejected;
        out.note = "online check failed: HTTP " + std::to_string(resp.status);
        return out;
    }
    auto j = nlohmann::json::parse(resp.body, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id")) {
        out.status = VerifyStatus::OnlineCheckFailed;
        out.note = "online check failed: unexpected response body";
        return out;
    }
    VerifiedIdentity id;
    const auto& jid = j["id"];
    id.account_id = jid.is_string() ? jid.get<std::string>() : jid.dump();
    if (j.contains("name") && j["name"].is_string()) id.name = j["name"].get<std::string>();
    out.status = VerifyStatus::Verified;
    out.identity = std::move(id);
    out.note = "verified";
    return out;
}

}  // namespace gsnx
