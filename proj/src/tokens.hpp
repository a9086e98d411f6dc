#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "model.hpp"

namespace gsnx {

inline constexpr std::string_view kGraphMePrefix = "https://graph.facebook.com/me?access_token=";

/// RFC 3986 percent-encoding; only unreserved characters pass through.
std::string percent_encode(std::string_view s);

/// Throws InvalidArgument-coded Error on an empty token, NotApplicable for non-Facebook providers.
std::string build_graph_request(const AuthToken& token);

struct VerifiedIdentity {
    std::string name;
    std::string account_id;
};

struct TokenAssessment {
    AuthToken token;
    std::optional<std::string> graph_url;
    std::vector<std::string> risk_notes;
    std::optional<VerifiedIdentity> verified_identity;
};

/// `peers` is the full token set, used to flag identical values recovered from other apps.
TokenAssessment classify_token(const AuthToken& token, std::span<const AuthToken> peers = {});
std::vector<TokenAssessment> classify_tokens(std::span<const AuthToken> tokens);

struct TransportResponse {
    int status = 0;
    std::string body;
};

/// request(url) -> (status, body). Implementations may throw on transport failure.
class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportResponse request(const std::string& url) = 0;
};

/// Default transport: never touches the network.
class RefusalTransport final : public Transport {
public:
    TransportResponse request(const std::string& url) override;
};

/// Adapter for callables (tests, the C API callback hook).
class FunctionTransport final : public Transport {
public:
    explicit FunctionTransport(std::function<TransportResponse(const std::string&)> fn) : fn_(std::move(fn)) {}
    TransportResponse request(const std::string& url) override { return fn_(url); }

private:
    std::function<TransportResponse(const std::string&)> fn_;
};

enum class VerifyStatus { Verified, Disabled, NotApplicable, Rejected, OnlineCheckFailed };
std::string_view verify_status_name(VerifyStatus s);

struct VerifyOutcome {
    VerifyStatus status = VerifyStatus::Disabled;
    std::optional<VerifiedIdentity> identity;
    std::string note;
};

inline constexpr std::string_view kOnlineCheckDisabledNote = "online check disabled";

/// Calls `transport` only when `online_allowed`; never throws.
VerifyOutcome verify_token(const AuthToken& token, Transport& transport, bool online_allowed);

}  // namespace gsnx
