#include "debunk/mock_backend.hpp"

#include <algorithm>

#include "debunk/digest.hpp"
#include "debunk/errors.hpp"

namespace debunk {

namespace {

constexpr std::string_view kTailorTraitsLead = "the following personality traits: ";
constexpr std::string_view kJudgeLead = "You are a character who is ";
constexpr std::string_view kClaimLead = "Claim: ";
constexpr std::string_view kVerdictLead = "\n\nVerdict: ";
constexpr std::string_view kJudgeVerdictLead = "\n\nVerdict to Evaluate: ";
constexpr std::string_view kScoreLead = "\n\nYour score:";

std::string_view between(std::string_view text, std::string_view lead, std::string_view tail, const char* what) {
    const auto a = text.find(lead);
    if (a == std::string_view::npos) throw FatalBackendError(std::string("mock: cannot find ") + what + " in prompt");
    const auto start = a + lead.size();
    const auto b = tail.empty() ? text.size() : text.find(tail, start);
    if (b == std::string_view::npos) throw FatalBackendError(std::string("mock: unterminated ") + what + " in prompt");
    return text.substr(start, b - start);
}

const std::string& system_of(const ChatRequest& req) {
    if (req.messages.empty() || req.messages.front().role != Role::System) {
        throw FatalBackendError("mock: request has no leading system message");
    }
    return req.messages.front().content;
}

const std::string& user_of(const ChatRequest& req) {
    for (const auto& m : req.messages) {
        if (m.role == Role::User) return m.content;
    }
    throw FatalBackendError("mock: request has no user message");
}

TraitProfile parse_traits(std::string_view text) {
    auto p = profile_from_descriptors(text);
    if (!p) throw FatalBackendError("mock: unrecognized trait list \"" + std::string(text) + "\"");
    return *p;
}

std::string echo_tailor(const ChatRequest& req) {
    const auto& system = system_of(req);
    const auto profile = parse_traits(between(system, kTailorTraitsLead, ".\n\n", "trait list"));
    const auto& user = user_of(req);
    const auto at = user.rfind(kVerdictLead);
    if (at == std::string::npos) throw FatalBackendError("mock: cannot find verdict in tailoring prompt");
    return profile_marker(profile) + user.substr(at + kVerdictLead.size());
}

std::string distance_judge(const ChatRequest& req, bool jitter_on) {
    const auto& system = system_of(req);
    if (system.rfind(kJudgeLead, 0) != 0 || system.empty() || system.back() != '.') {
        throw FatalBackendError("mock: system prompt is not a judge persona");
    }
    const auto judge = parse_traits(std::string_view(system).substr(kJudgeLead.size(),
                                                                     system.size() - kJudgeLead.size() - 1));
    const auto& user = user_of(req);
    const auto claim = between(user, kClaimLead, kJudgeVerdictLead, "claim");
    const auto verdict = between(user, kJudgeVerdictLead, kScoreLead, "verdict");
    const int jitter = jitter_on ? judge_jitter(judge, claim) : 0;
    const auto target = find_profile_marker(verdict);
    const int base = target ? 7 - hamming(judge, *target) : 2;
    return std::to_string(std::clamp(base + jitter, 1, 7));
}

}  // namespace

std::string profile_marker(TraitProfile p) {
    return "[P:" + p.code() + "] ";
}

std::optional<TraitProfile> find_profile_marker(std::string_view text) {
    for (auto pos = text.find("[P:"); pos != std::string_view::npos; pos = text.find("[P:", pos + 1)) {
        if (pos + 9 <= text.size() && text[pos + 8] == ']') {
            if (auto p = TraitProfile::try_from_code(text.substr(pos + 3, 5))) return p;
        }
    }
    return std::nullopt;
}

int judge_jitter(TraitProfile judge, std::string_view claim) {
    std::string key = "jitter|" + judge.code() + "|";
    key += claim;
    return static_cast<int>(digest_u64(key) % 3) - 1;
}

ChatResponse mock_chat(const ChatRequest& req, const MockConfig& cfg) {
    auto rule = cfg.rule;
    if (rule == MockRule::Auto) {
        const auto& system = system_of(req);
        rule = system.rfind(kJudgeLead, 0) == 0 ? MockRule::DistanceJudge : MockRule::EchoTailor;
    }
    ChatResponse r;
    r.content = rule == MockRule::EchoTailor ? echo_tailor(req) : distance_judge(req, cfg.jitter);
    r.raw_content = r.content;
    r.model_id = req.model_id;
    return r;
}

std::string MockBackend::url() const {
    std::string rule = cfg_.rule == MockRule::EchoTailor      ? "echo-tailor"
                       : cfg_.rule == MockRule::DistanceJudge ? "distance-judge"
                                                              : "auto";
    return "mock://" + rule + (cfg_.jitter ? "?jitter=on" : "?jitter=off");
}

BackendReply MockBackend::complete(const ChatRequest& req, const std::string&) {
    auto r = mock_chat(req, cfg_);
    return {r.content, r.model_id, std::nullopt};
}

}  // namespace debunk
