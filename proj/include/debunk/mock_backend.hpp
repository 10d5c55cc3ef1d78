#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "debunk/llm_client.hpp"
#include "debunk/persona.hpp"

namespace debunk {

/// Deterministic offline stand-ins for the two model roles.
///  - EchoTailor: answers a tailoring prompt with "[P:<code>] " + the generic
///    verdict, where <code> is recovered from the system prompt descriptors.
///  - DistanceJudge: answers a judge prompt with
///    clamp(7 - hamming(judge, target) + jitter, 1, 7), or clamp(2 + jitter)
///    for an unmarked (generic) verdict. jitter in {-1, 0, +1} is a digest
///    function of (judge, claim) and can be switched off.
///  - Auto: picks one of the above from the system prompt.
enum class MockRule { EchoTailor, DistanceJudge, Auto };

struct MockConfig {
    MockRule rule = MockRule::Auto;
    bool jitter = true;
};

/// The marker the echo-tailor rule prepends, e.g. "[P:10101] ".
std::string profile_marker(TraitProfile p);

/// First "[P:xxxxx]" marker in `text`, if any.
std::optional<TraitProfile> find_profile_marker(std::string_view text);

/// Stable jitter in {-1, 0, +1} for a (judge, claim) pair.
int judge_jitter(TraitProfile judge, std::string_view claim);

/// Computes the mock reply for `req`. Throws FatalBackendError when the
/// request does not have the structure the rule expects.
ChatResponse mock_chat(const ChatRequest& req, const MockConfig& cfg);

class MockBackend final : public ChatBackend {
public:
    explicit MockBackend(MockConfig cfg = {}) : cfg_(cfg) {}

    std::string url() const override;
    BackendReply complete(const ChatRequest& req, const std::string& body) override;

private:
    MockConfig cfg_;
};

}  // namespace debunk
