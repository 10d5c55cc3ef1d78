#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "debunk/llm_client.hpp"

namespace debunk {

struct HttpBackendConfig {
    /// Base URL, e.g. "http://localhost:8000" or "https://host/openai/v1".
    std::string url;
    /// Bearer token; empty sends no Authorization header.
    std::string api_key;
    std::chrono::seconds timeout{300};
};

/// OpenAI-compatible POST {base}/v1/chat/completions. A base that already
/// ends in "/v1" gets only "/chat/completions" appended.
class HttpBackend final : public ChatBackend {
public:
    explicit HttpBackend(HttpBackendConfig cfg);

    std::string url() const override { return cfg_.url; }
    BackendReply complete(const ChatRequest& req, const std::string& body) override;

    const std::string& endpoint_path() const noexcept { return path_; }

private:
    HttpBackendConfig cfg_;
    std::string scheme_host_port_;
    std::string path_;
};

/// Parses an OpenAI chat-completions response body. Throws FatalBackendError
/// on any structural problem.
BackendReply parse_chat_completion(const std::string& body);

}  // namespace debunk
