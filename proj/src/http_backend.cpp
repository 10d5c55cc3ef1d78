#include "debunk/http_backend.hpp"

#include <httplib.h>

#include "debunk/errors.hpp"

namespace debunk {

namespace {

std::string excerpt(const std::string& s, std::size_t n = 300) {
    return s.size() <= n ? s : s.substr(0, n) + "...";
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.url.find("://");
    if (scheme_end == std::string::npos) throw InputError("backend.url must include a scheme: " + cfg_.url);
    const auto path_start = cfg_.url.find('/', scheme_end + 3);
    scheme_host_port_ = cfg_.url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : cfg_.url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    const bool has_v1 = prefix.size() >= 3 && prefix.compare(prefix.size() - 3, 3, "/v1") == 0;
    path_ = prefix + (has_v1 ? "/chat/completions" : "/v1/chat/completions");
}

BackendReply HttpBackend::complete(const ChatRequest&, const std::string& body) {
    httplib::Client cli(scheme_host_port_);
    cli.set_connection_timeout(std::chrono::seconds(30));
    cli.set_read_timeout(cfg_.timeout);
    cli.set_write_timeout(cfg_.timeout);
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    auto res = cli.Post(path_, headers, body, "application/json");
    if (!res) {
        throw TransientError("HTTP request to " + scheme_host_port_ + path_ + " failed: " + httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 429 || status >= 500) {
        throw TransientError("HTTP " + std::to_string(status) + ": " + excerpt(res->body));
    }
    if (status < 200 || status >= 300) {
        throw FatalBackendError("HTTP " + std::to_string(status) + ": " + excerpt(res->body));
    }
    return parse_chat_completion(res->body);
}

BackendReply parse_chat_completion(const std::string& body) {
    Json j;
    try {
        j = Json::parse(body);
    } catch (const Json::parse_error&) {
        throw FatalBackendError("malformed response (not JSON): " + excerpt(body));
    }
    try {
        const auto& choices = j.at("choices");
        if (!choices.is_array() || choices.empty()) throw FatalBackendError("malformed response (no choices): " + excerpt(body));
        const auto& content = choices.at(0).at("message").at("content");
        BackendReply r;
        r.content = content.is_null() ? std::string() : content.get<std::string>();
        r.model_id = j.value("model", std::string());
        if (j.contains("usage") && j["usage"].is_object()) {
            const auto& u = j["usage"];
            r.usage = Usage{u.value("prompt_tokens", 0), u.value("completion_tokens", 0), u.value("total_tokens", 0)};
        }
        return r;
    } catch (const Json::exception& e) {
        throw FatalBackendError(std::string("malformed response (") + e.what() + "): " + excerpt(body));
    }
}

}  // namespace debunk
