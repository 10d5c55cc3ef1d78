#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "debunk/jsonl.hpp"
#include "debunk/response_cache.hpp"

namespace debunk {

enum class Role { System, User };

struct ChatMessage {
    Role role;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

/// Sampling temperatures of the two phases.
inline constexpr double kGenerationTemperature = 0.7;
inline constexpr double kEvaluationTemperature = 0.0;

struct ChatRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    std::optional<int> max_tokens;

    /// One leading system message followed by user messages; temperature >= 0.
    void validate() const;

    static ChatRequest from_prompt(std::string model_id, std::string system, std::string user, double temperature);
};

struct ChatResponse {
    std::string content;      // reasoning blocks stripped
    std::string raw_content;  // as returned by the backend
    std::string model_id;
    std::optional<Usage> usage;
    bool cached = false;
    int retries = 0;
};

/// The exact JSON body sent to an OpenAI-compatible endpoint: model, messages,
/// temperature, and max_tokens when set. Nothing else.
OrderedJson request_body(const ChatRequest& req);

/// SHA-256 over (backend URL, serialized request body).
std::string cache_key(std::string_view backend_url, const ChatRequest& req);

/// Removes every <think>...</think> block. An unterminated opening tag
/// discards the rest of the text.
std::string strip_reasoning(std::string_view text);

struct BackendReply {
    std::string content;
    std::string model_id;
    std::optional<Usage> usage;
};

/// Transport for one chat-completion exchange. Implementations throw
/// TransientError for retryable failures and FatalBackendError otherwise.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    /// Identifies the endpoint; part of every cache key.
    virtual std::string url() const = 0;
    /// `body` is request_body(req) serialized; send it verbatim.
    virtual BackendReply complete(const ChatRequest& req, const std::string& body) = 0;
};

/// Refresh skips the cache lookup (the fresh result still overwrites the entry).
enum class CacheMode { Use, Refresh };

struct ClientConfig {
    int max_in_flight = 8;
    int max_attempts = 5;
    int base_delay_ms = 500;
    int max_delay_ms = 30000;
};

struct ClientCounters {
    std::size_t live_calls = 0;
    std::size_t cache_hits = 0;
    std::size_t retries = 0;
};

/// Thread-safe chat client: response cache, per-key single flight, bounded
/// in-flight calls, and exponential backoff with jitter on transient errors.
class ChatClient {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    ChatClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache, ClientConfig cfg = {});

    ChatResponse chat(const ChatRequest& req, CacheMode mode = CacheMode::Use);

    const std::string& backend_url() const noexcept { return url_; }
    ClientCounters counters() const;
    /// Replaces the backoff sleep; tests use this to avoid real delays.
    void set_sleeper(Sleeper s) { sleeper_ = std::move(s); }

private:
    ChatResponse call_live(const ChatRequest& req, const std::string& body, const std::string& key);

    std::shared_ptr<ChatBackend> backend_;
    std::shared_ptr<ResponseCache> cache_;
    ClientConfig cfg_;
    std::string url_;
    Sleeper sleeper_;
    std::counting_semaphore<4096> slots_;

    std::mutex mu_;
    std::map<std::string, std::shared_future<ChatResponse>> in_flight_;

    std::atomic<std::size_t> live_calls_{0};
    std::atomic<std::size_t> cache_hits_{0};
    std::atomic<std::size_t> retries_{0};
};

}  // namespace debunk
