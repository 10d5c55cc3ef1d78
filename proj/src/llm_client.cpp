#include "debunk/llm_client.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <thread>

#include "debunk/digest.hpp"
#include "debunk/errors.hpp"

namespace debunk {

void ChatRequest::validate() const {
    if (model_id.empty()) throw InputError("chat request: model_id is empty");
    if (messages.empty() || messages.front().role != Role::System) {
        throw InputError("chat request: first message must be the system message");
    }
    const auto systems = std::count_if(messages.begin(), messages.end(),
                                       [](const ChatMessage& m) { return m.role == Role::System; });
    if (systems != 1) throw InputError("chat request: exactly one system message required");
    if (messages.size() < 2) throw InputError("chat request: at least one user message required");
    if (!(temperature >= 0.0)) throw InputError("chat request: temperature must be >= 0");
    if (max_tokens && *max_tokens <= 0) throw InputError("chat request: max_tokens must be positive");
}

ChatRequest ChatRequest::from_prompt(std::string model_id, std::string system, std::string user, double temperature) {
    ChatRequest r;
    r.model_id = std::move(model_id);
    r.messages = {{Role::System, std::move(system)}, {Role::User, std::move(user)}};
    r.temperature = temperature;
    return r;
}

OrderedJson request_body(const ChatRequest& req) {
    OrderedJson body;
    body["model"] = req.model_id;
    auto& msgs = body["messages"] = OrderedJson::array();
    for (const auto& m : req.messages) {
        msgs.push_back({{"role", m.role == Role::System ? "system" : "user"}, {"content", m.content}});
    }
    body["temperature"] = req.temperature;
    if (req.max_tokens) body["max_tokens"] = *req.max_tokens;
    return body;
}

std::string cache_key(std::string_view backend_url, const ChatRequest& req) {
    std::string material(backend_url);
    material += '\n';
    material += request_body(req).dump();
    return sha256_hex(material);
}

std::string strip_reasoning(std::string_view text) {
    static constexpr std::string_view kOpen = "<think>";
    static constexpr std::string_view kClose = "</think>";
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find(kOpen, pos);
        if (open == std::string_view::npos) {
            out.append(text.substr(pos));
            break;
        }
        out.append(text.substr(pos, open - pos));
        const auto close = text.find(kClose, open + kOpen.size());
        if (close == std::string_view::npos) break;
        pos = close + kClose.size();
    }
    return out;
}

ChatClient::ChatClient(std::shared_ptr<ChatBackend> backend, std::shared_ptr<ResponseCache> cache, ClientConfig cfg)
    : backend_(std::move(backend)),
      cache_(std::move(cache)),
      cfg_(cfg),
      url_(backend_->url()),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
      slots_(std::clamp(cfg.max_in_flight, 1, 4096)) {
    if (cfg_.max_attempts < 1) throw InputError("retry.max_attempts must be >= 1");
    if (cfg_.base_delay_ms < 0) throw InputError("retry.base_delay_ms must be >= 0");
}

ClientCounters ChatClient::counters() const {
    return {live_calls_.load(), cache_hits_.load(), retries_.load()};
}

ChatResponse ChatClient::chat(const ChatRequest& req, CacheMode mode) {
    req.validate();
    const auto body = request_body(req).dump();
    const auto key = sha256_hex(url_ + "\n" + body);  // same material as cache_key()

    if (cache_ && mode == CacheMode::Use) {
        if (auto hit = cache_->load(key)) {
            ++cache_hits_;
            return {hit->content, hit->raw_content, hit->model_id, hit->usage, true, 0};
        }
    }

    std::promise<ChatResponse> promise;
    {
        std::unique_lock lock(mu_);
        if (auto it = in_flight_.find(key); it != in_flight_.end()) {
            auto shared = it->second;
            lock.unlock();
            auto r = shared.get();
            ++cache_hits_;
            r.cached = true;
            r.retries = 0;
            return r;
        }
        in_flight_.emplace(key, promise.get_future().share());
    }

    try {
        auto r = call_live(req, body, key);
        promise.set_value(r);
        std::lock_guard lock(mu_);
        in_flight_.erase(key);
        return r;
    } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard lock(mu_);
        in_flight_.erase(key);
        throw;
    }
}

ChatResponse ChatClient::call_live(const ChatRequest& req, const std::string& body, const std::string& key) {
    std::mt19937_64 rng(digest_u64(key));
    BackendReply reply;
    int attempt = 1;
    for (;; ++attempt) {
        try {
            slots_.acquire();
            ++live_calls_;
            try {
                reply = backend_->complete(req, body);
            } catch (...) {
                slots_.release();
                throw;
            }
            slots_.release();
            break;
        } catch (const TransientError& e) {
            if (attempt >= cfg_.max_attempts) {
                throw BackendExhausted("backend still failing after " + std::to_string(attempt) +
                                           " attempts: " + e.what(),
                                       attempt);
            }
            ++retries_;
            const auto exp = std::min<long long>(static_cast<long long>(cfg_.base_delay_ms) << std::min(attempt - 1, 20),
                                                 cfg_.max_delay_ms);
            std::uniform_int_distribution<long long> jitter(0, std::max(cfg_.base_delay_ms, 0));
            sleeper_(std::chrono::milliseconds(exp + jitter(rng)));
        }
    }

    ChatResponse r;
    r.raw_content = reply.content;
    r.content = strip_reasoning(reply.content);
    r.model_id = reply.model_id.empty() ? req.model_id : reply.model_id;
    r.usage = reply.usage;
    r.retries = attempt - 1;
    const bool blank = std::all_of(r.content.begin(), r.content.end(),
                                   [](unsigned char c) { return std::isspace(c); });
    if (blank) throw EmptyCompletion("backend returned an empty completion for model " + req.model_id);
    if (cache_) cache_->store(key, {r.content, r.raw_content, r.model_id, r.usage});
    return r;
}

}  // namespace debunk
