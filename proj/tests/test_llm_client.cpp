#include <gtest/gtest.h>

#include <httplib.h>

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include "debunk/digest.hpp"
#include "debunk/errors.hpp"
#include "debunk/http_backend.hpp"
#include "debunk/llm_client.hpp"
#include "test_util.hpp"

using namespace debunk;
using namespace std::chrono_literals;

namespace {

ChatRequest sample_request(std::string user = "hello") {
    return ChatRequest::from_prompt("m-1", "sys", std::move(user), 0.0);
}

// Replays a script of outcomes; "!t" = transient, "!f" = fatal, anything else is content.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> script, std::chrono::milliseconds delay = 0ms)
        : script_(std::move(script)), delay_(delay) {}

    std::string url() const override { return "scripted://test"; }

    BackendReply complete(const ChatRequest& req, const std::string&) override {
        const int now = ++active_;
        int seen = peak_.load();
        while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
        }
        std::this_thread::sleep_for(delay_);
        --active_;
        std::string step;
        {
            std::lock_guard lock(mu_);
            step = script_.empty() ? "ok:" + req.messages.back().content : script_[std::min(calls_, script_.size() - 1)];
            ++calls_;
        }
        if (step == "!t") throw TransientError("try later");
        if (step == "!f") throw FatalBackendError("bad request");
        return {step, "served-model", Usage{1, 2, 3}};
    }

    std::size_t calls() const {
        std::lock_guard lock(mu_);
        return calls_;
    }
    int peak() const { return peak_.load(); }

private:
    std::vector<std::string> script_;
    std::chrono::milliseconds delay_;
    mutable std::mutex mu_;
    std::size_t calls_ = 0;
    std::atomic<int> active_{0};
    std::atomic<int> peak_{0};
};

struct Harness {
    TempDir dir;
    std::shared_ptr<ScriptedBackend> backend;
    std::shared_ptr<ResponseCache> cache;
    std::unique_ptr<ChatClient> client;
    std::vector<std::chrono::milliseconds> sleeps;

    explicit Harness(std::vector<std::string> script, ClientConfig cfg = {}, std::chrono::milliseconds delay = 0ms)
        : backend(std::make_shared<ScriptedBackend>(std::move(script), delay)),
          cache(std::make_shared<ResponseCache>(dir / "cache")),
          client(std::make_unique<ChatClient>(backend, cache, cfg)) {
        client->set_sleeper([this](std::chrono::milliseconds d) { sleeps.push_back(d); });
    }
};

}  // namespace

TEST(ChatRequest, BodyHasOnlyProtocolFields) {
    auto req = sample_request();
    EXPECT_EQ(request_body(req).dump(),
              R"({"model":"m-1","messages":[{"role":"system","content":"sys"},{"role":"user","content":"hello"}],"temperature":0.0})");
    req.max_tokens = 64;
    EXPECT_EQ(request_body(req).back(), 64);
}

TEST(ChatRequest, CacheKeyCoversUrlAndBody) {
    const auto req = sample_request();
    EXPECT_EQ(cache_key("u", req), sha256_hex("u\n" + request_body(req).dump()));
    EXPECT_NE(cache_key("u", req), cache_key("v", req));
    auto hot = req;
    hot.temperature = 0.7;
    EXPECT_NE(cache_key("u", req), cache_key("u", hot));
}

TEST(ChatRequest, Validation) {
    EXPECT_NO_THROW(sample_request().validate());
    auto r = sample_request();
    r.model_id.clear();
    EXPECT_THROW(r.validate(), InputError);
    r = sample_request();
    r.messages = {{Role::User, "x"}};
    EXPECT_THROW(r.validate(), InputError);
    r = sample_request();
    r.temperature = -0.1;
    EXPECT_THROW(r.validate(), InputError);
    r = sample_request();
    r.messages.push_back({Role::System, "again"});
    EXPECT_THROW(r.validate(), InputError);
}

TEST(StripReasoning, RemovesThinkBlocks) {
    EXPECT_EQ(strip_reasoning("<think>x</think>Answer."), "Answer.");
    EXPECT_EQ(strip_reasoning("a<think>1</think>b<think>2</think>c"), "abc");
    EXPECT_EQ(strip_reasoning("keep <think>unterminated"), "keep ");
    EXPECT_EQ(strip_reasoning("plain"), "plain");
}

TEST(ChatClient, CachesSuccessfulResponses) {
    Harness h({});
    const auto first = h.client->chat(sample_request());
    EXPECT_FALSE(first.cached);
    EXPECT_EQ(first.content, "ok:hello");
    EXPECT_EQ(first.model_id, "served-model");
    const auto second = h.client->chat(sample_request());
    EXPECT_TRUE(second.cached);
    EXPECT_EQ(second.content, first.content);
    ASSERT_TRUE(second.usage.has_value());
    EXPECT_EQ(second.usage->total_tokens, 3);
    EXPECT_EQ(h.backend->calls(), 1u);

    // A second client over the same directory reuses the entries.
    ChatClient other(h.backend, std::make_shared<ResponseCache>(h.dir / "cache"));
    EXPECT_TRUE(other.chat(sample_request()).cached);
    EXPECT_EQ(h.backend->calls(), 1u);

    EXPECT_FALSE(h.client->chat(sample_request(), CacheMode::Refresh).cached);
    EXPECT_EQ(h.backend->calls(), 2u);
}

TEST(ChatClient, KeepsRawContentWithReasoning) {
    Harness h({"<think>hmm</think> 5"});
    const auto r = h.client->chat(sample_request());
    EXPECT_EQ(r.content, " 5");
    EXPECT_EQ(r.raw_content, "<think>hmm</think> 5");
}

TEST(ChatClient, RetriesTransientErrorsWithBackoff) {
    ClientConfig cfg;
    cfg.base_delay_ms = 100;
    Harness h({"!t", "!t", "done"}, cfg);
    const auto r = h.client->chat(sample_request());
    EXPECT_EQ(r.content, "done");
    EXPECT_EQ(r.retries, 2);
    ASSERT_EQ(h.sleeps.size(), 2u);
    EXPECT_GE(h.sleeps[0], 100ms);
    EXPECT_LE(h.sleeps[0], 200ms);
    EXPECT_GE(h.sleeps[1], 200ms);
    EXPECT_LE(h.sleeps[1], 300ms);
    EXPECT_EQ(h.client->counters().retries, 2u);
}

TEST(ChatClient, BackoffIsCapped) {
    ClientConfig cfg;
    cfg.max_attempts = 8;
    cfg.base_delay_ms = 1000;
    cfg.max_delay_ms = 3000;
    Harness h({"!t"}, cfg);
    try {
        h.client->chat(sample_request());
        FAIL();
    } catch (const BackendExhausted& e) {
        EXPECT_EQ(e.attempts(), 8);
    }
    EXPECT_EQ(h.backend->calls(), 8u);
    ASSERT_EQ(h.sleeps.size(), 7u);
    for (auto d : h.sleeps) EXPECT_LE(d, 4000ms);
    EXPECT_GE(h.sleeps.back(), 3000ms);
}

TEST(ChatClient, FatalErrorsAreNotRetried) {
    Harness h({"!f", "never"});
    EXPECT_THROW(h.client->chat(sample_request()), FatalBackendError);
    EXPECT_EQ(h.backend->calls(), 1u);
    EXPECT_TRUE(h.sleeps.empty());
}

TEST(ChatClient, EmptyCompletionIsNotCached) {
    Harness h({"  \n", "fine"});
    EXPECT_THROW(h.client->chat(sample_request()), EmptyCompletion);
    EXPECT_EQ(h.client->chat(sample_request()).content, "fine");
    EXPECT_EQ(h.backend->calls(), 2u);
}

TEST(ChatClient, SingleFlightPerKey) {
    Harness h({}, {}, 150ms);
    std::vector<std::jthread> threads;
    std::atomic<int> cached{0};
    for (int i = 0; i < 8; ++i) {
        threads.emplace_back([&] { cached += h.client->chat(sample_request()).cached; });
    }
    threads.clear();
    EXPECT_EQ(h.backend->calls(), 1u);
    EXPECT_EQ(cached.load(), 7);
}

TEST(ChatClient, BoundsInFlightCalls) {
    ClientConfig cfg;
    cfg.max_in_flight = 3;
    Harness h({}, cfg, 20ms);
    std::vector<std::jthread> threads;
    for (int i = 0; i < 16; ++i) {
        threads.emplace_back([&, i] { h.client->chat(sample_request("q" + std::to_string(i))); });
    }
    threads.clear();
    EXPECT_EQ(h.backend->calls(), 16u);
    EXPECT_LE(h.backend->peak(), 3);
    EXPECT_GE(h.backend->peak(), 2);
}

TEST(ResponseCache, RoundTripAndCorruptEntries) {
    TempDir dir;
    ResponseCache cache(dir / "c");
    const CachedResponse v{"text", "<think></think>text", "m", Usage{4, 5, 9}};
    cache.store("abc", v);
    EXPECT_EQ(cache.load("abc"), v);
    EXPECT_FALSE(cache.load("missing").has_value());
    for (const auto& e : std::filesystem::directory_iterator(dir / "c")) {
        std::ofstream(e.path(), std::ios::trunc) << "{broken";
    }
    EXPECT_FALSE(cache.load("abc").has_value());
}

TEST(HttpBackend, EndpointPaths) {
    EXPECT_EQ(HttpBackend({"http://localhost:8000"}).endpoint_path(), "/v1/chat/completions");
    EXPECT_EQ(HttpBackend({"http://localhost:8000/"}).endpoint_path(), "/v1/chat/completions");
    EXPECT_EQ(HttpBackend({"https://host/openai/v1"}).endpoint_path(), "/openai/v1/chat/completions");
    EXPECT_THROW(HttpBackend({"localhost:8000"}), InputError);
}

TEST(HttpBackend, ParsesCompletions) {
    const auto r = parse_chat_completion(
        R"({"model":"x","choices":[{"message":{"role":"assistant","content":"6"}}],"usage":{"prompt_tokens":3,"completion_tokens":1,"total_tokens":4}})");
    EXPECT_EQ(r.content, "6");
    EXPECT_EQ(r.model_id, "x");
    EXPECT_EQ(r.usage->total_tokens, 4);
    EXPECT_THROW(parse_chat_completion("not json"), FatalBackendError);
    EXPECT_THROW(parse_chat_completion(R"({"choices":[]})"), FatalBackendError);
    EXPECT_THROW(parse_chat_completion(R"({"choices":[{"text":"6"}]})"), FatalBackendError);
}

namespace {

// Local OpenAI-compatible stub: answers 429 twice, then a completion.
struct StubServer {
    httplib::Server server;
    std::jthread thread;
    int port = 0;
    std::atomic<int> hits{0};
    std::mutex mu;
    std::string last_body;
    std::string last_auth;
    std::vector<int> statuses;

    explicit StubServer(std::vector<int> script) : statuses(std::move(script)) {
        server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const int n = hits++;
            {
                std::lock_guard lock(mu);
                last_body = req.body;
                last_auth = req.get_header_value("Authorization");
            }
            const int status = statuses[std::min<std::size_t>(n, statuses.size() - 1)];
            res.status = status;
            if (status == 200) {
                res.set_content(R"({"model":"stub","choices":[{"message":{"role":"assistant","content":"Score: 5"}}]})",
                                "application/json");
            } else {
                res.set_content(R"({"error":"status )" + std::to_string(status) + "\"}", "application/json");
            }
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::jthread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~StubServer() { server.stop(); }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST(HttpBackend, RetriesRateLimitsAgainstLiveServer) {
    StubServer stub({429, 429, 200});
    TempDir dir;
    auto backend = std::make_shared<HttpBackend>(HttpBackendConfig{stub.url(), "secret", std::chrono::seconds(5)});
    ChatClient client(backend, std::make_shared<ResponseCache>(dir / "cache"));
    std::vector<std::chrono::milliseconds> sleeps;
    client.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });

    const auto r = client.chat(sample_request());
    EXPECT_EQ(r.content, "Score: 5");
    EXPECT_EQ(r.model_id, "stub");
    EXPECT_EQ(r.retries, 2);
    EXPECT_EQ(stub.hits.load(), 3);
    EXPECT_EQ(sleeps.size(), 2u);
    EXPECT_EQ(stub.last_auth, "Bearer secret");
    const auto body = Json::parse(stub.last_body);
    EXPECT_EQ(body.size(), 3u);
    EXPECT_EQ(body.at("model"), "m-1");
    EXPECT_EQ(body.at("temperature"), 0.0);
    EXPECT_EQ(body.at("messages").size(), 2u);

    EXPECT_TRUE(client.chat(sample_request()).cached);
    EXPECT_EQ(stub.hits.load(), 3);
}

TEST(HttpBackend, ClientErrorsAreFatalWithExcerpt) {
    StubServer stub({400});
    auto backend = std::make_shared<HttpBackend>(HttpBackendConfig{stub.url(), "", std::chrono::seconds(5)});
    ChatClient client(backend, nullptr);
    try {
        client.chat(sample_request());
        FAIL();
    } catch (const FatalBackendError& e) {
        EXPECT_NE(std::string(e.what()).find("HTTP 400"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("status 400"), std::string::npos);
    }
    EXPECT_EQ(stub.hits.load(), 1);
    EXPECT_TRUE(stub.last_auth.empty());
}

TEST(HttpBackend, UnreachableServerIsTransient) {
    auto backend = std::make_shared<HttpBackend>(HttpBackendConfig{"http://127.0.0.1:1", "", std::chrono::seconds(2)});
    ClientConfig cfg;
    cfg.max_attempts = 2;
    ChatClient client(backend, nullptr, cfg);
    client.set_sleeper([](std::chrono::milliseconds) {});
    EXPECT_THROW(client.chat(sample_request()), BackendExhausted);
}
