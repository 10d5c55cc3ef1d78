#include "debunk/response_cache.hpp"

#include <atomic>
#include <fstream>

#include <unistd.h>

#include "debunk/errors.hpp"
#include "debunk/jsonl.hpp"

namespace debunk {

namespace fs = std::filesystem;

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StoreIoError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

fs::path ResponseCache::file_for(const std::string& key) const {
    return dir_ / (key + ".json");
}

std::optional<CachedResponse> ResponseCache::load(const std::string& key) const {
    const auto path = file_for(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    Json j;
    try {
        j = Json::parse(in);
        CachedResponse r;
        r.content = j.at("content").get<std::string>();
        r.raw_content = j.at("raw_content").get<std::string>();
        r.model_id = j.at("model_id").get<std::string>();
        if (j.contains("usage") && !j["usage"].is_null()) {
            const auto& u = j["usage"];
            r.usage = Usage{u.value("prompt_tokens", 0), u.value("completion_tokens", 0), u.value("total_tokens", 0)};
        }
        return r;
    } catch (const Json::exception&) {
        // A corrupt entry is treated as a miss and overwritten by the next success.
        return std::nullopt;
    }
}

void ResponseCache::store(const std::string& key, const CachedResponse& value) {
    OrderedJson j;
    j["key"] = key;
    j["content"] = value.content;
    j["raw_content"] = value.raw_content;
    j["model_id"] = value.model_id;
    if (value.usage) {
        j["usage"] = {{"prompt_tokens", value.usage->prompt_tokens},
                      {"completion_tokens", value.usage->completion_tokens},
                      {"total_tokens", value.usage->total_tokens}};
    } else {
        j["usage"] = nullptr;
    }
    static std::atomic<unsigned long> counter{0};
    auto tmp = dir_ / (key + ".json." + std::to_string(::getpid()) + "." + std::to_string(counter++) + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreIoError("cannot write cache entry " + tmp.string());
        out << j.dump(2) << '\n';
        if (!out.flush()) throw StoreIoError("cache write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, file_for(key), ec);
    if (ec) throw StoreIoError("cannot commit cache entry " + key + ": " + ec.message());
}

}  // namespace debunk
