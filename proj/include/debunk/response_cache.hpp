#pragma once

#include <filesystem>
#include <optional>
#include <string>

namespace debunk {

struct Usage {
    int prompt_tokens = 0;
    int completion_tokens = 0;
    int total_tokens = 0;

    friend bool operator==(const Usage&, const Usage&) = default;
};

struct CachedResponse {
    std::string content;
    std::string raw_content;
    std::string model_id;
    std::optional<Usage> usage;

    friend bool operator==(const CachedResponse&, const CachedResponse&) = default;
};

/// Content-addressed store of successful responses: one JSON file per key
/// digest. Writes go through a temporary file and rename, so concurrent
/// readers never observe a partial entry.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    std::optional<CachedResponse> load(const std::string& key) const;
    void store(const std::string& key, const CachedResponse& value);

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path file_for(const std::string& key) const;
    std::filesystem::path dir_;
};

}  // namespace debunk
