#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "debunk/corpus.hpp"
#include "debunk/jsonl.hpp"
#include "debunk/jsonl_store.hpp"
#include "debunk/llm_client.hpp"
#include "debunk/persona.hpp"
#include "debunk/prompts.hpp"

namespace debunk {

struct TailoredVerdict {
    std::string claim_id;
    TraitProfile target_profile;
    std::string text;
    std::string model_id;
    double temperature = kGenerationTemperature;
    std::string prompt_digest;
    std::string created_at;

    friend bool operator==(const TailoredVerdict&, const TailoredVerdict&) = default;
};

OrderedJson to_json(const TailoredVerdict& v);
TailoredVerdict verdict_from_json(const Json& j, const std::string& where);

/// Strips reasoning blocks, a leading "Verdict:" style label, surrounding
/// quotes, and outer whitespace, repeating until nothing changes.
/// Throws EmptyAfterSanitize if nothing is left.
std::string sanitize_output(std::string_view raw);

/// Descriptor labels (whole words, case-insensitive) that leaked into `text`.
std::vector<std::string> descriptor_leaks(std::string_view text);

struct VerdictStoreTraits {
    using Record = TailoredVerdict;
    using Key = std::tuple<std::string, unsigned, std::string>;  // claim, profile index, model
    static Key key(const TailoredVerdict& v) { return {v.claim_id, v.target_profile.index(), v.model_id}; }
    static std::string describe(const Key& k);
    static OrderedJson to_json(const TailoredVerdict& v) { return debunk::to_json(v); }
    static TailoredVerdict from_json(const Json& j, const std::string& where) { return verdict_from_json(j, where); }
};

/// verdicts.jsonl: unique per (claim, profile, model).
using VerdictStore = JsonlStore<VerdictStoreTraits>;

inline VerdictStoreTraits::Key verdict_key(std::string_view claim_id, TraitProfile p, std::string_view model_id) {
    return {std::string(claim_id), p.index(), std::string(model_id)};
}

/// Read-only load of a verdict store file.
std::vector<TailoredVerdict> load_verdicts(const std::filesystem::path& path);

struct ItemFailure {
    std::string claim_id;
    std::string profile;
    std::string detail;  // condition for evaluation tasks, empty for generation
    std::string error_class;
    std::string message;
};

struct LeakWarning {
    std::string claim_id;
    std::string profile;
    std::vector<std::string> descriptors;
};

struct GenerationSummary {
    std::size_t generated = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::size_t not_attempted = 0;  // left pending because of `limit`
    std::vector<ItemFailure> failures;
    std::vector<LeakWarning> leaks;
};

using Clock = std::function<std::string()>;

/// Current UTC time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_now();

struct GenerationOptions {
    std::string model_id;
    double temperature = kGenerationTemperature;
    std::size_t max_context_chars = kDefaultMaxContextChars;
    int workers = 8;
    Clock clock = utc_now;
    /// Process at most this many pending pairs, then stop (resumable).
    std::optional<std::size_t> limit;
};

/// Produces one tailored verdict per (claim, profile) pair missing from
/// `store`, in claim-major, profile-minor order. Per-item failures are retried
/// once and then recorded; store I/O errors abort.
GenerationSummary run_generation(const std::vector<ClaimRecord>& corpus, const std::vector<TraitProfile>& profiles,
                                 ChatClient& client, VerdictStore& store, const GenerationOptions& opts);

/// Short class name for an exception, used in failure records.
std::string error_class_of(const std::exception_ptr& e);

}  // namespace debunk
