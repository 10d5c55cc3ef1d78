#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "debunk/corpus.hpp"
#include "debunk/generation.hpp"
#include "debunk/jsonl.hpp"

namespace debunk {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Settings read from the JSON config file. Flags override them.
struct RunConfig {
    std::string backend_kind;  // "http" or "mock"; empty when not configured
    std::string backend_url;
    std::string api_key_env;
    std::string model;        // tailoring model
    std::string judge_model;  // falls back to `model`
    int max_in_flight = 8;
    int max_attempts = 5;
    int base_delay_ms = 500;
    int max_delay_ms = 30000;
    int timeout_s = 300;
    bool mock_jitter = true;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_context_chars;
    std::optional<FilterConfig> filter;
};

/// Throws InputError naming the file and key on unreadable or mistyped input.
RunConfig load_config(const std::filesystem::path& path);

/// Fixed timestamps keep offline runs byte-reproducible. SOURCE_DATE_EPOCH,
/// when set, wins for every backend; otherwise mock runs stamp the epoch and
/// live runs stamp wall-clock time.
Clock run_clock(bool mock);

/// Exclusive ownership of a run directory for the lifetime of the object.
/// A lock left behind by a dead process is taken over.
class RunLock {
public:
    explicit RunLock(const std::filesystem::path& dir);
    ~RunLock();
    RunLock(const RunLock&) = delete;
    RunLock& operator=(const RunLock&) = delete;

private:
    std::filesystem::path path_;
};

/// manifest.json of a run directory. Loaded (or created) on open and written
/// back by save(); all paths in it are relative to the run directory.
class RunManifest {
public:
    RunManifest(std::filesystem::path dir, Clock clock);

    /// Records the seed on first use and returns the effective one:
    /// `requested`, else the stored seed, else `fallback`.
    std::uint64_t resolve_seed(std::optional<std::uint64_t> requested, std::uint64_t fallback);

    void set_backend(const std::string& kind, const std::string& url);
    void set_corpus(const std::filesystem::path& corpus);
    /// Marks `relative` as produced by `phase`. A path belongs to one phase.
    void add_output(const std::string& relative, const std::string& phase);
    /// Phase record; "completed" and "updated_at" are maintained here.
    void set_phase(const std::string& phase, OrderedJson info, bool completed);
    void save();

    const OrderedJson& json() const noexcept { return j_; }
    const std::filesystem::path& dir() const noexcept { return dir_; }
    std::filesystem::path path() const { return dir_ / "manifest.json"; }

private:
    std::filesystem::path dir_;
    Clock clock_;
    OrderedJson j_;
};

}  // namespace debunk
