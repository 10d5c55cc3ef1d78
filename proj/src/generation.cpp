#include "debunk/generation.hpp"

#include <algorithm>
#include <cctype>
#include <ctime>
#include <regex>

#include "debunk/errors.hpp"
#include "debunk/work_pool.hpp"

namespace debunk {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string strip_label(std::string_view s) {
    static const std::regex kLabel(
        R"(^\*{0,2}\s*(?:(?:tailored|rewritten|revised|personali[sz]ed|final)\s+)?verdict\s*\*{0,2}\s*:\s*\*{0,2}\s*)",
        std::regex::icase);
    std::string str(s);
    std::smatch m;
    if (std::regex_search(str, m, kLabel) && m.position(0) == 0) return str.substr(static_cast<std::size_t>(m.length(0)));
    return str;
}

std::string strip_quotes(std::string_view s) {
    struct Pair {
        std::string_view open, close;
    };
    static constexpr Pair kPairs[] = {{"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE2\x80\x98", "\xE2\x80\x99"}};
    for (const auto& [open, close] : kPairs) {
        if (s.size() >= open.size() + close.size() && s.substr(0, open.size()) == open &&
            s.substr(s.size() - close.size()) == close) {
            const auto inner = s.substr(open.size(), s.size() - open.size() - close.size());
            // "A" and "B" is not a quoted whole.
            if (inner.find(close) != std::string_view::npos) continue;
            return std::string(inner);
        }
    }
    return std::string(s);
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

}  // namespace

OrderedJson to_json(const TailoredVerdict& v) {
    OrderedJson j;
    j["claim_id"] = v.claim_id;
    j["target_profile"] = v.target_profile.code();
    j["text"] = v.text;
    j["model_id"] = v.model_id;
    j["temperature"] = v.temperature;
    j["prompt_digest"] = v.prompt_digest;
    j["created_at"] = v.created_at;
    return j;
}

TailoredVerdict verdict_from_json(const Json& j, const std::string& where) {
    try {
        TailoredVerdict v;
        v.claim_id = j.at("claim_id").get<std::string>();
        const auto code = j.at("target_profile").get<std::string>();
        auto p = TraitProfile::try_from_code(code);
        if (!p) throw MalformedArtifact(where + ": invalid target_profile \"" + code + "\"");
        v.target_profile = *p;
        v.text = j.at("text").get<std::string>();
        if (trim(v.text).empty()) throw MalformedArtifact(where + ": empty verdict text");
        v.model_id = j.at("model_id").get<std::string>();
        v.temperature = j.at("temperature").get<double>();
        v.prompt_digest = j.at("prompt_digest").get<std::string>();
        v.created_at = j.at("created_at").get<std::string>();
        return v;
    } catch (const Json::exception& e) {
        throw MalformedArtifact(where + ": " + e.what());
    }
}

std::string sanitize_output(std::string_view raw) {
    std::string current(raw);
    for (;;) {
        auto next = std::string(trim(strip_reasoning(current)));
        next = std::string(trim(strip_label(next)));
        next = std::string(trim(strip_quotes(next)));
        if (next == current) break;
        current = std::move(next);
    }
    if (current.empty()) throw EmptyAfterSanitize("output is empty after sanitization");
    return current;
}

std::vector<std::string> descriptor_leaks(std::string_view text) {
    const auto hay = lowercase(text);
    std::vector<std::string> found;
    for (auto d : descriptor_vocabulary()) {
        const auto needle = lowercase(d);
        for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) {
            const bool left = pos == 0 || !word_char(hay[pos - 1]);
            const auto end = pos + needle.size();
            const bool right = end == hay.size() || !word_char(hay[end]);
            if (left && right) {
                found.emplace_back(d);
                break;
            }
        }
    }
    return found;
}

std::string VerdictStoreTraits::describe(const Key& k) {
    return "(" + std::get<0>(k) + ", " + TraitProfile::from_index(std::get<1>(k)).code() + ", " + std::get<2>(k) + ")";
}

std::vector<TailoredVerdict> load_verdicts(const fs::path& path) {
    return VerdictStore::read(path);
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string error_class_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const BackendExhausted&) {
        return "BackendExhausted";
    } catch (const EmptyCompletion&) {
        return "EmptyCompletion";
    } catch (const TransientError&) {
        return "Transient";
    } catch (const FatalBackendError&) {
        return "Fatal";
    } catch (const EmptyAfterSanitize&) {
        return "EmptyAfterSanitize";
    } catch (const ScoreParseError& s) {
        return s.kind() == ScoreParseError::Kind::OutOfRange ? "OutOfRange" : "UnparseableScore";
    } catch (const InputError&) {
        return "InputError";
    } catch (const std::exception&) {
        return "Error";
    }
}

namespace {

std::string message_of(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

}  // namespace

GenerationSummary run_generation(const std::vector<ClaimRecord>& corpus, const std::vector<TraitProfile>& profiles,
                                 ChatClient& client, VerdictStore& store, const GenerationOptions& opts) {
    if (corpus.empty()) throw InputError("generation: corpus is empty");
    if (opts.model_id.empty()) throw InputError("generation: model id is empty");
    for (const auto& r : corpus) {
        if (r.label != Label::Debunked) {
            throw InputError("generation: record " + r.id + " is labelled " + std::string(to_string(r.label)) +
                             "; only debunked records enter a run");
        }
    }

    struct Item {
        const ClaimRecord* rec;
        TraitProfile profile;
    };
    GenerationSummary summary;
    std::vector<Item> pending;
    for (const auto& rec : corpus) {
        for (auto p : profiles) {
            if (store.contains(verdict_key(rec.id, p, opts.model_id))) {
                ++summary.skipped;
            } else {
                pending.push_back({&rec, p});
            }
        }
    }
    if (opts.limit && *opts.limit < pending.size()) {
        summary.not_attempted = pending.size() - *opts.limit;
        pending.resize(*opts.limit);
    }

    struct Outcome {
        std::optional<TailoredVerdict> verdict;
        std::optional<ItemFailure> failure;
    };

    auto work = [&](std::size_t i) -> std::optional<Outcome> {
        const auto& [rec, profile] = pending[i];
        RenderedPrompt prompt;
        try {
            prompt = tailor_prompt(profile, *rec, opts.max_context_chars);
        } catch (const InputError& e) {
            return Outcome{std::nullopt, ItemFailure{rec->id, profile.code(), "", "PromptError", e.what()}};
        }
        const auto req = ChatRequest::from_prompt(opts.model_id, prompt.system, prompt.user, opts.temperature);

        std::exception_ptr last;
        for (int attempt = 0; attempt < 2; ++attempt) {
            try {
                // The retry resamples instead of re-reading a cached bad answer.
                const auto resp = client.chat(req, attempt == 0 ? CacheMode::Use : CacheMode::Refresh);
                TailoredVerdict v;
                v.claim_id = rec->id;
                v.target_profile = profile;
                v.text = sanitize_output(resp.content);
                v.model_id = opts.model_id;
                v.temperature = opts.temperature;
                v.prompt_digest = prompt.digest;
                v.created_at = opts.clock();
                return Outcome{std::move(v), std::nullopt};
            } catch (const StoreIoError&) {
                throw;
            } catch (const InputError&) {
                throw;
            } catch (const Error&) {
                last = std::current_exception();
            }
        }
        return Outcome{std::nullopt, ItemFailure{rec->id, profile.code(), "", error_class_of(last), message_of(last)}};
    };

    auto commit = [&](std::size_t, Outcome&& o) {
        if (o.failure) {
            ++summary.failed;
            summary.failures.push_back(std::move(*o.failure));
            return;
        }
        auto leaks = descriptor_leaks(o.verdict->text);
        if (!leaks.empty()) {
            summary.leaks.push_back({o.verdict->claim_id, o.verdict->target_profile.code(), std::move(leaks)});
        }
        store.append(*o.verdict);
        ++summary.generated;
    };

    run_ordered<Outcome>(pending.size(), opts.workers, work, commit);
    return summary;
}

}  // namespace debunk
