#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "debunk/corpus.hpp"
#include "debunk/generation.hpp"
#include "debunk/jsonl_store.hpp"
#include "debunk/llm_client.hpp"
#include "debunk/persona.hpp"

namespace debunk {

enum class Condition : std::uint8_t { Matched, MismatchedClose, MismatchedDistant, Generic };

inline constexpr std::array<Condition, 4> kConditions{Condition::Matched, Condition::MismatchedClose,
                                                      Condition::MismatchedDistant, Condition::Generic};

std::string_view to_string(Condition c) noexcept;
std::optional<Condition> parse_condition(std::string_view s) noexcept;
/// Condition implied by the judge/target relation.
Condition condition_for(RelationKind k) noexcept;

struct EvaluationTask {
    std::string claim_id;
    TraitProfile judge_profile;
    Condition condition = Condition::Generic;
    std::optional<TraitProfile> target_profile;  // absent iff Generic
    std::string claim_text;
    std::string verdict_text;

    friend bool operator==(const EvaluationTask&, const EvaluationTask&) = default;
};

struct Judgment {
    std::string claim_id;
    TraitProfile judge_profile;
    Condition condition = Condition::Generic;
    std::optional<TraitProfile> target_profile;
    int score = 0;
    std::string raw_output;
    std::string judge_model_id;
    std::string prompt_digest;
    bool reasked = false;

    friend bool operator==(const Judgment&, const Judgment&) = default;
};

OrderedJson to_json(const Judgment& j);
/// Validates the score range and the condition/relation agreement.
Judgment judgment_from_json(const Json& j, const std::string& where);

struct JudgmentStoreTraits {
    using Record = Judgment;
    using Key = std::tuple<std::string, unsigned, std::uint8_t, std::string>;
    static Key key(const Judgment& j) {
        return {j.claim_id, j.judge_profile.index(), static_cast<std::uint8_t>(j.condition), j.judge_model_id};
    }
    static std::string describe(const Key& k);
    static OrderedJson to_json(const Judgment& j) { return debunk::to_json(j); }
    static Judgment from_json(const Json& j, const std::string& where) { return judgment_from_json(j, where); }
};

/// judgments.<model>.jsonl: unique per (claim, judge, condition, judge model).
using JudgmentStore = JsonlStore<JudgmentStoreTraits>;

std::vector<Judgment> load_judgments(const std::filesystem::path& path);

/// Builds |corpus| x |judges| x 4 tasks in (claim, judge, condition) order.
/// Close and distant targets come from sample_mismatched(judge, claim, seed).
/// `verdicts` must hold exactly one tailoring model unless `tailor_model`
/// selects one. Throws MissingVerdict naming the first absent pair.
std::vector<EvaluationTask> plan_evaluations(const std::vector<ClaimRecord>& corpus,
                                             const std::vector<TailoredVerdict>& verdicts,
                                             const std::vector<TraitProfile>& judges, std::uint64_t seed,
                                             const std::optional<std::string>& tailor_model = std::nullopt);

/// First standalone integer token of `raw` (after removing reasoning blocks).
/// Digits glued to letters ("Qwen3", "7th") and decimals ("6.5") are not
/// integer tokens; "1,000" and "17" are single tokens. Throws ScoreParseError
/// (Unparseable when there is no token, OutOfRange when the first token is
/// outside [1, 7]).
int parse_score(std::string_view raw);

struct EvaluationSummary {
    std::size_t scored = 0;
    std::size_t skipped = 0;
    std::size_t failed = 0;
    std::size_t reasked = 0;
    std::size_t not_attempted = 0;
    std::vector<ItemFailure> failures;
};

struct EvaluationOptions {
    std::string judge_model_id;
    int workers = 8;
    /// Process at most this many pending tasks, then stop (resumable).
    std::optional<std::size_t> limit;
};

/// Scores every task missing from `store` at temperature 0. One call per
/// task, plus one re-ask with an explicit instruction when the score cannot
/// be parsed; a task that still fails is recorded as missing.
EvaluationSummary run_evaluation(const std::vector<EvaluationTask>& tasks, ChatClient& client, JudgmentStore& store,
                                 const EvaluationOptions& opts);

}  // namespace debunk
