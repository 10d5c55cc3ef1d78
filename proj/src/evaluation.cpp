#include "debunk/evaluation.hpp"

#include <cctype>
#include <map>
#include <set>

#include "debunk/errors.hpp"
#include "debunk/prompts.hpp"
#include "debunk/work_pool.hpp"

namespace debunk {

std::string_view to_string(Condition c) noexcept {
    switch (c) {
        case Condition::Matched: return "matched";
        case Condition::MismatchedClose: return "mismatched_close";
        case Condition::MismatchedDistant: return "mismatched_distant";
        case Condition::Generic: return "generic";
    }
    return "?";
}

std::optional<Condition> parse_condition(std::string_view s) noexcept {
    for (auto c : kConditions) {
        if (to_string(c) == s) return c;
    }
    return std::nullopt;
}

Condition condition_for(RelationKind k) noexcept {
    switch (k) {
        case RelationKind::Matched: return Condition::Matched;
        case RelationKind::MismatchedClose: return Condition::MismatchedClose;
        case RelationKind::MismatchedDistant: return Condition::MismatchedDistant;
    }
    return Condition::Generic;
}

OrderedJson to_json(const Judgment& j) {
    OrderedJson o;
    o["claim_id"] = j.claim_id;
    o["judge_profile"] = j.judge_profile.code();
    o["condition"] = std::string(to_string(j.condition));
    o["target_profile"] = j.target_profile ? OrderedJson(j.target_profile->code()) : OrderedJson(nullptr);
    o["score"] = j.score;
    o["raw_output"] = j.raw_output;
    o["judge_model_id"] = j.judge_model_id;
    o["prompt_digest"] = j.prompt_digest;
    o["reasked"] = j.reasked;
    return o;
}

Judgment judgment_from_json(const Json& o, const std::string& where) {
    try {
        Judgment j;
        j.claim_id = o.at("claim_id").get<std::string>();
        const auto judge = o.at("judge_profile").get<std::string>();
        auto jp = TraitProfile::try_from_code(judge);
        if (!jp) throw MalformedArtifact(where + ": invalid judge_profile \"" + judge + "\"");
        j.judge_profile = *jp;
        const auto cond = o.at("condition").get<std::string>();
        auto c = parse_condition(cond);
        if (!c) throw MalformedArtifact(where + ": unknown condition \"" + cond + "\"");
        j.condition = *c;
        const auto& target = o.at("target_profile");
        if (!target.is_null()) {
            auto tp = TraitProfile::try_from_code(target.get<std::string>());
            if (!tp) throw MalformedArtifact(where + ": invalid target_profile");
            j.target_profile = *tp;
        }
        if ((j.condition == Condition::Generic) != !j.target_profile) {
            throw MalformedArtifact(where + ": target_profile must be null exactly for generic judgments");
        }
        if (j.target_profile && condition_for(relation(j.judge_profile, *j.target_profile).kind) != j.condition) {
            throw MalformedArtifact(where + ": condition " + cond + " disagrees with profiles " + judge + "/" +
                                    j.target_profile->code());
        }
        const auto& score = o.at("score");
        if (!score.is_number_integer()) throw MalformedArtifact(where + ": score must be an integer");
        j.score = score.get<int>();
        if (j.score < 1 || j.score > 7) throw MalformedArtifact(where + ": score out of range [1,7]");
        j.raw_output = o.at("raw_output").get<std::string>();
        j.judge_model_id = o.at("judge_model_id").get<std::string>();
        j.prompt_digest = o.at("prompt_digest").get<std::string>();
        j.reasked = o.value("reasked", false);
        return j;
    } catch (const Json::exception& e) {
        throw MalformedArtifact(where + ": " + e.what());
    }
}

std::string JudgmentStoreTraits::describe(const Key& k) {
    return "(" + std::get<0>(k) + ", " + TraitProfile::from_index(std::get<1>(k)).code() + ", " +
           std::string(to_string(static_cast<Condition>(std::get<2>(k)))) + ", " + std::get<3>(k) + ")";
}

std::vector<Judgment> load_judgments(const std::filesystem::path& path) {
    return JudgmentStore::read(path);
}

std::vector<EvaluationTask> plan_evaluations(const std::vector<ClaimRecord>& corpus,
                                             const std::vector<TailoredVerdict>& verdicts,
                                             const std::vector<TraitProfile>& judges, std::uint64_t seed,
                                             const std::optional<std::string>& tailor_model) {
    std::set<std::string> models;
    for (const auto& v : verdicts) models.insert(v.model_id);
    std::string model;
    if (tailor_model) {
        model = *tailor_model;
    } else if (models.size() == 1) {
        model = *models.begin();
    } else if (models.size() > 1) {
        throw InputError("verdict store holds several tailoring models; select one");
    }

    std::map<std::pair<std::string, unsigned>, const std::string*> text;
    for (const auto& v : verdicts) {
        if (v.model_id == model) text[{v.claim_id, v.target_profile.index()}] = &v.text;
    }
    auto lookup = [&](const std::string& claim_id, TraitProfile p) -> const std::string& {
        const auto it = text.find({claim_id, p.index()});
        if (it == text.end()) {
            throw MissingVerdict("no tailored verdict for (" + claim_id + ", " + p.code() + ")" +
                                 (model.empty() ? std::string() : " from model " + model));
        }
        return *it->second;
    };

    std::vector<EvaluationTask> tasks;
    tasks.reserve(corpus.size() * judges.size() * kConditions.size());
    for (const auto& rec : corpus) {
        for (auto judge : judges) {
            const auto [close, distant] = sample_mismatched(judge, rec.id, seed);
            tasks.push_back({rec.id, judge, Condition::Matched, judge, rec.claim, lookup(rec.id, judge)});
            tasks.push_back({rec.id, judge, Condition::MismatchedClose, close, rec.claim, lookup(rec.id, close)});
            tasks.push_back({rec.id, judge, Condition::MismatchedDistant, distant, rec.claim, lookup(rec.id, distant)});
            tasks.push_back({rec.id, judge, Condition::Generic, std::nullopt, rec.claim, rec.generic_verdict});
        }
    }
    return tasks;
}

int parse_score(std::string_view raw) {
    const auto text = strip_reasoning(raw);
    const auto n = text.size();
    auto digit = [&](std::size_t i) { return i < n && std::isdigit(static_cast<unsigned char>(text[i])); };
    auto letter = [&](std::size_t i) {
        return i < n && (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_');
    };

    std::size_t i = 0;
    while (i < n) {
        if (!digit(i) || (i > 0 && digit(i - 1))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        std::string digits;
        while (digit(i)) digits += text[i++];
        // Thousands groups: "1,000".
        while (i + 3 < n + 1 && text[i] == ',' && digit(i + 1) && digit(i + 2) && digit(i + 3) && !digit(i + 4)) {
            digits.append(text, i + 1, 3);
            i += 4;
        }
        const bool decimal = i + 1 < n && text[i] == '.' && digit(i + 1);
        const bool fraction_part = start >= 2 && text[start - 1] == '.' && digit(start - 2);
        if (decimal) {
            ++i;
            while (digit(i)) ++i;
            continue;
        }
        if (fraction_part) continue;
        const bool glued = (start > 0 && letter(start - 1)) || letter(i);
        if (glued) continue;

        const bool negative = start > 0 && text[start - 1] == '-' &&
                              (start == 1 || !std::isalnum(static_cast<unsigned char>(text[start - 2])));
        long long value = digits.size() > 18 ? 1000000000000000000LL : std::stoll(digits);
        if (negative) value = -value;
        if (value < 1 || value > 7) {
            throw ScoreParseError(ScoreParseError::Kind::OutOfRange,
                                  "score " + std::string(negative ? "-" : "") + digits + " is outside 1..7");
        }
        return static_cast<int>(value);
    }
    throw ScoreParseError(ScoreParseError::Kind::Unparseable, "no integer score in judge output");
}

EvaluationSummary run_evaluation(const std::vector<EvaluationTask>& tasks, ChatClient& client, JudgmentStore& store,
                                 const EvaluationOptions& opts) {
    if (opts.judge_model_id.empty()) throw InputError("evaluation: judge model id is empty");
    EvaluationSummary summary;
    std::vector<const EvaluationTask*> pending;
    for (const auto& t : tasks) {
        if (t.target_profile) {
            if (condition_for(relation(t.judge_profile, *t.target_profile).kind) != t.condition) {
                throw InputError("evaluation task for " + t.claim_id + " has inconsistent condition");
            }
        } else if (t.condition != Condition::Generic) {
            throw InputError("evaluation task for " + t.claim_id + " lacks a target profile");
        }
        const JudgmentStoreTraits::Key key{t.claim_id, t.judge_profile.index(),
                                           static_cast<std::uint8_t>(t.condition), opts.judge_model_id};
        if (store.contains(key)) {
            ++summary.skipped;
        } else {
            pending.push_back(&t);
        }
    }
    if (opts.limit && *opts.limit < pending.size()) {
        summary.not_attempted = pending.size() - *opts.limit;
        pending.resize(*opts.limit);
    }

    struct Outcome {
        std::optional<Judgment> judgment;
        std::optional<ItemFailure> failure;
    };

    auto work = [&](std::size_t i) -> std::optional<Outcome> {
        const auto& t = *pending[i];
        const auto prompt = judge_prompt(t.judge_profile, t.claim_text, t.verdict_text);
        Judgment j;
        j.claim_id = t.claim_id;
        j.judge_profile = t.judge_profile;
        j.condition = t.condition;
        j.target_profile = t.target_profile;
        j.judge_model_id = opts.judge_model_id;
        j.prompt_digest = prompt.digest;

        auto fail = [&](const std::exception_ptr& e, std::string message) {
            return Outcome{std::nullopt, ItemFailure{t.claim_id, t.judge_profile.code(), std::string(to_string(t.condition)),
                                                     error_class_of(e), std::move(message)}};
        };

        try {
            auto resp = client.chat(
                ChatRequest::from_prompt(opts.judge_model_id, prompt.system, prompt.user, kEvaluationTemperature));
            try {
                j.score = parse_score(resp.content);
                j.raw_output = resp.raw_content;
                return Outcome{std::move(j), std::nullopt};
            } catch (const ScoreParseError&) {
            }
            std::string user = prompt.user;
            user += "\n\n";
            user += kScoreReaskInstruction;
            resp = client.chat(ChatRequest::from_prompt(opts.judge_model_id, prompt.system, user, kEvaluationTemperature));
            j.score = parse_score(resp.content);
            j.raw_output = resp.raw_content;
            j.reasked = true;
            return Outcome{std::move(j), std::nullopt};
        } catch (const StoreIoError&) {
            throw;
        } catch (const Error& e) {
            return fail(std::current_exception(), e.what());
        }
    };

    auto commit = [&](std::size_t, Outcome&& o) {
        if (o.failure) {
            ++summary.failed;
            summary.failures.push_back(std::move(*o.failure));
            return;
        }
        store.append(*o.judgment);
        ++summary.scored;
        if (o.judgment->reasked) ++summary.reasked;
    };

    run_ordered<Outcome>(pending.size(), opts.workers, work, commit);
    return summary;
}

}  // namespace debunk
