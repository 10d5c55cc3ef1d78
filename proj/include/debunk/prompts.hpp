#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>

#include "debunk/corpus.hpp"
#include "debunk/persona.hpp"

namespace debunk {

/// Canonical template texts, placeholder syntax {name}. The files under
/// data/templates/ hold the same bytes.
namespace templates {
extern const std::string_view kTailorSystem;
extern const std::string_view kTailorUser;
extern const std::string_view kJudgeSystem;
extern const std::string_view kJudgeUser;
}  // namespace templates

/// Instruction appended to the judge user prompt when a score cannot be parsed.
inline constexpr std::string_view kScoreReaskInstruction = "Respond with a single integer from 1 to 7.";

inline constexpr std::size_t kDefaultMaxContextChars = 20000;

struct RenderedPrompt {
    std::string system;
    std::string user;
    std::string digest;  // sha256 hex over (system, user)

    friend bool operator==(const RenderedPrompt&, const RenderedPrompt&) = default;
};

std::string prompt_digest(std::string_view system, std::string_view user);

/// Single-pass {name} substitution. Substituted values are not re-scanned.
/// Throws InputError for a placeholder with no value.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values);

RenderedPrompt tailor_prompt(TraitProfile p, const ClaimRecord& rec,
                             std::size_t max_context_chars = kDefaultMaxContextChars);

RenderedPrompt judge_prompt(TraitProfile p, std::string_view claim, std::string_view verdict);

/// Digest of each canonical template, keyed by template name.
std::map<std::string, std::string> template_digests();

}  // namespace debunk
