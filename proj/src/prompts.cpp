#include "debunk/prompts.hpp"

#include "debunk/digest.hpp"
#include "debunk/errors.hpp"

namespace debunk {

namespace templates {

const std::string_view kTailorSystem =
    "You are a communication strategist with expertise in crafting persuasive messages tailored to "
    "individual personality profiles using the Big Five personality model.\n"
    "\n"
    "Your role is to reframe short factual verdicts in a way that maximally resonates with a person who "
    "exhibits the following personality traits: {traits}.\n"
    "\n"
    "Focus on adjusting the message's tone, emotional appeal, and emphasis (without altering the factual "
    "content) so that it aligns with the reader's psychological tendencies and communication style.";

const std::string_view kTailorUser =
    "Rewrite the short `Verdict' below to make it more persuasive for someone described with the traits in "
    "which you are specialized. Use the `Context' for factual accuracy and inspiration, but only rewrite the "
    "`Verdict'.\n"
    "\n"
    "Do not explicitly mention the personality traits in the output.\n"
    "\n"
    "Claim: {claim}\n"
    "\n"
    "Context: {context}\n"
    "\n"
    "Verdict: {verdict}";

const std::string_view kJudgeSystem = "You are a character who is {traits}.";

const std::string_view kJudgeUser =
    "Considering your personality, evaluate the persuasiveness of the verdict below which addresses a "
    "specific claim.\n"
    "\n"
    "Rate how persuasive you find this verdict for someone with your specific personality traits using a "
    "scale from 1 to 7. Consider that:\n"
    "\n"
    "1 = Not at all persuasive\n"
    "\n"
    "4 = Moderately persuasive\n"
    "\n"
    "7 = Extremely persuasive\n"
    "\n"
    "Claim: {claim}\n"
    "\n"
    "Verdict to Evaluate: {verdict}\n"
    "\n"
    "Your score:";

}  // namespace templates

std::string prompt_digest(std::string_view system, std::string_view user) {
    std::string buf;
    buf.reserve(system.size() + user.size() + 32);
    buf += std::to_string(system.size());
    buf += ':';
    buf += system;
    buf += std::to_string(user.size());
    buf += ':';
    buf += user;
    return sha256_hex(buf);
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string, std::less<>>& values) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const auto open = tmpl.find('{', pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        const auto close = tmpl.find('}', open + 1);
        if (close == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        const auto name = tmpl.substr(open + 1, close - open - 1);
        out.append(tmpl.substr(pos, open - pos));
        const auto it = values.find(name);
        if (it == values.end()) throw InputError("template placeholder {" + std::string(name) + "} has no value");
        out += it->second;
        pos = close + 1;
    }
    return out;
}

RenderedPrompt tailor_prompt(TraitProfile p, const ClaimRecord& rec, std::size_t max_context_chars) {
    if (rec.context.size() > max_context_chars) {
        throw InputError("claim " + rec.id + ": context has " + std::to_string(rec.context.size()) +
                         " characters, above the limit of " + std::to_string(max_context_chars));
    }
    RenderedPrompt r;
    r.system = render_template(templates::kTailorSystem, {{"traits", descriptors(p)}});
    r.user = render_template(templates::kTailorUser, {{"claim", rec.claim},
                                                      {"context", rec.context},
                                                      {"verdict", rec.generic_verdict}});
    r.digest = prompt_digest(r.system, r.user);
    return r;
}

RenderedPrompt judge_prompt(TraitProfile p, std::string_view claim, std::string_view verdict) {
    if (claim.empty() || verdict.empty()) throw InputError("judge prompt: claim and verdict must be nonempty");
    RenderedPrompt r;
    r.system = render_template(templates::kJudgeSystem, {{"traits", descriptors(p)}});
    r.user = render_template(templates::kJudgeUser, {{"claim", std::string(claim)}, {"verdict", std::string(verdict)}});
    r.digest = prompt_digest(r.system, r.user);
    return r;
}

std::map<std::string, std::string> template_digests() {
    return {
        {"tailor.system", sha256_hex(templates::kTailorSystem)},
        {"tailor.user", sha256_hex(templates::kTailorUser)},
        {"judge.system", sha256_hex(templates::kJudgeSystem)},
        {"judge.user", sha256_hex(templates::kJudgeUser)},
    };
}

}  // namespace debunk
