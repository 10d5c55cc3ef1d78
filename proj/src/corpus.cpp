#include "debunk/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "debunk/errors.hpp"

namespace debunk {

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string required_text(const Json& j, const char* field, const std::string& where, const std::string& id) {
    const std::string who = id.empty() ? "" : " (id " + id + ")";
    if (!j.contains(field)) throw InputError(where + ": missing field \"" + field + "\"" + who);
    const auto& v = j.at(field);
    if (!v.is_string()) throw InputError(where + ": field \"" + field + "\" must be a string" + who);
    auto s = v.get<std::string>();
    if (blank(s)) throw InputError(where + ": field \"" + field + "\" is empty" + who);
    return s;
}

std::optional<std::string> optional_text(const Json& j, const char* field, const std::string& where) {
    if (!j.contains(field) || j.at(field).is_null()) return std::nullopt;
    if (!j.at(field).is_string()) throw InputError(where + ": field \"" + field + "\" must be a string or null");
    return j.at(field).get<std::string>();
}

}  // namespace

std::string_view to_string(Label l) noexcept {
    switch (l) {
        case Label::Debunked: return "debunked";
        case Label::Confirmed: return "confirmed";
        case Label::Unreviewed: return "unreviewed";
    }
    return "?";
}

std::optional<Label> parse_label(std::string_view s) noexcept {
    if (s == "debunked") return Label::Debunked;
    if (s == "confirmed") return Label::Confirmed;
    if (s == "unreviewed") return Label::Unreviewed;
    return std::nullopt;
}

OrderedJson to_json(const ClaimRecord& r) {
    OrderedJson j;
    j["id"] = r.id;
    j["claim"] = r.claim;
    j["context"] = r.context;
    j["generic_verdict"] = r.generic_verdict;
    j["topic"] = r.topic ? OrderedJson(*r.topic) : OrderedJson(nullptr);
    j["source_url"] = r.source_url ? OrderedJson(*r.source_url) : OrderedJson(nullptr);
    j["label"] = std::string(to_string(r.label));
    return j;
}

ClaimRecord claim_from_json(const Json& j, const std::string& where) {
    if (!j.is_object()) throw InputError(where + ": expected a JSON object");
    ClaimRecord r;
    r.id = required_text(j, "id", where, "");
    r.claim = required_text(j, "claim", where, r.id);
    r.context = required_text(j, "context", where, r.id);
    r.generic_verdict = required_text(j, "generic_verdict", where, r.id);
    r.topic = optional_text(j, "topic", where);
    r.source_url = optional_text(j, "source_url", where);
    const auto label = required_text(j, "label", where, r.id);
    const auto parsed = parse_label(label);
    if (!parsed) {
        throw InputError(where + ": field \"label\" has unknown value \"" + label + "\" (id " + r.id + ")");
    }
    r.label = *parsed;
    return r;
}

std::vector<ClaimRecord> load_corpus(const std::filesystem::path& path) {
    std::vector<ClaimRecord> out;
    std::set<std::string> seen;
    read_jsonl(path, [&](std::size_t line, const Json& j) {
        const auto where = path.string() + ":" + std::to_string(line);
        auto rec = claim_from_json(j, where);
        if (!seen.insert(rec.id).second) throw InputError(where + ": duplicate id \"" + rec.id + "\"");
        out.push_back(std::move(rec));
    });
    return out;
}

std::string serialize_corpus(const std::vector<ClaimRecord>& records) {
    std::string s;
    for (const auto& r : records) {
        s += to_json(r).dump();
        s += '\n';
    }
    return s;
}

void write_corpus(const std::filesystem::path& path, const std::vector<ClaimRecord>& records) {
    write_file_atomic(path, serialize_corpus(records));
}

std::optional<MatchField> parse_match_field(std::string_view s) noexcept {
    if (s == "verdict") return MatchField::Verdict;
    if (s == "claim") return MatchField::Claim;
    if (s == "both") return MatchField::Both;
    return std::nullopt;
}

std::string_view to_string(MatchField f) noexcept {
    switch (f) {
        case MatchField::Verdict: return "verdict";
        case MatchField::Claim: return "claim";
        case MatchField::Both: return "both";
    }
    return "?";
}

FilterConfig FilterConfig::defaults() {
    return {{"is correct", "this is true", "accurate"}, MatchField::Verdict};
}

void FilterConfig::validate() const {
    if (exclusion_keywords.empty()) throw InputError("filter: keyword list is empty");
    for (const auto& k : exclusion_keywords) {
        if (blank(k)) throw InputError("filter: blank keyword in list");
    }
}

FilterResult filter_debunked(const std::vector<ClaimRecord>& records, const FilterConfig& cfg) {
    cfg.validate();
    std::vector<std::string> keywords;
    keywords.reserve(cfg.exclusion_keywords.size());
    for (const auto& k : cfg.exclusion_keywords) keywords.push_back(lowercase(k));

    FilterResult result;
    for (const auto& k : keywords) result.keyword_hits.emplace(k, 0);

    for (const auto& rec : records) {
        std::string haystack;
        if (cfg.match_field != MatchField::Claim) haystack += lowercase(rec.generic_verdict);
        if (cfg.match_field != MatchField::Verdict) {
            haystack += '\n';
            haystack += lowercase(rec.claim);
        }
        bool hit = false;
        for (const auto& k : keywords) {
            if (haystack.find(k) != std::string::npos) {
                ++result.keyword_hits[k];
                hit = true;
            }
        }
        const bool confirmed = rec.label == Label::Confirmed;
        if (confirmed && !hit) ++result.confirmed_label;
        if (confirmed || hit) {
            result.excluded.push_back(rec);
        } else {
            if (rec.label == Label::Unreviewed) ++result.unreviewed;
            result.kept.push_back(rec);
        }
    }
    return result;
}

CorpusStats corpus_stats(const std::vector<ClaimRecord>& records) {
    CorpusStats s;
    for (auto l : {Label::Debunked, Label::Confirmed, Label::Unreviewed}) s.per_label[std::string(to_string(l))] = 0;
    for (const auto& r : records) {
        ++s.total;
        ++s.per_label[std::string(to_string(r.label))];
        if (r.topic) ++s.per_topic[*r.topic];
    }
    return s;
}

}  // namespace debunk
