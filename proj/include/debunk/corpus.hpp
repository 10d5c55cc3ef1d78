#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "debunk/jsonl.hpp"

namespace debunk {

enum class Label { Debunked, Confirmed, Unreviewed };

std::string_view to_string(Label l) noexcept;
std::optional<Label> parse_label(std::string_view s) noexcept;

/// One fact-check item. `context` is the full debunking article.
struct ClaimRecord {
    std::string id;
    std::string claim;
    std::string context;
    std::string generic_verdict;
    std::optional<std::string> topic;
    std::optional<std::string> source_url;
    Label label = Label::Debunked;

    friend bool operator==(const ClaimRecord&, const ClaimRecord&) = default;
};

/// Serializes with the corpus field order {"id","claim","context",
/// "generic_verdict","topic","source_url","label"}; absent optionals are null.
OrderedJson to_json(const ClaimRecord& r);

/// Validates one parsed line. `where` prefixes error messages.
ClaimRecord claim_from_json(const Json& j, const std::string& where);

/// Loads a JSONL corpus in file order. Rejects duplicate ids.
std::vector<ClaimRecord> load_corpus(const std::filesystem::path& path);

std::string serialize_corpus(const std::vector<ClaimRecord>& records);
void write_corpus(const std::filesystem::path& path, const std::vector<ClaimRecord>& records);

enum class MatchField { Verdict, Claim, Both };

std::optional<MatchField> parse_match_field(std::string_view s) noexcept;
std::string_view to_string(MatchField f) noexcept;

struct FilterConfig {
    std::vector<std::string> exclusion_keywords;
    MatchField match_field = MatchField::Verdict;

    /// Heuristic defaults aimed at confirmed-claim verdict phrasing.
    static FilterConfig defaults();
    /// Throws InputError when the keyword list is empty or has blank entries.
    void validate() const;
};

struct FilterResult {
    std::vector<ClaimRecord> kept;
    std::vector<ClaimRecord> excluded;
    /// Kept records still awaiting manual review.
    std::size_t unreviewed = 0;
    /// Records whose label alone excluded them.
    std::size_t confirmed_label = 0;
    /// Per keyword, number of records it matched (a record can hit several).
    std::map<std::string, std::size_t> keyword_hits;
};

FilterResult filter_debunked(const std::vector<ClaimRecord>& records, const FilterConfig& cfg);

struct CorpusStats {
    std::size_t total = 0;
    std::map<std::string, std::size_t> per_label;
    std::map<std::string, std::size_t> per_topic;  // records without a topic are not counted
};

CorpusStats corpus_stats(const std::vector<ClaimRecord>& records);

}  // namespace debunk
