#include "debunk/persona.hpp"

#include <bit>

#include "debunk/digest.hpp"
#include "debunk/errors.hpp"

namespace debunk {

namespace {

constexpr std::array<std::string_view, 2 * kTraitCount> kVocabulary{
    "Extroverted",   "Introverted",   "Agreeable",          "Antagonistic",
    "Conscientious", "Unconscientious", "Neurotic",         "Emotionally Stable",
    "Open to Experience", "Closed to Experience",
};

constexpr unsigned bit_of(Trait t) noexcept {
    return 4u - static_cast<unsigned>(t);
}

}  // namespace

TraitProfile TraitProfile::from_index(unsigned index) {
    if (index >= kProfileCount) throw InputError("profile index out of range: " + std::to_string(index));
    return TraitProfile(static_cast<std::uint8_t>(index));
}

TraitProfile TraitProfile::from_bits(const std::array<bool, kTraitCount>& bits) {
    unsigned idx = 0;
    for (bool b : bits) idx = (idx << 1) | (b ? 1u : 0u);
    return TraitProfile(static_cast<std::uint8_t>(idx));
}

std::optional<TraitProfile> TraitProfile::try_from_code(std::string_view code) noexcept {
    if (code.size() != kTraitCount) return std::nullopt;
    unsigned idx = 0;
    for (char c : code) {
        if (c != '0' && c != '1') return std::nullopt;
        idx = (idx << 1) | static_cast<unsigned>(c - '0');
    }
    return TraitProfile(static_cast<std::uint8_t>(idx));
}

TraitProfile TraitProfile::from_code(std::string_view code) {
    if (auto p = try_from_code(code)) return *p;
    throw InputError("invalid profile code '" + std::string(code) + "': expected five 0/1 characters");
}

bool TraitProfile::has(Trait t) const noexcept {
    return (index_ >> bit_of(t)) & 1u;
}

std::array<bool, kTraitCount> TraitProfile::bits() const noexcept {
    std::array<bool, kTraitCount> out{};
    for (std::size_t i = 0; i < kTraitCount; ++i) out[i] = has(static_cast<Trait>(i));
    return out;
}

std::string TraitProfile::code() const {
    std::string s(kTraitCount, '0');
    for (std::size_t i = 0; i < kTraitCount; ++i) {
        if (has(static_cast<Trait>(i))) s[i] = '1';
    }
    return s;
}

TraitProfile TraitProfile::complement() const noexcept {
    return TraitProfile(static_cast<std::uint8_t>(~index_ & 0x1f));
}

std::vector<TraitProfile> all_profiles() {
    std::vector<TraitProfile> out;
    out.reserve(kProfileCount);
    for (unsigned i = 0; i < kProfileCount; ++i) out.push_back(TraitProfile::from_index(i));
    return out;
}

std::string_view descriptor(Trait t, bool positive) noexcept {
    return kVocabulary[2 * static_cast<std::size_t>(t) + (positive ? 0 : 1)];
}

const std::array<std::string_view, 2 * kTraitCount>& descriptor_vocabulary() noexcept {
    return kVocabulary;
}

std::string descriptors(TraitProfile p) {
    std::string out;
    for (std::size_t i = 0; i < kTraitCount; ++i) {
        const auto t = static_cast<Trait>(i);
        if (i) out += ", ";
        out += descriptor(t, p.has(t));
    }
    return out;
}

std::optional<TraitProfile> profile_from_descriptors(std::string_view text) {
    // 32 candidates; exact match against each rendering.
    for (unsigned i = 0; i < kProfileCount; ++i) {
        auto p = TraitProfile::from_index(i);
        if (descriptors(p) == text) return p;
    }
    return std::nullopt;
}

int hamming(TraitProfile a, TraitProfile b) noexcept {
    return std::popcount(a.index() ^ b.index());
}

ProfileRelation relation(TraitProfile judge, TraitProfile target) noexcept {
    const int h = hamming(judge, target);
    if (h == 0) return {RelationKind::Matched, h};
    if (h == 1) return {RelationKind::MismatchedClose, h};
    return {RelationKind::MismatchedDistant, h};
}

int positive_count(TraitProfile p) noexcept {
    return std::popcount(p.index());
}

std::vector<TraitProfile> neighbors_at(TraitProfile p, int distance) {
    std::vector<TraitProfile> out;
    for (auto q : all_profiles()) {
        if (hamming(p, q) == distance) out.push_back(q);
    }
    return out;
}

std::vector<TraitProfile> distant_profiles(TraitProfile p) {
    std::vector<TraitProfile> out;
    for (auto q : all_profiles()) {
        if (hamming(p, q) >= 2) out.push_back(q);
    }
    return out;
}

MismatchedPair sample_mismatched(TraitProfile judge, std::string_view claim_id, std::uint64_t seed) {
    std::string key = "mismatched|";
    key += judge.code();
    key += '|';
    key += std::to_string(claim_id.size());
    key += ':';
    key += claim_id;
    key += '|';
    key += std::to_string(seed);

    const auto close = neighbors_at(judge, 1);
    const auto distant = distant_profiles(judge);
    // 64-bit draws; modulo bias against 5 or 26 buckets is below 2^-58.
    const auto close_pick = digest_u64(key, 0) % close.size();
    const auto distant_pick = digest_u64(key, 1) % distant.size();
    return {close[close_pick], distant[distant_pick]};
}

std::string_view to_string(RelationKind k) noexcept {
    switch (k) {
        case RelationKind::Matched: return "matched";
        case RelationKind::MismatchedClose: return "mismatched_close";
        case RelationKind::MismatchedDistant: return "mismatched_distant";
    }
    return "?";
}

}  // namespace debunk
