#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace debunk {

/// Big Five traits in code order. Extraversion is the most significant position.
enum class Trait : std::uint8_t { Extraversion, Agreeableness, Conscientiousness, Neuroticism, Openness };

inline constexpr std::size_t kTraitCount = 5;
inline constexpr std::size_t kProfileCount = 32;

/// A binarized Big Five persona. Serialized everywhere as its 5-character
/// code, e.g. "10101" = Extroverted, Antagonistic, Conscientious,
/// Emotionally Stable, Open to Experience.
class TraitProfile {
public:
    constexpr TraitProfile() = default;

    /// Index in [0, 32); bit 4 is Extraversion, bit 0 is Openness.
    static TraitProfile from_index(unsigned index);
    static TraitProfile from_bits(const std::array<bool, kTraitCount>& bits);
    /// Throws InputError unless `code` is exactly five '0'/'1' characters.
    static TraitProfile from_code(std::string_view code);
    static std::optional<TraitProfile> try_from_code(std::string_view code) noexcept;

    constexpr unsigned index() const noexcept { return index_; }
    bool has(Trait t) const noexcept;
    std::array<bool, kTraitCount> bits() const noexcept;
    std::string code() const;
    TraitProfile complement() const noexcept;

    friend constexpr auto operator<=>(const TraitProfile&, const TraitProfile&) = default;

private:
    constexpr explicit TraitProfile(std::uint8_t index) : index_(index) {}
    std::uint8_t index_ = 0;
};

enum class RelationKind { Matched, MismatchedClose, MismatchedDistant };

struct ProfileRelation {
    RelationKind kind;
    int hamming;
};

/// All 32 profiles in ascending code order ("00000" .. "11111").
std::vector<TraitProfile> all_profiles();

/// Positive/negative pole labels for one trait.
std::string_view descriptor(Trait t, bool positive) noexcept;

/// The ten pole labels, positive first per trait.
const std::array<std::string_view, 2 * kTraitCount>& descriptor_vocabulary() noexcept;

/// ", "-joined descriptors in E,A,C,N,O order.
std::string descriptors(TraitProfile p);

/// Inverse of descriptors(); nullopt when `text` is not an exact rendering.
std::optional<TraitProfile> profile_from_descriptors(std::string_view text);

int hamming(TraitProfile a, TraitProfile b) noexcept;
ProfileRelation relation(TraitProfile judge, TraitProfile target) noexcept;
int positive_count(TraitProfile p) noexcept;

/// Profiles at exactly `distance` from `p`, ascending code order.
std::vector<TraitProfile> neighbors_at(TraitProfile p, int distance);
/// Profiles at distance 2..5 from `p`, ascending code order (26 of them).
std::vector<TraitProfile> distant_profiles(TraitProfile p);

struct MismatchedPair {
    TraitProfile close;
    TraitProfile distant;
};

/// Seeded, reproducible choice of one close (distance 1) and one distant
/// (distance 2..5) partner for a judge on a claim. Both draws are uniform
/// and keyed by a SHA-256 of (judge, claim_id, seed).
MismatchedPair sample_mismatched(TraitProfile judge, std::string_view claim_id, std::uint64_t seed);

std::string_view to_string(RelationKind k) noexcept;

}  // namespace debunk
