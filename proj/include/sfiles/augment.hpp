#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "sfiles/graph.hpp"

namespace sfiles {

/// Variant spaces above this size are refused by enumerate_variants.
inline constexpr std::uint64_t kEnumerationBound = 10000;

struct AugmentationConfig {
    std::uint32_t max_augmentations = 5;
    std::uint64_t seed = 0;
    bool include_canonical = false;
};

/// Distinct non-canonical strings for one flowsheet. Every variant
/// canonicalizes back to `canonical`, which is never a member of `variants`.
struct AugmentationSet {
    std::string canonical;
    std::vector<std::string> variants;
};

/// Number of distinct strings reachable by reordering branch decisions,
/// including the canonical one. Saturates at the maximum 64-bit value.
std::uint64_t count_variants(const FlowsheetGraph& g);

/// All strings the serializer can produce for g, canonical included.
/// Throws SizeError carrying count_variants(g) above kEnumerationBound.
std::set<std::string> enumerate_variants(const FlowsheetGraph& g);

/// Samples min(cfg.max_augmentations, count_variants - 1) distinct
/// non-canonical strings, uniformly without replacement, deterministically
/// in (isomorphism class, seed).
AugmentationSet augment(std::string_view sfiles, const AugmentationConfig& cfg);
AugmentationSet augment(const FlowsheetGraph& g, const AugmentationConfig& cfg);

}  // namespace sfiles
