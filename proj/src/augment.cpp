#include "sfiles/augment.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include "canonical.hpp"
#include "sfiles/errors.hpp"
#include "sfiles/parser.hpp"
#include "sfiles/rng.hpp"

namespace sfiles {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::vector<std::uint64_t> digits_of_index(const detail::TraversalPlan& plan,
                                           std::uint64_t index) {
    std::vector<std::uint64_t> digits(plan.radix.size());
    for (std::size_t i = 0; i < plan.radix.size(); ++i) {
        digits[i] = index % plan.radix[i];
        index /= plan.radix[i];
    }
    return digits;
}

// Uniform k-subset of [0, n) without replacement (Floyd's method).
std::vector<std::uint64_t> sample_distinct(std::uint64_t n, std::uint64_t k, CounterRng& rng) {
    std::set<std::uint64_t> chosen;
    for (std::uint64_t j = n - k; j < n; ++j) {
        const std::uint64_t t = rng.below(j + 1);
        if (!chosen.insert(t).second) {
            chosen.insert(j);
        }
    }
    return {chosen.begin(), chosen.end()};
}

}  // namespace

std::uint64_t count_variants(const FlowsheetGraph& g) {
    return detail::variant_count(detail::build_plan(g));
}

std::set<std::string> enumerate_variants(const FlowsheetGraph& g) {
    const detail::TraversalPlan plan = detail::build_plan(g);
    const std::uint64_t total = detail::variant_count(plan);
    if (total > kEnumerationBound) {
        throw SizeError("variant space of size " + std::to_string(total) +
                            " exceeds the enumeration bound of " +
                            std::to_string(kEnumerationBound),
                        total);
    }
    std::set<std::string> out;
    std::vector<std::uint64_t> digits(plan.radix.size(), 0);
    while (true) {
        out.insert(detail::emit(plan, detail::decisions_from_index_digits(plan, digits)));
        std::size_t i = 0;
        for (; i < digits.size(); ++i) {
            if (++digits[i] < plan.radix[i]) {
                break;
            }
            digits[i] = 0;
        }
        if (i == digits.size()) {
            break;
        }
    }
    return out;
}

AugmentationSet augment(const FlowsheetGraph& g, const AugmentationConfig& cfg) {
    if (cfg.max_augmentations == 0) {
        throw ConfigError("max_augmentations must be at least 1");
    }
    const detail::TraversalPlan plan = detail::build_plan(g);
    const std::uint64_t total = detail::variant_count(plan);

    AugmentationSet result;
    result.canonical = detail::emit(plan, detail::canonical_decisions(plan));
    if (total <= 1) {
        return result;
    }

    CounterRng rng(cfg.seed, 0x617567u);  // sampling stream
    if (total != kSaturated) {
        const std::uint64_t wanted = std::min<std::uint64_t>(cfg.max_augmentations, total - 1);
        // indices 1..total-1 are the non-canonical variants, in mixed-radix
        // order over the rank-sorted decision units
        std::vector<std::uint64_t> picks = sample_distinct(total - 1, wanted, rng);
        for (std::uint64_t& p : picks) {
            ++p;
        }
        for (std::uint64_t index : picks) {
            result.variants.push_back(
                detail::emit(plan, detail::decisions_from_index_digits(plan, digits_of_index(plan, index))));
        }
        return result;
    }

    // Astronomical variant spaces: draw decision vectors independently and
    // deduplicate; collisions are negligible at this size.
    std::set<std::string> seen;
    std::uint64_t attempt = 0;
    while (result.variants.size() < cfg.max_augmentations && attempt < 16384) {
        const detail::DecisionSet decisions =
            detail::randomized_decisions(plan, mix64(cfg.seed, ++attempt));
        std::string s = detail::emit(plan, decisions);
        if (s != result.canonical && seen.insert(s).second) {
            result.variants.push_back(std::move(s));
        }
    }
    return result;
}

AugmentationSet augment(std::string_view sfiles, const AugmentationConfig& cfg) {
    return augment(parse(sfiles), cfg);
}

}  // namespace sfiles
