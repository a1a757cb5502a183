#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfiles/graph.hpp"

namespace sfiles {

/// Arity rules for one category in the generator palette.
struct CategorySpec {
    std::string category;
    int max_in = 1;   // 0 marks a feed (source)
    int max_out = 1;  // 0 marks a product (sink)
    std::vector<std::string> out_tags;  // fixed tags per outgoing slot
};

std::vector<CategorySpec> default_palette();

struct GeneratorConfig {
    std::uint64_t seed = 0;
    std::uint32_t min_units = 8;
    std::uint32_t max_units = 24;
    double branch_probability = 0.3;
    double recycle_probability = 0.25;
    double heat_integration_probability = 0.15;
    std::vector<CategorySpec> palette = default_palette();
};

/// Builds a random valid flowsheet, deterministically per seed. Sources are
/// feeds, sinks are products, recycles close properly and sibling branches
/// always serialize to distinct strings. Throws ConfigError on an
/// unsatisfiable configuration.
FlowsheetGraph generate(const GeneratorConfig& cfg);

/// count canonical strings, one flowsheet per line, deterministic per seed.
std::vector<std::string> generate_corpus(const GeneratorConfig& cfg, std::size_t count);

}  // namespace sfiles
