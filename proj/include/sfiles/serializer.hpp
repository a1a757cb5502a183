#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sfiles/graph.hpp"

namespace sfiles {

/// How branch order is chosen while writing a graph. Canonical order is a
/// pure function of the isomorphism class; Randomized is a pure function of
/// (isomorphism class, seed) and never uses ambient randomness.
struct SerializationPolicy {
    enum class Mode { Canonical, Randomized };

    Mode mode = Mode::Canonical;
    std::uint64_t seed = 0;

    static SerializationPolicy canonical() { return {}; }
    static SerializationPolicy randomized(std::uint64_t seed) {
        return {Mode::Randomized, seed};
    }
};

/// Unique 1-based rank per node; identical rank-by-category sequences for
/// isomorphic graphs.
struct RankAssignment {
    std::vector<std::uint32_t> rank_of_node;  // indexed by NodeId

    std::uint32_t rank(NodeId id) const { return rank_of_node[id]; }
};

RankAssignment canonical_rank(const FlowsheetGraph& g);

/// Writes the graph as an SFILES string. parse(serialize(g, p)) is always
/// graph_equal to g. Throws SerializationError when the topology cannot be
/// traversed (no feed unit, or process streams reconverge).
std::string serialize(const FlowsheetGraph& g,
                      const SerializationPolicy& policy = SerializationPolicy::canonical());

/// serialize(parse(s)) in canonical mode; idempotent.
std::string canonicalize(std::string_view sfiles);

}  // namespace sfiles
