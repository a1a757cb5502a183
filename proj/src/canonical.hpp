#pragma once

// Internal machinery shared by the serializer, the augmentation engine and
// graph equality: traversal-graph construction, canonical node ordering and
// the traversal plan that fixes how a flowsheet is written as a string.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sfiles/graph.hpp"

namespace sfiles::detail {

inline constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

/// View of the graph used for traversal: each pass of a heat-integrated unit
/// becomes its own node, so traversal-independent sections separate cleanly.
struct TravGraph {
    struct Node {
        NodeId phys = 0;
        int heat_group = -1;  // index into g->heat_pairs, -1 if unpaired
        int pass_index = -1;
    };
    struct Edge {
        EdgeId orig = 0;
        std::uint32_t from = 0;
        std::uint32_t to = 0;
        EdgeKind kind = EdgeKind::Process;
    };

    const FlowsheetGraph* g = nullptr;
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::vector<std::vector<std::uint32_t>> proc_out, proc_in, rec_out, rec_in;

    const StreamEdge& stream(std::uint32_t trav_edge) const {
        return g->edges[edges[trav_edge].orig];
    }
};

TravGraph build_traversal_graph(const FlowsheetGraph& g);

/// Canonical position (0-based) of every traversal node. Invariant under
/// node relabeling: isomorphic graphs receive corresponding positions.
std::vector<std::uint32_t> canonical_positions(const TravGraph& tg);

/// Canonical position of every physical node, derived from the traversal
/// positions. order_of[node] = position.
std::vector<std::uint32_t> canonical_node_order(const FlowsheetGraph& g);

/// Per-node emission recipe. Branch order is the canonical one; the decision
/// machinery permutes it.
struct PlanNode {
    std::uint32_t main_in = kNone;    // traversal edge arriving inline
    std::uint32_t exit_edge = kNone;  // set for feeders: implicit edge to the fed unit
    bool chain_end = false;           // feeder emission: every branch bracketed
    std::vector<std::uint32_t> groups;    // incoming-group edges, feeder side, rank order
    std::vector<std::uint32_t> branches;  // outgoing process edges, rank order
    std::vector<std::uint32_t> refs;      // recycle edges closing here, partner rank order
    std::vector<std::uint32_t> marks;     // recycle edges leaving here, partner rank order
};

struct TraversalPlan {
    TravGraph tg;
    std::vector<std::uint32_t> pos;      // canonical position per traversal node
    std::vector<PlanNode> nodes;         // indexed by traversal node
    std::vector<std::uint32_t> starts;   // subprocess entry nodes, emission order
    // Units with more than one admissible write order, in rank order.
    std::vector<std::uint32_t> decision_nodes;
    std::vector<std::uint64_t> radix;    // choice count per decision node (saturating)
    bool saturated = false;              // some radix overflowed 64 bits
};

/// Builds the plan; throws SerializationError when the topology has no
/// traversal start or its process streams are not expressible as one string.
TraversalPlan build_plan(const FlowsheetGraph& g);

/// One branch-order choice at every decision node.
struct Decision {
    std::vector<std::uint32_t> branch_order;  // permutation of PlanNode::branches
    bool recycles_last = false;               // bracket the trailing branch
};

using DecisionSet = std::vector<Decision>;  // parallel to plan.decision_nodes

DecisionSet canonical_decisions(const TraversalPlan& plan);
DecisionSet decisions_from_index_digits(const TraversalPlan& plan,
                                        std::span<const std::uint64_t> digits);
DecisionSet randomized_decisions(const TraversalPlan& plan, std::uint64_t seed);

/// Records the text written for each outgoing branch, keyed by traversal
/// node and branch slot in plan order. Used to prove sibling branches yield
/// distinct strings.
struct BranchCapture {
    // capture[node id] -> text per branch slot (plan order)
    std::vector<std::vector<std::string>> texts;
};

std::string emit(const TraversalPlan& plan, const DecisionSet& decisions,
                 BranchCapture* capture = nullptr);

/// Number of distinct strings the emitter can produce; saturates at the
/// maximum 64-bit value.
std::uint64_t variant_count(const TraversalPlan& plan);

}  // namespace sfiles::detail
