#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sfiles {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;

enum class EdgeKind : std::uint8_t { Process, Recycle };

/// One unit operation. (category, instance_no) is unique within a graph;
/// instance numbers are identifiers only and carry no meaning for equality.
struct UnitNode {
    std::string category;
    int instance_no = 1;
};

struct StreamEdge {
    NodeId from = 0;
    NodeId to = 0;
    std::vector<std::string> tags;  // ordered, duplicate-free
    EdgeKind kind = EdgeKind::Process;
    std::optional<std::string> pass_label;  // heat-integration pairing label
};

/// One traversal pass of a heat-integrated unit: the streams entering the
/// unit on that pass, the streams leaving it, and recycle closures placed
/// while the pass was current.
struct HeatPass {
    std::vector<EdgeId> in_edges;
    std::vector<EdgeId> out_edges;
    std::vector<EdgeId> recycle_edges;
};

/// Groups the traversal passes that belong to one physical exchanger.
struct HeatPair {
    std::string label;
    NodeId unit = 0;
    std::vector<HeatPass> passes;
};

/// Directed multigraph of unit operations and tagged stream edges.
/// Treated as immutable once constructed; safe for concurrent reads.
struct FlowsheetGraph {
    std::vector<UnitNode> nodes;
    std::vector<StreamEdge> edges;
    std::vector<HeatPair> heat_pairs;

    std::size_t node_count() const { return nodes.size(); }
    std::size_t edge_count() const { return edges.size(); }

    /// "category-instance" display name, e.g. "dist-1".
    std::string node_name(NodeId id) const;

    /// Index of the heat pair owning a node, or -1.
    int heat_pair_of(NodeId id) const;
};

/// Checks every structural invariant; throws ValidationError naming the
/// first violated one.
void validate_graph(const FlowsheetGraph& g);

/// Reassigns instance numbers per category in node-list order.
void assign_instance_numbers(FlowsheetGraph& g);

/// Renumbers heat pair labels to first-appearance order ("1", "2", ...)
/// and mirrors them onto the member edges' pass_label fields.
void normalize_heat_labels(FlowsheetGraph& g);

/// Structure string for a given node ordering: equal strings mean the two
/// orderings describe identical flowsheets. order_of[node] is the position
/// assigned to that node.
std::string structure_signature(const FlowsheetGraph& g, std::span<const std::uint32_t> order_of);

/// True iff a category/edge/tag/kind/heat-pairing preserving node bijection
/// exists. Instance numbers and marker digits never affect the result.
/// Throws ValidationError if either graph is malformed.
bool graph_equal(const FlowsheetGraph& a, const FlowsheetGraph& b);

/// Exhaustive bijection search; independent oracle for graph_equal.
/// Throws SizeError when either graph has more than 12 nodes.
bool graphs_isomorphic_bruteforce(const FlowsheetGraph& a, const FlowsheetGraph& b);

}  // namespace sfiles
