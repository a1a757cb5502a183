#include "sfiles/graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "sfiles/errors.hpp"
#include "canonical.hpp"

namespace sfiles {

namespace {

bool category_char_ok(char c) {
    if (c >= '0' && c <= '9') {
        return false;
    }
    switch (c) {
        case '(':
        case ')':
        case '{':
        case '}':
        case '[':
        case ']':
        case '<':
        case '>':
        case '&':
        case '|':
        case '%':
        case ' ':
        case '\t':
        case '\n':
        case '\r':
            return false;
        default:
            return true;
    }
}

std::string edge_signature(const FlowsheetGraph& g, std::span<const std::uint32_t> order_of,
                           EdgeId e) {
    const StreamEdge& edge = g.edges[e];
    std::vector<std::string> tags = edge.tags;
    std::sort(tags.begin(), tags.end());
    std::string sig = std::to_string(order_of[edge.from]) + ">" + std::to_string(order_of[edge.to]);
    sig += edge.kind == EdgeKind::Recycle ? "r" : "p";
    for (const auto& t : tags) {
        sig += "{" + t + "}";
    }
    return sig;
}

}  // namespace

std::string FlowsheetGraph::node_name(NodeId id) const {
    return nodes[id].category + "-" + std::to_string(nodes[id].instance_no);
}

int FlowsheetGraph::heat_pair_of(NodeId id) const {
    for (std::size_t i = 0; i < heat_pairs.size(); ++i) {
        if (heat_pairs[i].unit == id) {
            return static_cast<int>(i);
        }
    }
    return -1;
}

void validate_graph(const FlowsheetGraph& g) {
    const auto n = g.nodes.size();
    std::set<std::pair<std::string, int>> seen_names;
    for (const auto& node : g.nodes) {
        if (node.category.empty()) {
            throw ValidationError("invariant violated: unit category must be non-empty");
        }
        for (char c : node.category) {
            if (!category_char_ok(c)) {
                throw ValidationError(
                    "invariant violated: unit category '" + node.category +
                    "' contains a delimiter or digit");
            }
        }
        if (node.instance_no <= 0) {
            throw ValidationError("invariant violated: instance_no must be positive");
        }
        if (!seen_names.insert({node.category, node.instance_no}).second) {
            throw ValidationError("invariant violated: duplicate unit name " + node.category +
                                  "-" + std::to_string(node.instance_no));
        }
    }

    std::vector<int> in_deg(n, 0), out_deg(n, 0);
    for (const auto& edge : g.edges) {
        if (edge.from >= n || edge.to >= n) {
            throw ValidationError("invariant violated: edge endpoint is not a node of the graph");
        }
        std::set<std::string> tagset;
        for (const auto& t : edge.tags) {
            if (t.empty()) {
                throw ValidationError("invariant violated: empty stream tag");
            }
            if (!tagset.insert(t).second) {
                throw ValidationError("invariant violated: duplicate tag '" + t + "' on one edge");
            }
        }
        ++out_deg[edge.from];
        ++in_deg[edge.to];
    }
    for (NodeId i = 0; i < n; ++i) {
        if (g.nodes[i].category == "raw" && in_deg[i] != 0) {
            throw ValidationError("invariant violated: feed unit " + g.node_name(i) +
                                  " has an incoming stream");
        }
        if (g.nodes[i].category == "prod" && out_deg[i] != 0) {
            throw ValidationError("invariant violated: product unit " + g.node_name(i) +
                                  " has an outgoing stream");
        }
    }

    // Heat pairs: for every edge incident to a paired unit, the side touching
    // that unit belongs to exactly one pass slot.
    std::unordered_set<NodeId> paired_units;
    std::unordered_map<EdgeId, int> tail_pair, head_pair;  // side claims -> pair index
    for (std::size_t p = 0; p < g.heat_pairs.size(); ++p) {
        const HeatPair& pair = g.heat_pairs[p];
        if (pair.unit >= n) {
            throw ValidationError("invariant violated: heat pair references a missing unit");
        }
        if (pair.label.empty()) {
            throw ValidationError("invariant violated: heat pair label must be non-empty");
        }
        if (!paired_units.insert(pair.unit).second) {
            throw ValidationError("invariant violated: unit " + g.node_name(pair.unit) +
                                  " belongs to more than one heat pair");
        }
        if (pair.passes.empty()) {
            throw ValidationError("invariant violated: heat pair without passes");
        }
        auto claim = [&](std::unordered_map<EdgeId, int>& side, EdgeId e) {
            if (e >= g.edges.size()) {
                throw ValidationError("invariant violated: heat pass references a missing edge");
            }
            if (!side.emplace(e, static_cast<int>(p)).second) {
                throw ValidationError(
                    "invariant violated: edge side referenced by more than one heat pass slot");
            }
        };
        for (const HeatPass& pass : pair.passes) {
            for (EdgeId e : pass.in_edges) {
                claim(head_pair, e);
                if (g.edges[e].to != pair.unit || g.edges[e].kind != EdgeKind::Process) {
                    throw ValidationError(
                        "invariant violated: heat pass in-edge does not enter its unit");
                }
            }
            for (EdgeId e : pass.out_edges) {
                claim(tail_pair, e);
                if (g.edges[e].from != pair.unit || g.edges[e].kind != EdgeKind::Process) {
                    throw ValidationError(
                        "invariant violated: heat pass out-edge does not leave its unit");
                }
            }
            for (EdgeId e : pass.recycle_edges) {
                if (e >= g.edges.size() || g.edges[e].kind != EdgeKind::Recycle ||
                    (g.edges[e].from != pair.unit && g.edges[e].to != pair.unit)) {
                    throw ValidationError(
                        "invariant violated: heat pass recycle edge is not incident to its unit");
                }
                if (g.edges[e].from == pair.unit) {
                    claim(tail_pair, e);
                }
                if (g.edges[e].to == pair.unit) {
                    claim(head_pair, e);
                }
            }
        }
    }
    for (EdgeId e = 0; e < g.edges.size(); ++e) {
        const StreamEdge& edge = g.edges[e];
        const auto tail_it = tail_pair.find(e);
        const auto head_it = head_pair.find(e);
        if (paired_units.count(edge.from) != 0 && tail_it == tail_pair.end()) {
            throw ValidationError("invariant violated: edge leaving heat-paired unit " +
                                  g.node_name(edge.from) + " is not assigned to a pass");
        }
        if (paired_units.count(edge.to) != 0 && head_it == head_pair.end()) {
            throw ValidationError("invariant violated: edge entering heat-paired unit " +
                                  g.node_name(edge.to) + " is not assigned to a pass");
        }
        // pass_label mirrors the pass owning the tail side, or else the head side
        const int owner = tail_it != tail_pair.end()  ? tail_it->second
                          : head_it != head_pair.end() ? head_it->second
                                                       : -1;
        if (edge.pass_label) {
            if (owner < 0 || g.heat_pairs[owner].label != *edge.pass_label) {
                throw ValidationError(
                    "invariant violated: edge pass_label does not match its heat pair");
            }
        } else if (owner >= 0) {
            throw ValidationError(
                "invariant violated: heat pass member edge is missing its pass_label");
        }
    }
}

void assign_instance_numbers(FlowsheetGraph& g) {
    std::unordered_map<std::string, int> counters;
    for (auto& node : g.nodes) {
        node.instance_no = ++counters[node.category];
    }
}

void normalize_heat_labels(FlowsheetGraph& g) {
    for (std::size_t p = 0; p < g.heat_pairs.size(); ++p) {
        g.heat_pairs[p].label = std::to_string(p + 1);
    }
    // head-side labels first so a tail-side claim wins on shared edges
    for (const HeatPair& pair : g.heat_pairs) {
        for (const HeatPass& pass : pair.passes) {
            for (EdgeId e : pass.in_edges) {
                g.edges[e].pass_label = pair.label;
            }
            for (EdgeId e : pass.recycle_edges) {
                if (g.edges[e].to == pair.unit) {
                    g.edges[e].pass_label = pair.label;
                }
            }
        }
    }
    for (const HeatPair& pair : g.heat_pairs) {
        for (const HeatPass& pass : pair.passes) {
            for (EdgeId e : pass.out_edges) {
                g.edges[e].pass_label = pair.label;
            }
            for (EdgeId e : pass.recycle_edges) {
                if (g.edges[e].from == pair.unit) {
                    g.edges[e].pass_label = pair.label;
                }
            }
        }
    }
}

std::string structure_signature(const FlowsheetGraph& g,
                                std::span<const std::uint32_t> order_of) {
    std::vector<NodeId> node_at(g.nodes.size());
    for (NodeId i = 0; i < g.nodes.size(); ++i) {
        node_at[order_of[i]] = i;
    }
    std::string sig = "n:";
    for (NodeId pos = 0; pos < node_at.size(); ++pos) {
        sig += g.nodes[node_at[pos]].category;
        sig += ';';
    }

    std::vector<std::string> edge_sigs;
    edge_sigs.reserve(g.edges.size());
    for (EdgeId e = 0; e < g.edges.size(); ++e) {
        edge_sigs.push_back(edge_signature(g, order_of, e));
    }
    std::vector<std::string> sorted_edges = edge_sigs;
    std::sort(sorted_edges.begin(), sorted_edges.end());
    sig += "e:";
    for (const auto& s : sorted_edges) {
        sig += s;
        sig += ';';
    }

    std::vector<std::string> pair_sigs;
    for (const HeatPair& pair : g.heat_pairs) {
        std::vector<std::string> pass_sigs;
        for (const HeatPass& pass : pair.passes) {
            std::string ps = "[";
            std::vector<std::string> ins;
            for (EdgeId e : pass.in_edges) {
                ins.push_back(edge_sigs[e]);
            }
            std::sort(ins.begin(), ins.end());
            for (const auto& s : ins) {
                ps += s;
                ps += '+';
            }
            ps += '|';
            std::vector<std::string> outs;
            for (EdgeId e : pass.out_edges) {
                outs.push_back(edge_sigs[e]);
            }
            std::sort(outs.begin(), outs.end());
            for (const auto& s : outs) {
                ps += s;
                ps += '+';
            }
            ps += '|';
            std::vector<std::string> recs;
            for (EdgeId e : pass.recycle_edges) {
                recs.push_back(edge_sigs[e]);
            }
            std::sort(recs.begin(), recs.end());
            for (const auto& s : recs) {
                ps += s;
                ps += '+';
            }
            ps += ']';
            pass_sigs.push_back(std::move(ps));
        }
        std::sort(pass_sigs.begin(), pass_sigs.end());
        std::string psig = "u" + std::to_string(order_of[pair.unit]) + "(";
        for (const auto& s : pass_sigs) {
            psig += s;
        }
        psig += ')';
        pair_sigs.push_back(std::move(psig));
    }
    std::sort(pair_sigs.begin(), pair_sigs.end());
    sig += "h:";
    for (const auto& s : pair_sigs) {
        sig += s;
        sig += ';';
    }
    return sig;
}

bool graph_equal(const FlowsheetGraph& a, const FlowsheetGraph& b) {
    validate_graph(a);
    validate_graph(b);
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size() ||
        a.heat_pairs.size() != b.heat_pairs.size()) {
        return false;
    }
    const auto order_a = detail::canonical_node_order(a);
    const auto order_b = detail::canonical_node_order(b);
    return structure_signature(a, order_a) == structure_signature(b, order_b);
}

namespace {

struct BruteforceState {
    const FlowsheetGraph* a;
    const FlowsheetGraph* b;
    std::vector<int> a_to_b;
    std::vector<bool> b_used;
    // adjacency profile between two nodes: multiset of (direction, kind, tags)
    std::multiset<std::string> pair_profile(const FlowsheetGraph& g, NodeId x, NodeId y) const {
        std::multiset<std::string> out;
        for (const auto& edge : g.edges) {
            if ((edge.from == x && edge.to == y) || (edge.from == y && edge.to == x)) {
                std::vector<std::string> tags = edge.tags;
                std::sort(tags.begin(), tags.end());
                std::string s = edge.from == x ? ">" : "<";
                s += edge.kind == EdgeKind::Recycle ? "r" : "p";
                for (const auto& t : tags) {
                    s += "{" + t + "}";
                }
                out.insert(std::move(s));
            }
        }
        return out;
    }

    bool extend(NodeId next) {
        if (next == a->nodes.size()) {
            std::vector<std::uint32_t> order_a(a->nodes.size());
            std::vector<std::uint32_t> order_b(b->nodes.size());
            for (NodeId i = 0; i < a->nodes.size(); ++i) {
                order_a[i] = i;
                order_b[static_cast<NodeId>(a_to_b[i])] = i;
            }
            return structure_signature(*a, order_a) == structure_signature(*b, order_b);
        }
        for (NodeId cand = 0; cand < b->nodes.size(); ++cand) {
            if (b_used[cand] || b->nodes[cand].category != a->nodes[next].category) {
                continue;
            }
            bool consistent = true;
            for (NodeId prev = 0; prev <= next && consistent; ++prev) {
                const NodeId x = prev == next ? next : prev;
                if (prev != next && a_to_b[prev] < 0) {
                    continue;
                }
                const NodeId y = prev == next ? cand : static_cast<NodeId>(a_to_b[prev]);
                consistent = pair_profile(*a, next, x) == pair_profile(*b, cand, y);
            }
            if (!consistent) {
                continue;
            }
            a_to_b[next] = static_cast<int>(cand);
            b_used[cand] = true;
            if (extend(next + 1)) {
                return true;
            }
            a_to_b[next] = -1;
            b_used[cand] = false;
        }
        return false;
    }
};

}  // namespace

bool graphs_isomorphic_bruteforce(const FlowsheetGraph& a, const FlowsheetGraph& b) {
    constexpr std::size_t kMaxNodes = 12;
    if (a.nodes.size() > kMaxNodes || b.nodes.size() > kMaxNodes) {
        throw SizeError("bijection search limited to 12 nodes",
                        static_cast<std::uint64_t>(std::max(a.nodes.size(), b.nodes.size())));
    }
    validate_graph(a);
    validate_graph(b);
    if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size() ||
        a.heat_pairs.size() != b.heat_pairs.size()) {
        return false;
    }
    auto categories = [](const FlowsheetGraph& g) {
        std::multiset<std::string> out;
        for (const auto& node : g.nodes) {
            out.insert(node.category);
        }
        return out;
    };
    if (categories(a) != categories(b)) {
        return false;
    }
    BruteforceState state;
    state.a = &a;
    state.b = &b;
    state.a_to_b.assign(a.nodes.size(), -1);
    state.b_used.assign(b.nodes.size(), false);
    if (a.nodes.empty()) {
        return true;
    }
    return state.extend(0);
}

}  // namespace sfiles
