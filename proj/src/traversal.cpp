#include "canonical.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <string>
#include <unordered_map>
#include <vector>

#include "sfiles/errors.hpp"
#include "sfiles/rng.hpp"

namespace sfiles::detail {

namespace {

std::string pad_number(std::uint64_t v) {
    std::string s = std::to_string(v);
    return std::string(12 - std::min<std::size_t>(12, s.size()), '0') + s;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, bool& saturated) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        saturated = true;
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

std::uint64_t factorial_sat(std::size_t b, bool& saturated) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= b; ++i) {
        f = saturating_mul(f, i, saturated);
        if (saturated) {
            return f;
        }
    }
    return f;
}

}  // namespace

TravGraph build_traversal_graph(const FlowsheetGraph& g) {
    validate_graph(g);
    TravGraph tg;
    tg.g = &g;
    const std::size_t n = g.nodes.size();

    std::vector<int> pair_of_node(n, -1);
    for (std::size_t p = 0; p < g.heat_pairs.size(); ++p) {
        pair_of_node[g.heat_pairs[p].unit] = static_cast<int>(p);
    }

    std::vector<std::uint32_t> plain(n, kNone);
    for (NodeId i = 0; i < n; ++i) {
        if (pair_of_node[i] < 0) {
            plain[i] = static_cast<std::uint32_t>(tg.nodes.size());
            tg.nodes.push_back({i, -1, -1});
        }
    }
    // side claims: which pass node owns an edge's tail / head
    std::unordered_map<EdgeId, std::uint32_t> tail_owner, head_owner;
    for (std::size_t p = 0; p < g.heat_pairs.size(); ++p) {
        const HeatPair& pair = g.heat_pairs[p];
        for (std::size_t k = 0; k < pair.passes.size(); ++k) {
            const std::uint32_t tnode = static_cast<std::uint32_t>(tg.nodes.size());
            tg.nodes.push_back({pair.unit, static_cast<int>(p), static_cast<int>(k)});
            const HeatPass& pass = pair.passes[k];
            for (EdgeId in : pass.in_edges) {
                head_owner[in] = tnode;
            }
            for (EdgeId e : pass.out_edges) {
                tail_owner[e] = tnode;
            }
            for (EdgeId e : pass.recycle_edges) {
                if (g.edges[e].from == pair.unit) {
                    tail_owner[e] = tnode;
                }
                if (g.edges[e].to == pair.unit) {
                    head_owner[e] = tnode;
                }
            }
        }
    }

    auto endpoint = [&](EdgeId e, bool tail) -> std::uint32_t {
        const NodeId phys = tail ? g.edges[e].from : g.edges[e].to;
        if (pair_of_node[phys] < 0) {
            return plain[phys];
        }
        const auto& owner = tail ? tail_owner : head_owner;
        auto it = owner.find(e);
        if (it == owner.end()) {
            throw ValidationError("invariant violated: edge of heat-integrated unit " +
                                  g.node_name(phys) + " is not assigned to a pass");
        }
        return it->second;
    };

    tg.proc_out.assign(tg.nodes.size(), {});
    tg.proc_in.assign(tg.nodes.size(), {});
    tg.rec_out.assign(tg.nodes.size(), {});
    tg.rec_in.assign(tg.nodes.size(), {});
    for (EdgeId e = 0; e < g.edges.size(); ++e) {
        TravGraph::Edge te;
        te.orig = e;
        te.from = endpoint(e, true);
        te.to = endpoint(e, false);
        te.kind = g.edges[e].kind;
        const std::uint32_t id = static_cast<std::uint32_t>(tg.edges.size());
        tg.edges.push_back(te);
        if (te.kind == EdgeKind::Process) {
            tg.proc_out[te.from].push_back(id);
            tg.proc_in[te.to].push_back(id);
        } else {
            tg.rec_out[te.from].push_back(id);
            tg.rec_in[te.to].push_back(id);
        }
    }
    return tg;
}

namespace {

// Shared context for the refinement passes.
struct RefineContext {
    const TravGraph* tg;
    std::vector<std::string> edge_sig;              // kind + sorted tags, per trav edge
    std::vector<std::vector<std::uint32_t>> partners;  // other passes of the same exchanger
    std::vector<std::string> initial_keys;
    std::vector<std::uint32_t> twin_class;
};

std::string sorted_tag_sig(const StreamEdge& e) {
    std::vector<std::string> tags = e.tags;
    std::sort(tags.begin(), tags.end());
    std::string s = e.kind == EdgeKind::Recycle ? "r" : "p";
    for (const auto& t : tags) {
        s += "{" + t + "}";
    }
    return s;
}

RefineContext make_refine_context(const TravGraph& tg) {
    RefineContext ctx;
    ctx.tg = &tg;
    const std::size_t n = tg.nodes.size();
    ctx.edge_sig.reserve(tg.edges.size());
    for (const auto& te : tg.edges) {
        ctx.edge_sig.push_back(sorted_tag_sig(tg.g->edges[te.orig]));
    }

    ctx.partners.assign(n, {});
    std::map<int, std::vector<std::uint32_t>> by_group;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (tg.nodes[i].heat_group >= 0) {
            by_group[tg.nodes[i].heat_group].push_back(i);
        }
    }
    for (const auto& [group, members] : by_group) {
        for (std::uint32_t m : members) {
            for (std::uint32_t other : members) {
                if (other != m) {
                    ctx.partners[m].push_back(other);
                }
            }
        }
    }

    // downstream reach over process edges, including the node itself
    std::vector<std::uint32_t> reach(n, 0);
    for (std::uint32_t s = 0; s < n; ++s) {
        std::vector<bool> seen(n, false);
        std::vector<std::uint32_t> stack{s};
        seen[s] = true;
        std::uint32_t count = 0;
        while (!stack.empty()) {
            const std::uint32_t u = stack.back();
            stack.pop_back();
            ++count;
            for (std::uint32_t e : tg.proc_out[u]) {
                const std::uint32_t w = tg.edges[e].to;
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        reach[s] = count;
    }

    ctx.initial_keys.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto& node = tg.nodes[i];
        std::string key = tg.g->nodes[node.phys].category;
        key += '\x01';
        // larger downstream reach sorts first
        key += pad_number(static_cast<std::uint64_t>(n) - reach[i]);
        key += pad_number(tg.proc_in[i].size());
        key += pad_number(tg.proc_out[i].size());
        key += pad_number(tg.rec_in[i].size());
        key += pad_number(tg.rec_out[i].size());
        key += pad_number(ctx.partners[i].size());
        auto tag_block = [&](const std::vector<std::uint32_t>& edges) {
            std::vector<std::string> sigs;
            for (std::uint32_t e : edges) {
                sigs.push_back(ctx.edge_sig[e]);
            }
            std::sort(sigs.begin(), sigs.end());
            std::string block = "|";
            for (const auto& s : sigs) {
                block += s + ";";
            }
            return block;
        };
        std::vector<std::uint32_t> all_out = tg.proc_out[i];
        all_out.insert(all_out.end(), tg.rec_out[i].begin(), tg.rec_out[i].end());
        std::vector<std::uint32_t> all_in = tg.proc_in[i];
        all_in.insert(all_in.end(), tg.rec_in[i].begin(), tg.rec_in[i].end());
        key += tag_block(all_out);
        key += tag_block(all_in);
        ctx.initial_keys[i] = std::move(key);
    }

    // exact structural twins: same category, same heat group, identical
    // labelled neighbourhoods. Swapping two twins is an automorphism.
    std::vector<std::string> twin_sig(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto& node = tg.nodes[i];
        std::string sig = tg.g->nodes[node.phys].category + "\x01" +
                          std::to_string(node.heat_group) + "\x01";
        std::vector<std::string> inc;
        for (std::uint32_t e : tg.proc_out[i]) {
            inc.push_back(">" + ctx.edge_sig[e] + pad_number(tg.edges[e].to));
        }
        for (std::uint32_t e : tg.rec_out[i]) {
            inc.push_back(">" + ctx.edge_sig[e] + pad_number(tg.edges[e].to));
        }
        for (std::uint32_t e : tg.proc_in[i]) {
            inc.push_back("<" + ctx.edge_sig[e] + pad_number(tg.edges[e].from));
        }
        for (std::uint32_t e : tg.rec_in[i]) {
            inc.push_back("<" + ctx.edge_sig[e] + pad_number(tg.edges[e].from));
        }
        std::sort(inc.begin(), inc.end());
        for (const auto& s : inc) {
            sig += s + ";";
        }
        twin_sig[i] = std::move(sig);
    }
    std::vector<std::string> sorted_twins = twin_sig;
    std::sort(sorted_twins.begin(), sorted_twins.end());
    sorted_twins.erase(std::unique(sorted_twins.begin(), sorted_twins.end()), sorted_twins.end());
    ctx.twin_class.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        ctx.twin_class[i] = static_cast<std::uint32_t>(
            std::lower_bound(sorted_twins.begin(), sorted_twins.end(), twin_sig[i]) -
            sorted_twins.begin());
    }
    return ctx;
}

std::vector<std::uint32_t> intern_keys(const std::vector<std::string>& keys,
                                       std::size_t& class_count) {
    std::vector<std::string> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    class_count = sorted.size();
    std::vector<std::uint32_t> ids(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        ids[i] = static_cast<std::uint32_t>(
            std::lower_bound(sorted.begin(), sorted.end(), keys[i]) - sorted.begin());
    }
    return ids;
}

std::vector<std::uint32_t> stable_refine(const RefineContext& ctx,
                                         const std::vector<std::string>& start_keys,
                                         std::size_t& class_count) {
    const TravGraph& tg = *ctx.tg;
    const std::size_t n = tg.nodes.size();
    std::vector<std::uint32_t> ids = intern_keys(start_keys, class_count);
    while (class_count < n) {
        std::vector<std::string> keys(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            std::string key = pad_number(ids[i]);
            auto neighbour_block = [&](const std::vector<std::uint32_t>& edges, bool outgoing) {
                std::vector<std::string> parts;
                for (std::uint32_t e : edges) {
                    const std::uint32_t other = outgoing ? tg.edges[e].to : tg.edges[e].from;
                    parts.push_back(ctx.edge_sig[e] + pad_number(ids[other]));
                }
                std::sort(parts.begin(), parts.end());
                std::string block = "|";
                for (const auto& p : parts) {
                    block += p + ";";
                }
                return block;
            };
            std::vector<std::uint32_t> all_out = tg.proc_out[i];
            all_out.insert(all_out.end(), tg.rec_out[i].begin(), tg.rec_out[i].end());
            std::vector<std::uint32_t> all_in = tg.proc_in[i];
            all_in.insert(all_in.end(), tg.rec_in[i].begin(), tg.rec_in[i].end());
            key += neighbour_block(all_out, true);
            key += neighbour_block(all_in, false);
            std::vector<std::uint32_t> partner_ids;
            for (std::uint32_t p : ctx.partners[i]) {
                partner_ids.push_back(ids[p]);
            }
            std::sort(partner_ids.begin(), partner_ids.end());
            key += "|h";
            for (std::uint32_t p : partner_ids) {
                key += pad_number(p);
            }
            keys[i] = std::move(key);
        }
        std::size_t new_count = 0;
        std::vector<std::uint32_t> new_ids = intern_keys(keys, new_count);
        const bool stable = new_count == class_count;
        ids = std::move(new_ids);
        class_count = new_count;
        if (stable) {
            break;
        }
    }
    return ids;
}

std::string traversal_signature(const TravGraph& tg, const std::vector<std::uint32_t>& pos) {
    const std::size_t n = tg.nodes.size();
    std::vector<std::uint32_t> node_at(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        node_at[pos[i]] = i;
    }
    std::string sig = "N:";
    std::map<int, std::size_t> group_rank;
    for (std::uint32_t p = 0; p < n; ++p) {
        const auto& node = tg.nodes[node_at[p]];
        sig += tg.g->nodes[node.phys].category;
        if (node.heat_group >= 0) {
            const auto [it, inserted] = group_rank.emplace(node.heat_group, group_rank.size());
            sig += "@" + std::to_string(it->second);
        }
        sig += ';';
    }
    std::vector<std::string> edge_sigs;
    for (const auto& te : tg.edges) {
        edge_sigs.push_back(pad_number(pos[te.from]) + ">" + pad_number(pos[te.to]) +
                            sorted_tag_sig(tg.g->edges[te.orig]));
    }
    std::sort(edge_sigs.begin(), edge_sigs.end());
    sig += "E:";
    for (const auto& s : edge_sigs) {
        sig += s + ";";
    }
    return sig;
}

struct CanonicalSearch {
    const RefineContext& ctx;
    long leaves = 0;

    struct Result {
        std::vector<std::uint32_t> pos;
        std::string sig;
    };

    Result run(const std::vector<std::string>& keys) {
        const TravGraph& tg = *ctx.tg;
        const std::size_t n = tg.nodes.size();
        std::size_t class_count = 0;
        std::vector<std::uint32_t> ids = stable_refine(ctx, keys, class_count);
        if (class_count == n) {
            if (++leaves > 50000) {
                throw Error("canonical labeling budget exceeded; graph too symmetric");
            }
            return {ids, traversal_signature(tg, ids)};
        }
        // first class with more than one member
        std::uint32_t target = kNone;
        std::vector<std::uint32_t> members;
        for (std::uint32_t c = 0; c < class_count && target == kNone; ++c) {
            members.clear();
            for (std::uint32_t i = 0; i < n; ++i) {
                if (ids[i] == c) {
                    members.push_back(i);
                }
            }
            if (members.size() > 1) {
                target = c;
            }
        }
        assert(target != kNone);
        // interchangeable structural twins: one representative suffices
        bool all_twins = true;
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (ctx.twin_class[members[i]] != ctx.twin_class[members[0]]) {
                all_twins = false;
                break;
            }
        }
        if (all_twins) {
            members.resize(1);
        }
        Result best;
        bool have = false;
        for (std::uint32_t m : members) {
            std::vector<std::string> keys2(n);
            for (std::uint32_t i = 0; i < n; ++i) {
                keys2[i] = pad_number(ids[i]);
            }
            keys2[m] += "!";
            Result cand = run(keys2);
            if (!have || cand.sig < best.sig) {
                best = std::move(cand);
                have = true;
            }
        }
        return best;
    }
};

}  // namespace

std::vector<std::uint32_t> canonical_positions(const TravGraph& tg) {
    if (tg.nodes.empty()) {
        return {};
    }
    RefineContext ctx = make_refine_context(tg);
    CanonicalSearch search{ctx};
    return search.run(ctx.initial_keys).pos;
}

std::vector<std::uint32_t> canonical_node_order(const FlowsheetGraph& g) {
    TravGraph tg = build_traversal_graph(g);
    const auto pos = canonical_positions(tg);
    std::vector<std::uint32_t> best(g.nodes.size(), kNone);
    for (std::uint32_t i = 0; i < tg.nodes.size(); ++i) {
        best[tg.nodes[i].phys] = std::min(best[tg.nodes[i].phys], pos[i]);
    }
    std::vector<NodeId> order(g.nodes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return best[a] < best[b]; });
    std::vector<std::uint32_t> order_of(g.nodes.size());
    for (std::uint32_t rank = 0; rank < order.size(); ++rank) {
        order_of[order[rank]] = rank;
    }
    return order_of;
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool merge(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[b] = a;
        return true;
    }
};

}  // namespace

TraversalPlan build_plan(const FlowsheetGraph& g) {
    TraversalPlan plan;
    plan.tg = build_traversal_graph(g);
    const TravGraph& tg = plan.tg;
    const std::size_t n = tg.nodes.size();
    plan.pos = canonical_positions(tg);
    plan.nodes.assign(n, {});

    UnionFind uf(n);
    for (const auto& te : tg.edges) {
        if (te.kind != EdgeKind::Process) {
            continue;
        }
        if (!uf.merge(te.from, te.to)) {
            throw SerializationError(
                "process streams reconverge without a recycle closure; "
                "flowsheet is not expressible as a traversal string");
        }
    }

    std::map<std::uint32_t, std::vector<std::uint32_t>> components;
    for (std::uint32_t i = 0; i < n; ++i) {
        components[uf.find(i)].push_back(i);
    }
    std::vector<std::uint32_t> starts;
    for (const auto& [root, members] : components) {
        std::uint32_t start = kNone;
        for (std::uint32_t m : members) {
            if (!tg.proc_in[m].empty()) {
                continue;
            }
            if (start == kNone || plan.pos[m] < plan.pos[start]) {
                start = m;
            }
        }
        if (start == kNone) {
            throw SerializationError("no traversal start: subprocess has no feed unit");
        }
        starts.push_back(start);
    }
    std::sort(starts.begin(), starts.end(),
              [&](std::uint32_t a, std::uint32_t b) { return plan.pos[a] < plan.pos[b]; });
    plan.starts = starts;

    // The process edges of each component form an undirected tree; walk it
    // from the start to assign every edge its emission role.
    std::vector<bool> visited(n, false);
    for (std::uint32_t start : starts) {
        std::vector<std::uint32_t> stack{start};
        visited[start] = true;
        while (!stack.empty()) {
            const std::uint32_t u = stack.back();
            stack.pop_back();
            for (std::uint32_t e : tg.proc_out[u]) {
                const std::uint32_t w = tg.edges[e].to;
                if (!visited[w]) {
                    visited[w] = true;
                    plan.nodes[u].branches.push_back(e);
                    plan.nodes[w].main_in = e;
                    stack.push_back(w);
                }
            }
            for (std::uint32_t e : tg.proc_in[u]) {
                const std::uint32_t w = tg.edges[e].from;
                if (!visited[w]) {
                    visited[w] = true;
                    plan.nodes[u].groups.push_back(e);
                    plan.nodes[w].exit_edge = e;
                    plan.nodes[w].chain_end = true;
                    stack.push_back(w);
                }
            }
        }
    }

    for (std::uint32_t u = 0; u < n; ++u) {
        PlanNode& pn = plan.nodes[u];
        if (pn.chain_end && !pn.groups.empty()) {
            // lowest-ranked feeder becomes the inline prefix of this chain
            auto main_it = std::min_element(
                pn.groups.begin(), pn.groups.end(), [&](std::uint32_t a, std::uint32_t b) {
                    return plan.pos[tg.edges[a].from] < plan.pos[tg.edges[b].from];
                });
            pn.main_in = *main_it;
            pn.groups.erase(main_it);
        }
        std::sort(pn.groups.begin(), pn.groups.end(), [&](std::uint32_t a, std::uint32_t b) {
            return plan.pos[tg.edges[a].from] < plan.pos[tg.edges[b].from];
        });
        std::sort(pn.branches.begin(), pn.branches.end(), [&](std::uint32_t a, std::uint32_t b) {
            return plan.pos[tg.edges[a].to] < plan.pos[tg.edges[b].to];
        });
        pn.refs = tg.rec_in[u];
        std::sort(pn.refs.begin(), pn.refs.end(), [&](std::uint32_t a, std::uint32_t b) {
            return plan.pos[tg.edges[a].from] < plan.pos[tg.edges[b].from];
        });
        pn.marks = tg.rec_out[u];
        std::sort(pn.marks.begin(), pn.marks.end(), [&](std::uint32_t a, std::uint32_t b) {
            return plan.pos[tg.edges[a].to] < plan.pos[tg.edges[b].to];
        });
    }

    std::vector<std::uint32_t> by_rank(n);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(),
              [&](std::uint32_t a, std::uint32_t b) { return plan.pos[a] < plan.pos[b]; });
    for (std::uint32_t u : by_rank) {
        const PlanNode& pn = plan.nodes[u];
        const std::size_t b = pn.branches.size();
        bool sat = false;
        std::uint64_t radix = factorial_sat(b, sat);
        const bool flag = !pn.chain_end && !pn.marks.empty() && b > 0;
        if (flag) {
            radix = saturating_mul(radix, 2, sat);
        }
        if (sat) {
            plan.saturated = true;
        }
        if (radix > 1) {
            plan.decision_nodes.push_back(u);
            plan.radix.push_back(radix);
        }
    }
    return plan;
}

DecisionSet canonical_decisions(const TraversalPlan& plan) {
    DecisionSet out;
    out.reserve(plan.decision_nodes.size());
    for (std::uint32_t u : plan.decision_nodes) {
        Decision d;
        d.branch_order = plan.nodes[u].branches;
        out.push_back(std::move(d));
    }
    return out;
}

namespace {

std::vector<std::uint32_t> unrank_permutation(const std::vector<std::uint32_t>& items,
                                              std::uint64_t index) {
    std::vector<std::uint32_t> pool = items;
    std::vector<std::uint32_t> out;
    out.reserve(items.size());
    bool sat = false;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const std::uint64_t f = factorial_sat(items.size() - 1 - i, sat);
        const std::size_t j = static_cast<std::size_t>(index / f);
        index %= f;
        out.push_back(pool[j]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return out;
}

}  // namespace

DecisionSet decisions_from_index_digits(const TraversalPlan& plan,
                                        std::span<const std::uint64_t> digits) {
    assert(digits.size() == plan.decision_nodes.size());
    DecisionSet out;
    out.reserve(digits.size());
    for (std::size_t i = 0; i < digits.size(); ++i) {
        const PlanNode& pn = plan.nodes[plan.decision_nodes[i]];
        bool sat = false;
        const std::uint64_t perms = factorial_sat(pn.branches.size(), sat);
        Decision d;
        d.branch_order = unrank_permutation(pn.branches, digits[i] % perms);
        d.recycles_last = (digits[i] / perms) != 0;
        out.push_back(std::move(d));
    }
    return out;
}

DecisionSet randomized_decisions(const TraversalPlan& plan, std::uint64_t seed) {
    DecisionSet out;
    out.reserve(plan.decision_nodes.size());
    for (std::size_t i = 0; i < plan.decision_nodes.size(); ++i) {
        const std::uint32_t u = plan.decision_nodes[i];
        const PlanNode& pn = plan.nodes[u];
        CounterRng rng(seed, plan.pos[u] + 1);
        bool sat = false;
        const std::uint64_t perms = factorial_sat(pn.branches.size(), sat);
        Decision d;
        if (!sat) {
            const std::uint64_t digit = rng.below(plan.radix[i]);
            d.branch_order = unrank_permutation(pn.branches, digit % perms);
            d.recycles_last = (digit / perms) != 0;
        } else {
            d.branch_order = pn.branches;
            for (std::size_t k = d.branch_order.size(); k > 1; --k) {
                std::swap(d.branch_order[k - 1], d.branch_order[rng.below(k)]);
            }
            const bool flag = !pn.chain_end && !pn.marks.empty();
            d.recycles_last = flag && rng.below(2) == 1;
        }
        out.push_back(std::move(d));
    }
    return out;
}

namespace {

struct Emitter {
    const TraversalPlan& plan;
    const DecisionSet& decisions;
    BranchCapture* capture;
    std::vector<std::uint32_t> decision_index;
    std::string out;

    std::unordered_map<std::uint32_t, long> digit_of;
    std::unordered_map<std::uint32_t, int> sides_done;
    std::vector<long> free_digits;  // kept sorted descending; back() is smallest
    long next_digit = 1;
    std::vector<std::string> group_label;
    int next_label = 1;

    Emitter(const TraversalPlan& p, const DecisionSet& d, BranchCapture* cap)
        : plan(p), decisions(d), capture(cap) {
        decision_index.assign(plan.tg.nodes.size(), kNone);
        for (std::uint32_t i = 0; i < plan.decision_nodes.size(); ++i) {
            decision_index[plan.decision_nodes[i]] = i;
        }
        group_label.assign(plan.tg.g->heat_pairs.size(), {});
        if (capture) {
            capture->texts.assign(plan.tg.nodes.size(), {});
            for (std::uint32_t u = 0; u < plan.tg.nodes.size(); ++u) {
                capture->texts[u].assign(plan.nodes[u].branches.size(), {});
            }
        }
    }

    std::string run() {
        for (std::size_t i = 0; i < plan.starts.size(); ++i) {
            if (i > 0) {
                out += "n|";
            }
            chain_from(plan.starts[i]);
        }
        return std::move(out);
    }

    long digit_for(std::uint32_t trav_edge) {
        auto it = digit_of.find(trav_edge);
        if (it != digit_of.end()) {
            return it->second;
        }
        long d;
        if (!free_digits.empty()) {
            d = free_digits.back();
            free_digits.pop_back();
        } else {
            d = next_digit++;
        }
        digit_of.emplace(trav_edge, d);
        return d;
    }

    void close_side(std::uint32_t trav_edge) {
        if (++sides_done[trav_edge] == 2) {
            const long d = digit_of[trav_edge];
            free_digits.push_back(d);
            std::sort(free_digits.begin(), free_digits.end(), std::greater<>());
        }
    }

    static std::string format_number(long d) {
        return d < 10 ? std::to_string(d) : "%" + std::to_string(d);
    }

    std::string tags_str(std::uint32_t trav_edge) const {
        std::string s;
        for (const auto& t : plan.tg.stream(trav_edge).tags) {
            s += "{" + t + "}";
        }
        return s;
    }

    std::size_t branch_slot(std::uint32_t u, std::uint32_t edge) const {
        const auto& branches = plan.nodes[u].branches;
        return static_cast<std::size_t>(
            std::find(branches.begin(), branches.end(), edge) - branches.begin());
    }

    // Writes one unit and everything bound to it. Returns the edge of the
    // inline continuation, or kNone when the chain ends here.
    std::uint32_t unit_body(std::uint32_t u) {
        const PlanNode& pn = plan.nodes[u];
        const TravGraph& tg = plan.tg;
        const auto& node = tg.nodes[u];
        out += "(" + tg.g->nodes[node.phys].category + ")";
        if (node.heat_group >= 0) {
            std::string& label = group_label[node.heat_group];
            if (label.empty()) {
                label = std::to_string(next_label++);
            }
            out += "{" + label + "}";
        }

        auto numbered = [&](const std::vector<std::uint32_t>& edges) {
            std::vector<std::pair<long, std::uint32_t>> with_digits;
            for (std::uint32_t e : edges) {
                with_digits.emplace_back(digit_for(e), e);
            }
            std::sort(with_digits.begin(), with_digits.end());
            return with_digits;
        };
        for (const auto& [d, e] : numbered(pn.refs)) {
            out += "<" + format_number(d);
            close_side(e);
        }
        for (const auto& [d, e] : numbered(pn.marks)) {
            out += tags_str(e);
            out += format_number(d);
            close_side(e);
        }
        for (std::uint32_t e : pn.groups) {
            out += "<&|";
            chain_ending_at(tg.edges[e].from);
            out += tags_str(e);
            out += "&|";
        }

        const std::uint32_t di = decision_index[u];
        const std::vector<std::uint32_t>& order =
            di == kNone ? pn.branches : decisions[di].branch_order;
        const bool recycles_last = di == kNone ? false : decisions[di].recycles_last;
        const bool all_bracketed = pn.chain_end || recycles_last;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const std::uint32_t e = order[i];
            if (!all_bracketed && i + 1 == order.size()) {
                return e;  // trailing branch continues the chain inline
            }
            out += "[";
            const std::size_t start = out.size();
            out += tags_str(e);
            chain_from(tg.edges[e].to);
            if (capture) {
                capture->texts[u][branch_slot(u, e)] = out.substr(start);
            }
            out += "]";
        }
        return kNone;
    }

    void chain_from(std::uint32_t u) {
        std::vector<std::pair<std::pair<std::uint32_t, std::size_t>, std::size_t>> trailing;
        std::uint32_t cur = u;
        while (true) {
            const std::uint32_t e = unit_body(cur);
            if (e == kNone) {
                break;
            }
            if (capture) {
                trailing.push_back({{cur, branch_slot(cur, e)}, out.size()});
            }
            out += tags_str(e);
            cur = plan.tg.edges[e].to;
        }
        for (const auto& [slot, start] : trailing) {
            capture->texts[slot.first][slot.second] = out.substr(start);
        }
    }

    void chain_ending_at(std::uint32_t w) {
        const PlanNode& pn = plan.nodes[w];
        if (pn.main_in != kNone) {
            chain_ending_at(plan.tg.edges[pn.main_in].from);
            out += tags_str(pn.main_in);
        }
        unit_body(w);
    }
};

}  // namespace

std::string emit(const TraversalPlan& plan, const DecisionSet& decisions, BranchCapture* capture) {
    Emitter emitter(plan, decisions, capture);
    return emitter.run();
}

std::uint64_t variant_count(const TraversalPlan& plan) {
    bool sat = plan.saturated;
    std::uint64_t total = 1;
    for (std::uint64_t r : plan.radix) {
        total = saturating_mul(total, r, sat);
        if (sat) {
            return std::numeric_limits<std::uint64_t>::max();
        }
    }
    return sat ? std::numeric_limits<std::uint64_t>::max() : total;
}

}  // namespace sfiles::detail
