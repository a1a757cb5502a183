#include "sfiles/generator.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "canonical.hpp"
#include "parallel.hpp"
#include "sfiles/errors.hpp"
#include "sfiles/rng.hpp"
#include "sfiles/serializer.hpp"

namespace sfiles {

std::vector<CategorySpec> default_palette() {
    return {
        {"raw", 0, 1, {}},
        {"prod", 1, 0, {}},
        {"hex", 1, 1, {}},
        {"r", 1, 1, {}},
        {"v", 1, 1, {}},
        {"pp", 1, 1, {}},
        {"mix", 4, 1, {}},
        {"splt", 1, 4, {}},
        {"dist", 1, 2, {"tout", "bout"}},
    };
}

namespace {

struct Roles {
    std::string source;
    std::string sink;
    std::vector<std::string> chain;
    std::string mixer;
    std::string splitter;
    int splitter_max_out = 0;
    std::string tagged_splitter;
    std::vector<std::string> tagged_outs;
    bool has_hex = false;
};

Roles find_roles(const GeneratorConfig& cfg) {
    Roles roles;
    for (const auto& spec : cfg.palette) {
        if (spec.category.empty()) {
            throw ConfigError("palette category must be non-empty");
        }
        if (spec.max_in == 0 && spec.max_out >= 1 && roles.source.empty()) {
            roles.source = spec.category;
        } else if (spec.max_out == 0 && spec.max_in >= 1 && roles.sink.empty()) {
            roles.sink = spec.category;
        } else if (spec.max_in == 1 && spec.max_out == 1) {
            roles.chain.push_back(spec.category);
            if (spec.category == "hex") {
                roles.has_hex = true;
            }
        } else if (spec.max_in >= 2 && spec.max_out == 1 && roles.mixer.empty()) {
            roles.mixer = spec.category;
        } else if (spec.max_in == 1 && spec.max_out >= 2) {
            if (!spec.out_tags.empty() && roles.tagged_splitter.empty()) {
                roles.tagged_splitter = spec.category;
                roles.tagged_outs = spec.out_tags;
            } else if (spec.out_tags.empty() && roles.splitter.empty()) {
                roles.splitter = spec.category;
                roles.splitter_max_out = spec.max_out;
            }
        }
    }
    if (roles.source.empty()) {
        throw ConfigError("palette has no feed category (max_in = 0)");
    }
    if (roles.sink.empty()) {
        throw ConfigError("palette has no product category (max_out = 0)");
    }
    if (roles.chain.empty()) {
        throw ConfigError("palette has no pass-through category");
    }
    return roles;
}

struct Inserted {
    NodeId unit;
    EdgeId in_edge;
    EdgeId out_edge;
};

class Builder {
public:
    Builder(const GeneratorConfig& cfg, const Roles& roles)
        : cfg_(cfg), roles_(roles), rng_(cfg.seed, 0x67656eu) {}

    FlowsheetGraph run() {
        const std::uint32_t span = cfg_.max_units - cfg_.min_units;
        target_ = cfg_.min_units + (span == 0 ? 0 : rng_.below(span + 1));
        build_main_chain();
        decorate();
        add_heat_integration();
        ensure_distinct_siblings();
        assign_instance_numbers(g_);
        normalize_heat_labels(g_);
        validate_graph(g_);
        return std::move(g_);
    }

private:
    NodeId add_node(const std::string& cat) {
        g_.nodes.push_back({cat, 1});
        return static_cast<NodeId>(g_.nodes.size() - 1);
    }

    EdgeId add_edge(NodeId from, NodeId to, EdgeKind kind = EdgeKind::Process,
                    std::vector<std::string> tags = {}) {
        g_.edges.push_back({from, to, std::move(tags), kind, std::nullopt});
        return static_cast<EdgeId>(g_.edges.size() - 1);
    }

    std::string pick_chain_cat() {
        return roles_.chain[static_cast<std::size_t>(rng_.below(roles_.chain.size()))];
    }

    // Splits edge e around a fresh unit. Pass-owned edge sides keep their
    // binding: the rewritten half stays attached to the pass's unit.
    Inserted insert_unit_on(EdgeId e, const std::string& cat) {
        const NodeId x = add_node(cat);
        StreamEdge& edge = g_.edges[e];
        Inserted ins;
        ins.unit = x;
        if (head_owned_.count(e) != 0) {
            const NodeId u = edge.from;
            std::vector<std::string> tags = std::move(edge.tags);
            edge.tags.clear();
            edge.from = x;
            ins.in_edge = add_edge(u, x, EdgeKind::Process, std::move(tags));
            ins.out_edge = e;
        } else {
            const NodeId v = edge.to;
            edge.to = x;
            ins.in_edge = e;
            ins.out_edge = add_edge(x, v);
        }
        return ins;
    }

    std::vector<EdgeId> insertion_candidates() const {
        std::vector<EdgeId> out;
        for (EdgeId e = 0; e < g_.edges.size(); ++e) {
            if (g_.edges[e].kind != EdgeKind::Process) {
                continue;
            }
            if (head_owned_.count(e) != 0 && tail_owned_.count(e) != 0) {
                continue;
            }
            out.push_back(e);
        }
        return out;
    }

    EdgeId pick_edge() {
        const auto candidates = insertion_candidates();
        return candidates[static_cast<std::size_t>(rng_.below(candidates.size()))];
    }

    void build_main_chain() {
        const std::size_t interior = std::max<std::size_t>(1, target_ / 3);
        NodeId prev = add_node(roles_.source);
        for (std::size_t i = 0; i < interior; ++i) {
            const NodeId c = add_node(pick_chain_cat());
            add_edge(prev, c);
            prev = c;
        }
        add_edge(prev, add_node(roles_.sink));
    }

    // side chain hung off `from`, ending in a product
    EdgeId grow_side_chain(NodeId from, std::size_t interior, std::vector<std::string> first_tags) {
        NodeId prev = from;
        EdgeId first = 0;
        bool first_set = false;
        for (std::size_t i = 0; i < interior; ++i) {
            const NodeId c = add_node(pick_chain_cat());
            const EdgeId e = add_edge(prev, c, EdgeKind::Process,
                                      first_set ? std::vector<std::string>{} : std::move(first_tags));
            if (!first_set) {
                first = e;
                first_set = true;
                first_tags.clear();
            }
            prev = c;
        }
        const EdgeId e = add_edge(prev, add_node(roles_.sink), EdgeKind::Process,
                                  first_set ? std::vector<std::string>{} : std::move(first_tags));
        return first_set ? first : e;
    }

    void add_branch() {
        const EdgeId at = pick_edge();
        const bool tagged = !roles_.tagged_splitter.empty() &&
                            (roles_.splitter.empty() || rng_.below(2) == 0);
        if (tagged) {
            const Inserted ins = insert_unit_on(at, roles_.tagged_splitter);
            g_.edges[ins.out_edge].tags.push_back(roles_.tagged_outs[1]);
            std::size_t interior = rng_.below(3);
            if (interior == 0 && g_.nodes[g_.edges[ins.out_edge].to].category == roles_.sink) {
                interior = 1;
            }
            grow_side_chain(ins.unit, interior, {roles_.tagged_outs[0]});
        } else if (!roles_.splitter.empty()) {
            const Inserted ins = insert_unit_on(at, roles_.splitter);
            std::size_t sides = 1;
            if (roles_.splitter_max_out >= 3 && rng_.below(4) == 0) {
                sides = 2;
            }
            for (std::size_t s = 0; s < sides; ++s) {
                std::size_t interior = 1 + rng_.below(2) + s;
                grow_side_chain(ins.unit, interior, {});
            }
        }
    }

    void add_recycle() {
        if (roles_.mixer.empty() || roles_.splitter.empty()) {
            return;
        }
        const EdgeId at = pick_edge();
        const Inserted mix = insert_unit_on(at, roles_.mixer);
        EdgeId cur = mix.out_edge;
        const std::size_t spacing = rng_.below(3);
        for (std::size_t i = 0; i < spacing; ++i) {
            cur = insert_unit_on(cur, pick_chain_cat()).out_edge;
        }
        const Inserted splt = insert_unit_on(cur, roles_.splitter);
        add_edge(splt.unit, mix.unit, EdgeKind::Recycle);
    }

    void add_feed() {
        if (roles_.mixer.empty()) {
            return;
        }
        const EdgeId at = pick_edge();
        const Inserted mix = insert_unit_on(at, roles_.mixer);
        NodeId prev = add_node(roles_.source);
        const std::size_t interior = rng_.below(3);
        for (std::size_t i = 0; i < interior; ++i) {
            const NodeId c = add_node(pick_chain_cat());
            add_edge(prev, c);
            prev = c;
        }
        add_edge(prev, mix.unit);
    }

    void decorate() {
        std::size_t guard = 0;
        while (g_.nodes.size() < target_ && ++guard < 400) {
            bool fired = false;
            if (g_.nodes.size() + 3 <= target_ && rng_.bernoulli(cfg_.branch_probability)) {
                add_branch();
                fired = true;
            }
            if (g_.nodes.size() + 2 <= target_ && rng_.bernoulli(cfg_.recycle_probability)) {
                add_recycle();
                fired = true;
            }
            if (g_.nodes.size() + 2 <= target_ && rng_.bernoulli(cfg_.recycle_probability)) {
                add_feed();
                fired = true;
            }
            if (!fired && g_.nodes.size() < target_) {
                insert_unit_on(pick_edge(), pick_chain_cat());
            }
        }
    }

    void add_heat_integration() {
        if (!roles_.has_hex) {
            return;
        }
        for (int attempt = 0; attempt < 2; ++attempt) {
            if (!rng_.bernoulli(cfg_.heat_integration_probability)) {
                continue;
            }
            const Inserted main_pass = insert_unit_on(pick_edge(), "hex");
            const NodeId raw_f = add_node(roles_.source);
            const NodeId prod_f = add_node(roles_.sink);
            const EdgeId side_in = add_edge(raw_f, main_pass.unit);
            const EdgeId side_out = add_edge(main_pass.unit, prod_f);
            HeatPair pair;
            pair.label = std::to_string(g_.heat_pairs.size() + 1);
            pair.unit = main_pass.unit;
            pair.passes.push_back({{main_pass.in_edge}, {main_pass.out_edge}, {}});
            pair.passes.push_back({{side_in}, {side_out}, {}});
            g_.heat_pairs.push_back(std::move(pair));
            head_owned_.insert(main_pass.in_edge);
            head_owned_.insert(side_in);
            tail_owned_.insert(main_pass.out_edge);
            tail_owned_.insert(side_out);
        }
    }

    // Sibling branches that render identically would collapse under
    // reordering; lengthen one of them until every pair differs.
    void ensure_distinct_siblings() {
        for (int round = 0; round < 64; ++round) {
            assign_instance_numbers(g_);
            normalize_heat_labels(g_);
            detail::TraversalPlan plan = detail::build_plan(g_);
            detail::BranchCapture capture;
            detail::emit(plan, detail::canonical_decisions(plan), &capture);
            EdgeId mutate = 0;
            bool found = false;
            for (std::uint32_t u = 0; u < capture.texts.size() && !found; ++u) {
                const auto& texts = capture.texts[u];
                for (std::size_t i = 0; i < texts.size() && !found; ++i) {
                    for (std::size_t j = i + 1; j < texts.size() && !found; ++j) {
                        if (texts[i] == texts[j]) {
                            mutate = plan.tg.edges[plan.nodes[u].branches[j]].orig;
                            found = true;
                        }
                    }
                }
            }
            if (!found) {
                return;
            }
            insert_unit_on(mutate, pick_chain_cat());
        }
        throw Error("could not disambiguate sibling branches");
    }

    const GeneratorConfig& cfg_;
    const Roles& roles_;
    CounterRng rng_;
    FlowsheetGraph g_;
    std::size_t target_ = 0;
    std::set<EdgeId> head_owned_, tail_owned_;
};

void check_config(const GeneratorConfig& cfg) {
    auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob_ok(cfg.branch_probability) || !prob_ok(cfg.recycle_probability) ||
        !prob_ok(cfg.heat_integration_probability)) {
        throw ConfigError("probabilities must lie in [0, 1]");
    }
    if (cfg.min_units < 2 || cfg.min_units > cfg.max_units) {
        throw ConfigError("unit count range must satisfy 2 <= min <= max");
    }
}

}  // namespace

FlowsheetGraph generate(const GeneratorConfig& cfg) {
    check_config(cfg);
    const Roles roles = find_roles(cfg);
    return Builder(cfg, roles).run();
}

std::vector<std::string> generate_corpus(const GeneratorConfig& cfg, std::size_t count) {
    if (count < 1) {
        throw ConfigError("corpus size must be at least 1");
    }
    check_config(cfg);
    find_roles(cfg);
    std::vector<std::string> out(count);
    detail::parallel_for(count, [&](std::size_t i) {
        GeneratorConfig local = cfg;
        local.seed = mix64(cfg.seed, i + 1);
        out[i] = serialize(generate(local));
    });
    return out;
}

}  // namespace sfiles
