#include "sfiles/serializer.hpp"

#include "canonical.hpp"
#include "sfiles/parser.hpp"

namespace sfiles {

RankAssignment canonical_rank(const FlowsheetGraph& g) {
    const auto order_of = detail::canonical_node_order(g);
    RankAssignment ranks;
    ranks.rank_of_node.resize(order_of.size());
    for (NodeId i = 0; i < order_of.size(); ++i) {
        ranks.rank_of_node[i] = order_of[i] + 1;
    }
    return ranks;
}

std::string serialize(const FlowsheetGraph& g, const SerializationPolicy& policy) {
    const detail::TraversalPlan plan = detail::build_plan(g);
    const detail::DecisionSet decisions =
        policy.mode == SerializationPolicy::Mode::Canonical
            ? detail::canonical_decisions(plan)
            : detail::randomized_decisions(plan, policy.seed);
    return detail::emit(plan, decisions);
}

std::string canonicalize(std::string_view sfiles) {
    return serialize(parse(sfiles), SerializationPolicy::canonical());
}

}  // namespace sfiles
