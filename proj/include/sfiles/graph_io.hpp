#pragma once

#include <string>
#include <string_view>

#include "sfiles/graph.hpp"

namespace sfiles {

/// Node-link JSON document: nodes carry id/category/instance_no, edges carry
/// from/to/tags/kind/pass_label, heat pairs reference edges by index.
/// Re-importable via graph_from_json to a graph_equal graph.
std::string graph_to_json(const FlowsheetGraph& g, bool pretty = true);

/// Inverse of graph_to_json. Throws ValidationError on schema or invariant
/// violations.
FlowsheetGraph graph_from_json(std::string_view json_text);

/// Graphviz document; recycle streams are dashed, tags become edge labels.
std::string graph_to_dot(const FlowsheetGraph& g);

}  // namespace sfiles
