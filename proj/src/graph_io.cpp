#include "sfiles/graph_io.hpp"

#include <map>
#include <string>

#include <json.hpp>

#include "sfiles/errors.hpp"

namespace sfiles {

using nlohmann::json;

std::string graph_to_json(const FlowsheetGraph& g, bool pretty) {
    json doc;
    doc["nodes"] = json::array();
    for (NodeId i = 0; i < g.nodes.size(); ++i) {
        doc["nodes"].push_back({{"id", g.node_name(i)},
                                {"category", g.nodes[i].category},
                                {"instance_no", g.nodes[i].instance_no}});
    }
    doc["edges"] = json::array();
    for (const StreamEdge& e : g.edges) {
        json je = {{"from", g.node_name(e.from)},
                   {"to", g.node_name(e.to)},
                   {"tags", e.tags},
                   {"kind", e.kind == EdgeKind::Recycle ? "recycle" : "process"}};
        je["pass_label"] = e.pass_label ? json(*e.pass_label) : json(nullptr);
        doc["edges"].push_back(std::move(je));
    }
    doc["heat_pairs"] = json::array();
    for (const HeatPair& pair : g.heat_pairs) {
        json passes = json::array();
        for (const HeatPass& pass : pair.passes) {
            passes.push_back(
                {{"in", pass.in_edges}, {"out", pass.out_edges}, {"recycle", pass.recycle_edges}});
        }
        doc["heat_pairs"].push_back(
            {{"label", pair.label}, {"unit", g.node_name(pair.unit)}, {"passes", passes}});
    }
    return pretty ? doc.dump(2) : doc.dump();
}

FlowsheetGraph graph_from_json(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& err) {
        throw ValidationError(std::string("invalid graph document: ") + err.what());
    }
    FlowsheetGraph g;
    try {
        std::map<std::string, NodeId> by_id;
        for (const json& jn : doc.at("nodes")) {
            UnitNode node;
            node.category = jn.at("category").get<std::string>();
            node.instance_no = jn.at("instance_no").get<int>();
            const std::string id = jn.at("id").get<std::string>();
            if (!by_id.emplace(id, static_cast<NodeId>(g.nodes.size())).second) {
                throw ValidationError("invalid graph document: duplicate node id '" + id + "'");
            }
            g.nodes.push_back(std::move(node));
        }
        auto node_ref = [&](const std::string& id) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                throw ValidationError("invalid graph document: unknown node id '" + id + "'");
            }
            return it->second;
        };
        for (const json& je : doc.at("edges")) {
            StreamEdge edge;
            edge.from = node_ref(je.at("from").get<std::string>());
            edge.to = node_ref(je.at("to").get<std::string>());
            edge.tags = je.at("tags").get<std::vector<std::string>>();
            const std::string kind = je.at("kind").get<std::string>();
            if (kind != "process" && kind != "recycle") {
                throw ValidationError("invalid graph document: unknown edge kind '" + kind + "'");
            }
            edge.kind = kind == "recycle" ? EdgeKind::Recycle : EdgeKind::Process;
            if (je.contains("pass_label") && !je.at("pass_label").is_null()) {
                edge.pass_label = je.at("pass_label").get<std::string>();
            }
            g.edges.push_back(std::move(edge));
        }
        if (doc.contains("heat_pairs")) {
            for (const json& jp : doc.at("heat_pairs")) {
                HeatPair pair;
                pair.label = jp.at("label").get<std::string>();
                pair.unit = node_ref(jp.at("unit").get<std::string>());
                for (const json& jpass : jp.at("passes")) {
                    HeatPass pass;
                    pass.in_edges = jpass.at("in").get<std::vector<EdgeId>>();
                    pass.out_edges = jpass.at("out").get<std::vector<EdgeId>>();
                    pass.recycle_edges = jpass.at("recycle").get<std::vector<EdgeId>>();
                    pair.passes.push_back(std::move(pass));
                }
                g.heat_pairs.push_back(std::move(pair));
            }
        }
    } catch (const json::exception& err) {
        throw ValidationError(std::string("invalid graph document: ") + err.what());
    }
    validate_graph(g);
    return g;
}

std::string graph_to_dot(const FlowsheetGraph& g) {
    std::string out = "digraph flowsheet {\n  rankdir=LR;\n";
    for (NodeId i = 0; i < g.nodes.size(); ++i) {
        out += "  \"" + g.node_name(i) + "\"";
        const int pair = g.heat_pair_of(i);
        if (pair >= 0) {
            out += " [label=\"" + g.node_name(i) + " {" + g.heat_pairs[pair].label + "}\"]";
        }
        out += ";\n";
    }
    for (const StreamEdge& e : g.edges) {
        out += "  \"" + g.node_name(e.from) + "\" -> \"" + g.node_name(e.to) + "\"";
        std::string attrs;
        if (!e.tags.empty()) {
            std::string label;
            for (const auto& t : e.tags) {
                if (!label.empty()) {
                    label += ",";
                }
                label += t;
            }
            attrs += "label=\"" + label + "\"";
        }
        if (e.kind == EdgeKind::Recycle) {
            if (!attrs.empty()) {
                attrs += ", ";
            }
            attrs += "style=dashed";
        }
        if (!attrs.empty()) {
            out += " [" + attrs + "]";
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

}  // namespace sfiles
