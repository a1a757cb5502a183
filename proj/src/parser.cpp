#include "sfiles/parser.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "sfiles/errors.hpp"
#include "sfiles/tokens.hpp"

namespace sfiles {

namespace {

constexpr NodeId kNoNode = 0xFFFFFFFFu;

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct PendingTag {
    std::string name;
    std::size_t position;
};

struct Occurrence {
    std::vector<EdgeId> in_edges;
    std::vector<EdgeId> out_edges;
    std::vector<EdgeId> recycle_edges;
    std::string heat_label;  // empty when unlabeled
    std::size_t label_position = 0;
    std::size_t unit_position = 0;
};

struct OpenClosure {
    NodeId unit;
    std::size_t position;
    std::vector<std::string> tags;
};

enum class Scope { Subprocess, Branch, IncomingChain };

struct Context {
    Scope scope;
    NodeId upstream = kNoNode;
    NodeId target = kNoNode;     // unit fed by the chains of an incoming group
    std::size_t open_position = 0;
    std::size_t units_seen = 0;
    std::vector<PendingTag> pending;
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    FlowsheetGraph run() {
        tokens_ = tokenize(text_);
        if (tokens_.empty()) {
            throw ParseError(0, "a unit");
        }
        contexts_.push_back({Scope::Subprocess, kNoNode, kNoNode, 0, 0, {}});
        for (const Token& tok : tokens_) {
            dispatch(tok);
        }
        finish();
        merge_heat_groups();
        assign_instance_numbers(graph_);
        normalize_heat_labels(graph_);
        try {
            validate_graph(graph_);
        } catch (const ValidationError& err) {
            throw ParseError(0, std::string("a well-formed flowsheet (") + err.what() + ")");
        }
        return std::move(graph_);
    }

private:
    Context& ctx() { return contexts_.back(); }

    [[noreturn]] void fail(std::size_t position, std::string expected, std::string found = "") {
        throw ParseError(position, std::move(expected), std::move(found));
    }

    EdgeId add_edge(NodeId from, NodeId to, EdgeKind kind, std::vector<std::string> tags) {
        StreamEdge edge;
        edge.from = from;
        edge.to = to;
        edge.kind = kind;
        edge.tags = std::move(tags);
        graph_.edges.push_back(std::move(edge));
        const EdgeId id = static_cast<EdgeId>(graph_.edges.size() - 1);
        if (kind == EdgeKind::Process) {
            occurrences_[from].out_edges.push_back(id);
            occurrences_[to].in_edges.push_back(id);
        } else {
            occurrences_[from].recycle_edges.push_back(id);
            if (to != from) {
                occurrences_[to].recycle_edges.push_back(id);
            }
        }
        return id;
    }

    std::vector<std::string> take_pending() {
        std::vector<std::string> tags;
        tags.reserve(ctx().pending.size());
        for (auto& p : ctx().pending) {
            tags.push_back(std::move(p.name));
        }
        ctx().pending.clear();
        return tags;
    }

    void dispatch(const Token& tok) {
        switch (tok.kind) {
            case TokenKind::Unit: return on_unit(tok);
            case TokenKind::Tag: return on_tag(tok);
            case TokenKind::BranchOpen: return on_branch_open(tok);
            case TokenKind::BranchClose: return on_branch_close(tok);
            case TokenKind::IncomingOpen: return on_incoming_open(tok);
            case TokenKind::IncomingSep: return on_incoming_sep(tok);
            case TokenKind::IncomingClose: return on_incoming_close(tok);
            case TokenKind::RecycleRef: return on_recycle(tok, /*is_ref=*/true);
            case TokenKind::RecycleMark: return on_recycle(tok, /*is_ref=*/false);
            case TokenKind::SubprocessSep: return on_subprocess_sep(tok);
        }
    }

    void on_unit(const Token& tok) {
        graph_.nodes.push_back({tok.name, 1});
        occurrences_.emplace_back();
        const NodeId node = static_cast<NodeId>(graph_.nodes.size() - 1);
        occurrences_[node].unit_position = tok.begin;
        if (ctx().upstream != kNoNode) {
            add_edge(ctx().upstream, node, EdgeKind::Process, take_pending());
        }
        ctx().upstream = node;
        ++ctx().units_seen;
    }

    void on_tag(const Token& tok) {
        if (ctx().upstream == kNoNode) {
            fail(tok.begin, "a unit before this tag", tok.text);
        }
        if (all_digits(tok.name)) {
            Occurrence& occ = occurrences_[ctx().upstream];
            if (!occ.heat_label.empty()) {
                fail(tok.begin, "at most one heat-integration label per unit", tok.text);
            }
            occ.heat_label = tok.name;
            occ.label_position = tok.begin;
            return;
        }
        ctx().pending.push_back({tok.name, tok.begin});
    }

    void on_branch_open(const Token& tok) {
        if (ctx().upstream == kNoNode) {
            fail(tok.begin, "a unit before this branch", tok.text);
        }
        Context branch{Scope::Branch, ctx().upstream, kNoNode, tok.begin, 0, {}};
        branch.pending = std::move(ctx().pending);
        ctx().pending.clear();
        contexts_.push_back(std::move(branch));
    }

    void on_branch_close(const Token& tok) {
        if (ctx().scope != Scope::Branch) {
            fail(tok.begin, "an opened branch before ']'", tok.text);
        }
        if (ctx().units_seen == 0) {
            fail(ctx().open_position, "a non-empty branch");
        }
        if (!ctx().pending.empty()) {
            fail(ctx().pending.front().position, "a unit after this tag");
        }
        contexts_.pop_back();
    }

    void on_incoming_open(const Token& tok) {
        if (ctx().upstream == kNoNode) {
            fail(tok.begin, "a unit before this incoming branch", tok.text);
        }
        contexts_.push_back({Scope::IncomingChain, kNoNode, ctx().upstream, tok.begin, 0, {}});
    }

    // Joins the chain written so far to the fed unit and resets for the next
    // chain of the same group (after '&') or closes the group (after '&|').
    void close_chain(const Token& tok) {
        if (ctx().upstream == kNoNode) {
            fail(tok.begin, "a non-empty incoming branch", tok.text);
        }
        add_edge(ctx().upstream, ctx().target, EdgeKind::Process, take_pending());
    }

    void on_incoming_sep(const Token& tok) {
        if (ctx().scope != Scope::IncomingChain) {
            fail(tok.begin, "'&' only inside an incoming branch", tok.text);
        }
        close_chain(tok);
        ctx().upstream = kNoNode;
        ctx().units_seen = 0;
    }

    void on_incoming_close(const Token& tok) {
        if (ctx().scope != Scope::IncomingChain) {
            fail(tok.begin, "an opened incoming branch before '&|'", tok.text);
        }
        close_chain(tok);
        contexts_.pop_back();
    }

    void on_recycle(const Token& tok, bool is_ref) {
        if (ctx().upstream == kNoNode) {
            fail(tok.begin, is_ref ? "a unit before this recycle reference"
                                   : "a unit before this recycle marker",
                 tok.text);
        }
        const NodeId unit = ctx().upstream;
        auto& waiting = is_ref ? open_marks_[tok.number] : open_refs_[tok.number];
        if (!waiting.empty()) {
            OpenClosure other = std::move(waiting.front());
            waiting.pop_front();
            std::vector<std::string> tags = std::move(other.tags);
            for (auto& p : ctx().pending) {
                tags.push_back(std::move(p.name));
            }
            ctx().pending.clear();
            const NodeId origin = is_ref ? other.unit : unit;
            const NodeId destination = is_ref ? unit : other.unit;
            add_edge(origin, destination, EdgeKind::Recycle, std::move(tags));
        } else {
            OpenClosure open{unit, tok.begin, {}};
            for (auto& p : ctx().pending) {
                open.tags.push_back(std::move(p.name));
            }
            ctx().pending.clear();
            (is_ref ? open_refs_[tok.number] : open_marks_[tok.number]).push_back(std::move(open));
        }
    }

    void on_subprocess_sep(const Token& tok) {
        if (contexts_.size() != 1) {
            fail(tok.begin,
                 ctx().scope == Scope::Branch ? "']' before the subprocess separator"
                                              : "'&|' before the subprocess separator",
                 tok.text);
        }
        if (!ctx().pending.empty()) {
            fail(ctx().pending.front().position, "a unit after this tag");
        }
        if (ctx().units_seen == 0) {
            fail(tok.begin, "a non-empty subprocess", tok.text);
        }
        ctx().upstream = kNoNode;
        ctx().units_seen = 0;
    }

    void finish() {
        const std::size_t end = tokens_.back().end;
        if (contexts_.size() != 1) {
            fail(end, contexts_.back().scope == Scope::Branch
                          ? "']' to close the branch opened at offset " +
                                std::to_string(contexts_.back().open_position)
                          : "'&|' to close the incoming branch opened at offset " +
                                std::to_string(contexts_.back().open_position));
        }
        if (!ctx().pending.empty()) {
            fail(ctx().pending.front().position, "a unit after this tag");
        }
        if (ctx().units_seen == 0) {
            fail(end, "a non-empty subprocess");
        }
        for (const auto& [number, waiting] : open_refs_) {
            if (!waiting.empty()) {
                fail(waiting.front().position,
                     "a matching recycle marker for number " + std::to_string(number));
            }
        }
        for (const auto& [number, waiting] : open_marks_) {
            if (!waiting.empty()) {
                fail(waiting.front().position,
                     "a matching recycle reference for number " + std::to_string(number));
            }
        }
    }

    void merge_heat_groups() {
        std::map<std::string, std::vector<NodeId>> groups;
        for (NodeId i = 0; i < graph_.nodes.size(); ++i) {
            if (!occurrences_[i].heat_label.empty()) {
                groups[occurrences_[i].heat_label].push_back(i);
            }
        }
        if (groups.empty()) {
            return;
        }
        // keep the first occurrence of each label as the physical unit
        std::vector<NodeId> target(graph_.nodes.size());
        for (NodeId i = 0; i < graph_.nodes.size(); ++i) {
            target[i] = i;
        }
        for (const auto& [label, members] : groups) {
            const NodeId keep = members.front();
            for (NodeId m : members) {
                if (graph_.nodes[m].category != graph_.nodes[keep].category) {
                    fail(occurrences_[m].label_position,
                         "matching unit categories for heat-integration label '" + label + "'");
                }
                target[m] = keep;
            }
        }
        std::vector<NodeId> remap(graph_.nodes.size(), kNoNode);
        std::vector<UnitNode> kept_nodes;
        for (NodeId i = 0; i < graph_.nodes.size(); ++i) {
            if (target[i] == i) {
                remap[i] = static_cast<NodeId>(kept_nodes.size());
                kept_nodes.push_back(std::move(graph_.nodes[i]));
            }
        }
        for (auto& edge : graph_.edges) {
            edge.from = remap[target[edge.from]];
            edge.to = remap[target[edge.to]];
        }
        for (const auto& [label, members] : groups) {
            HeatPair pair;
            pair.label = label;
            pair.unit = remap[members.front()];
            for (NodeId m : members) {
                HeatPass pass;
                pass.in_edges = occurrences_[m].in_edges;
                pass.out_edges = occurrences_[m].out_edges;
                pass.recycle_edges = occurrences_[m].recycle_edges;
                pair.passes.push_back(std::move(pass));
            }
            graph_.heat_pairs.push_back(std::move(pair));
        }
        graph_.nodes = std::move(kept_nodes);
    }

    std::string_view text_;
    std::vector<Token> tokens_;
    FlowsheetGraph graph_;
    std::vector<Occurrence> occurrences_;
    std::vector<Context> contexts_;
    std::map<long, std::deque<OpenClosure>> open_refs_;
    std::map<long, std::deque<OpenClosure>> open_marks_;
};

}  // namespace

FlowsheetGraph parse(std::string_view sfiles) {
    return Parser(sfiles).run();
}

}  // namespace sfiles
