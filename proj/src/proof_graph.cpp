#include "proofflow/proof_graph.hpp"

#include "proofflow/error.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <numeric>
#include <queue>
#include <unordered_map>
#include <utility>

namespace proofflow {

std::string_view to_tag(NodeKind kind) {
    switch (kind) {
    case NodeKind::TheoremCondition: return "TC";
    case NodeKind::Definition: return "D";
    case NodeKind::Lemma: return "L";
    case NodeKind::TheoremSolution: return "TS";
    }
    return "?";
}

std::optional<NodeKind> kind_from_tag(std::string_view tag) {
    if (tag == "TC") return NodeKind::TheoremCondition;
    if (tag == "D") return NodeKind::Definition;
    if (tag == "L") return NodeKind::Lemma;
    if (tag == "TS") return NodeKind::TheoremSolution;
    return std::nullopt;
}

const ProofNode* ProofGraph::find(std::string_view id) const {
    auto it = std::find_if(nodes.begin(), nodes.end(), [&](const ProofNode& n) { return n.id == id; });
    return it == nodes.end() ? nullptr : &*it;
}

std::string_view to_string(ViolationCode code) {
    switch (code) {
    case ViolationCode::Cycle: return "Cycle";
    case ViolationCode::ForwardReference: return "ForwardReference";
    case ViolationCode::DanglingNonSolution: return "DanglingNonSolution";
    case ViolationCode::UnknownDep: return "UnknownDep";
    case ViolationCode::DuplicateId: return "DuplicateId";
    case ViolationCode::NoSolution: return "NoSolution";
    case ViolationCode::SelfLoop: return "SelfLoop";
    case ViolationCode::DuplicateDep: return "DuplicateDep";
    case ViolationCode::EmptyStatement: return "EmptyStatement";
    case ViolationCode::ParseFailure: return "ParseFailure";
    case ViolationCode::InvalidId: return "InvalidId";
    }
    return "?";
}

std::optional<ViolationCode> violation_code_from_string(std::string_view text) {
    for (int i = 0; i <= static_cast<int>(ViolationCode::InvalidId); ++i) {
        auto code = static_cast<ViolationCode>(i);
        if (to_string(code) == text) return code;
    }
    return std::nullopt;
}

namespace {

bool is_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Tarjan's algorithm over a dense adjacency list; returns the component index per vertex.
std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int counter = 0, components = 0;

    std::function<void(int)> visit = [&](int v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (int w : adj[v]) {
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            int w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp[w] = components;
            } while (w != v);
            ++components;
        }
    };
    for (int v = 0; v < n; ++v)
        if (index[v] < 0) visit(v);
    return comp;
}

}  // namespace

std::vector<GraphViolation> validate_graph(const ProofGraph& graph) {
    std::vector<GraphViolation> duplicate_ids, empty, self_loops, duplicate_deps, unknown, forward,
        cycles, dangling, no_solution;

    // Vertices of the id-level graph, indexed by first occurrence.
    std::unordered_map<std::string, int> vertex;
    std::vector<int> first_position;
    std::vector<std::string> vertex_id;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& id = graph.nodes[i].id;
        if (vertex.contains(id)) {
            bool already = std::any_of(duplicate_ids.begin(), duplicate_ids.end(),
                                       [&](const GraphViolation& v) { return v.node_ids.front() == id; });
            if (!already)
                duplicate_ids.push_back({ViolationCode::DuplicateId, {id}, "node id '" + id + "' is declared more than once"});
            continue;
        }
        vertex.emplace(id, static_cast<int>(vertex_id.size()));
        vertex_id.push_back(id);
        first_position.push_back(static_cast<int>(i));
    }

    const int n = static_cast<int>(vertex_id.size());
    std::vector<std::set<int>> successors(n);
    std::vector<std::pair<int, int>> forward_edges;  // (dep vertex, node vertex)

    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const auto& node = graph.nodes[i];
        if (is_blank(node.nl_self_contained))
            empty.push_back({ViolationCode::EmptyStatement, {node.id}, "node '" + node.id + "' has an empty self-contained statement"});

        std::set<std::string> seen;
        bool self_reported = false;
        for (const auto& dep : node.deps) {
            if (!seen.insert(dep).second) {
                duplicate_deps.push_back({ViolationCode::DuplicateDep, {node.id, dep},
                                          "node '" + node.id + "' lists dependency '" + dep + "' twice"});
                continue;
            }
            if (dep == node.id) {
                if (!self_reported)
                    self_loops.push_back({ViolationCode::SelfLoop, {node.id}, "node '" + node.id + "' depends on itself"});
                self_reported = true;
                continue;
            }
            auto it = vertex.find(dep);
            if (it == vertex.end()) {
                unknown.push_back({ViolationCode::UnknownDep, {node.id, dep},
                                   "node '" + node.id + "' depends on unknown node '" + dep + "'"});
                continue;
            }
            const int from = it->second;
            const int to = vertex.at(node.id);
            successors[from].insert(to);
            if (first_position[from] > static_cast<int>(i)) forward_edges.emplace_back(from, to);
        }
    }

    // Kahn's algorithm; anything left unprocessed sits on or behind a cycle.
    std::vector<int> in_degree(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v : successors[u]) ++in_degree[v];
    std::queue<int> ready;
    for (int v = 0; v < n; ++v)
        if (in_degree[v] == 0) ready.push(v);
    int processed = 0;
    while (!ready.empty()) {
        int u = ready.front();
        ready.pop();
        ++processed;
        for (int v : successors[u])
            if (--in_degree[v] == 0) ready.push(v);
    }

    std::vector<int> component(n);
    std::iota(component.begin(), component.end(), 0);
    if (processed < n) {
        std::vector<std::vector<int>> adj(n);
        for (int u = 0; u < n; ++u) adj[u].assign(successors[u].begin(), successors[u].end());
        component = strongly_connected_components(adj);
        std::map<int, std::vector<int>> members;
        for (int v = 0; v < n; ++v) members[component[v]].push_back(v);
        std::vector<std::vector<int>> groups;
        for (auto& [c, vs] : members)
            if (vs.size() > 1) groups.push_back(vs);
        std::sort(groups.begin(), groups.end(), [&](const auto& a, const auto& b) {
            return first_position[a.front()] < first_position[b.front()];
        });
        for (const auto& group : groups) {
            GraphViolation v{ViolationCode::Cycle, {}, "dependency cycle among"};
            for (int m : group) {
                v.node_ids.push_back(vertex_id[m]);
                v.message += " " + vertex_id[m];
            }
            cycles.push_back(std::move(v));
        }
    }

    for (auto [from, to] : forward_edges) {
        if (component[from] == component[to]) continue;
        forward.push_back({ViolationCode::ForwardReference, {vertex_id[to], vertex_id[from]},
                           "node '" + vertex_id[to] + "' depends on '" + vertex_id[from] + "', which is declared later"});
    }

    bool has_solution = false;
    std::set<std::string> dangling_reported;
    for (const auto& node : graph.nodes) {
        if (node.kind == NodeKind::TheoremSolution) {
            has_solution = true;
            continue;
        }
        if (successors[vertex.at(node.id)].empty() && dangling_reported.insert(node.id).second)
            dangling.push_back({ViolationCode::DanglingNonSolution, {node.id},
                                "node '" + node.id + "' is not a theorem solution but nothing depends on it"});
    }
    if (!has_solution) no_solution.push_back({ViolationCode::NoSolution, {}, "graph has no theorem solution node"});

    std::vector<GraphViolation> out;
    for (auto* group : {&duplicate_ids, &empty, &self_loops, &duplicate_deps, &unknown, &forward, &cycles,
                        &dangling, &no_solution})
        out.insert(out.end(), group->begin(), group->end());
    return out;
}

std::vector<std::string> topological_order(const ProofGraph& graph) {
    auto violations = validate_graph(graph);
    if (!violations.empty())
        throw ContractViolation("topological_order on invalid graph: " + violations.front().message);
    std::vector<std::string> order;
    order.reserve(graph.nodes.size());
    for (const auto& node : graph.nodes) order.push_back(node.id);
    return order;
}

DependencySets dependency_sets(const ProofGraph& graph) {
    DependencySets sets;
    for (const auto& node : graph.nodes) sets[node.id].insert(node.deps.begin(), node.deps.end());
    return sets;
}

std::map<std::string, MatchOutcome> match_dependencies(const ProofGraph& estimate,
                                                       const std::vector<ProofGraph>& truths) {
    std::vector<DependencySets> truth_sets;
    truth_sets.reserve(truths.size());
    for (const auto& t : truths) truth_sets.push_back(dependency_sets(t));

    std::map<std::string, MatchOutcome> out;
    for (const auto& [id, deps] : dependency_sets(estimate)) {
        MatchOutcome outcome = MatchOutcome::Unmatched;
        for (const auto& sets : truth_sets) {
            auto it = sets.find(id);
            if (it == sets.end()) continue;
            if (it->second == deps) {
                outcome = MatchOutcome::Matched;
                break;
            }
            outcome = MatchOutcome::Mismatched;
        }
        out[id] = outcome;
    }
    return out;
}

Json graph_to_json(const ProofGraph& graph) {
    Json nodes = Json::array();
    for (const auto& node : graph.nodes) {
        nodes.push_back({{"id", node.id},
                         {"kind", std::string(to_tag(node.kind))},
                         {"nl_original", node.nl_original},
                         {"nl_self_contained", node.nl_self_contained},
                         {"deps", node.deps}});
    }
    return {{"theorem_nl", graph.theorem_nl}, {"proof_nl", graph.proof_nl}, {"nodes", std::move(nodes)}};
}

namespace {

void require_exact_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (const char* key : keys)
        if (!obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
    for (const auto& item : obj.items()) {
        bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; });
        if (!known) throw ParseError(where + ": unknown field '" + item.key() + "'");
    }
}

std::string string_field(const Json& obj, const char* key, const std::string& where) {
    const auto& value = obj.at(key);
    if (!value.is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return value.get<std::string>();
}

}  // namespace

ProofGraph graph_from_json(const Json& json) {
    if (!json.is_object()) throw ParseError("graph: expected a JSON object");
    require_exact_keys(json, {"theorem_nl", "proof_nl", "nodes"}, "graph");

    ProofGraph graph;
    graph.theorem_nl = string_field(json, "theorem_nl", "graph");
    graph.proof_nl = string_field(json, "proof_nl", "graph");
    const auto& nodes = json.at("nodes");
    if (!nodes.is_array()) throw ParseError("graph: field 'nodes' must be an array");

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& entry = nodes[i];
        std::string where = "graph.nodes[" + std::to_string(i) + "]";
        if (!entry.is_object()) throw ParseError(where + ": expected a JSON object");
        if (entry.contains("id") && entry.at("id").is_string())
            where = "node '" + entry.at("id").get<std::string>() + "'";
        require_exact_keys(entry, {"id", "kind", "nl_original", "nl_self_contained", "deps"}, where);

        ProofNode node;
        node.id = string_field(entry, "id", where);
        const std::string tag = string_field(entry, "kind", where);
        auto kind = kind_from_tag(tag);
        if (!kind)
            throw ParseError(where + ": field 'kind' has invalid value \"" + tag + "\" (expected TC, D, L or TS)");
        node.kind = *kind;
        node.nl_original = string_field(entry, "nl_original", where);
        node.nl_self_contained = string_field(entry, "nl_self_contained", where);
        const auto& deps = entry.at("deps");
        if (!deps.is_array()) throw ParseError(where + ": field 'deps' must be an array");
        for (const auto& dep : deps) {
            if (!dep.is_string()) throw ParseError(where + ": field 'deps' must contain only strings");
            node.deps.push_back(dep.get<std::string>());
        }
        graph.nodes.push_back(std::move(node));
    }
    return graph;
}

Json violation_to_json(const GraphViolation& violation) {
    return {{"code", to_string(violation.code)}, {"node_ids", violation.node_ids}, {"message", violation.message}};
}

GraphViolation violation_from_json(const Json& json) {
    if (!json.is_object()) throw ParseError("violation: expected a JSON object");
    require_exact_keys(json, {"code", "node_ids", "message"}, "violation");
    const std::string text = string_field(json, "code", "violation");
    auto code = violation_code_from_string(text);
    if (!code) throw ParseError("violation: unknown code \"" + text + "\"");
    GraphViolation violation{*code, {}, string_field(json, "message", "violation")};
    for (const auto& id : json.at("node_ids")) violation.node_ids.push_back(id.get<std::string>());
    return violation;
}

}  // namespace proofflow
