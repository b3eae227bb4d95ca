#include "oracles.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>

namespace fs = std::filesystem;

namespace proofflow::oracle {

namespace {

NodeKind random_kind(std::mt19937_64& rng) {
    static constexpr NodeKind kinds[] = {NodeKind::TheoremCondition, NodeKind::Definition, NodeKind::Lemma,
                                         NodeKind::TheoremSolution};
    return kinds[std::uniform_int_distribution<int>(0, 3)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

}  // namespace

ProofGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& o) {
    const int n = std::uniform_int_distribution<int>(1, o.max_nodes)(rng);
    ProofGraph g;
    g.theorem_nl = "theorem";
    g.proof_nl = "proof";
    for (int i = 0; i < n; ++i) {
        ProofNode node;
        node.id = "N" + std::to_string(i);
        if (i > 0 && chance(rng, o.duplicate_id_rate))
            node.id = "N" + std::to_string(std::uniform_int_distribution<int>(0, i - 1)(rng));
        node.kind = random_kind(rng);
        if (i == n - 1 && chance(rng, 0.8)) node.kind = NodeKind::TheoremSolution;
        node.nl_self_contained = chance(rng, o.empty_rate) ? " " : "statement " + std::to_string(i);
        node.nl_original = node.nl_self_contained;
        g.nodes.push_back(node);
    }
    for (int i = 0; i < n; ++i) {
        auto& node = g.nodes[i];
        const int count = std::uniform_int_distribution<int>(0, std::min(3, n))(rng);
        for (int d = 0; d < count; ++d) {
            if (chance(rng, o.self_rate)) {
                node.deps.push_back(node.id);
            } else if (chance(rng, o.unknown_rate)) {
                node.deps.push_back("X" + std::to_string(d));
            } else if (i + 1 < n && chance(rng, o.forward_rate)) {
                node.deps.push_back(g.nodes[std::uniform_int_distribution<int>(i + 1, n - 1)(rng)].id);
            } else if (i > 0) {
                node.deps.push_back(g.nodes[std::uniform_int_distribution<int>(0, i - 1)(rng)].id);
            }
            if (!node.deps.empty() && chance(rng, o.duplicate_dep_rate)) node.deps.push_back(node.deps.back());
        }
    }
    return g;
}

ProofGraph random_valid_graph(std::mt19937_64& rng, int max_nodes) {
    const int n = std::uniform_int_distribution<int>(1, max_nodes)(rng);
    ProofGraph g;
    g.theorem_nl = "theorem";
    g.proof_nl = "proof";
    for (int i = 0; i < n; ++i) {
        ProofNode node;
        node.kind = i == n - 1 ? NodeKind::TheoremSolution : random_kind(rng);
        node.id = std::string(to_tag(node.kind)) + std::to_string(i);
        node.nl_self_contained = "statement " + std::to_string(i);
        node.nl_original = "span " + std::to_string(i);
        for (int j = 0; j < i; ++j)
            if (chance(rng, 0.3)) node.deps.push_back(g.nodes[j].id);
        g.nodes.push_back(node);
    }
    // Give every non-solution node a consumer.
    for (int i = 0; i + 1 < n; ++i) {
        if (g.nodes[i].kind == NodeKind::TheoremSolution) continue;
        bool used = false;
        for (int j = i + 1; j < n; ++j)
            for (const auto& d : g.nodes[j].deps) used = used || d == g.nodes[i].id;
        if (used) continue;
        auto& consumer = g.nodes[std::uniform_int_distribution<int>(i + 1, n - 1)(rng)];
        consumer.deps.push_back(g.nodes[i].id);
    }
    for (auto& node : g.nodes) {
        // Keep deps in declaration order for readability.
        std::sort(node.deps.begin(), node.deps.end(), [&](const std::string& a, const std::string& b) {
            auto pos = [&](const std::string& id) {
                for (std::size_t k = 0; k < g.nodes.size(); ++k)
                    if (g.nodes[k].id == id) return k;
                return g.nodes.size();
            };
            return pos(a) < pos(b);
        });
    }
    return g;
}

std::vector<std::vector<bool>> reachability(const ProofGraph& g) {
    const std::size_t n = g.nodes.size();
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t v = 0; v < n; ++v)
        for (const auto& dep : g.nodes[v].deps)
            for (std::size_t u = 0; u < n; ++u)
                if (g.nodes[u].id == dep && g.nodes[u].id != g.nodes[v].id) r[u][v] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (r[i][k] && r[k][j]) r[i][j] = true;
    return r;
}

std::set<ViolationCode> brute_force_violations(const ProofGraph& g) {
    std::set<ViolationCode> out;
    const std::size_t n = g.nodes.size();

    // Work on the id level: the first declaration of an id stands for it.
    std::vector<std::string> ids;
    std::map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < n; ++i) {
        if (first.count(g.nodes[i].id)) out.insert(ViolationCode::DuplicateId);
        else {
            first[g.nodes[i].id] = ids.size();
            ids.push_back(g.nodes[i].id);
        }
    }
    const std::size_t m = ids.size();
    std::vector<std::vector<bool>> edge(m, std::vector<bool>(m, false));
    std::vector<std::size_t> first_decl(m);
    for (std::size_t v = 0; v < m; ++v) {
        for (std::size_t i = 0; i < n; ++i)
            if (g.nodes[i].id == ids[v]) {
                first_decl[v] = i;
                break;
            }
    }

    for (const auto& node : g.nodes) {
        bool blank = std::all_of(node.nl_self_contained.begin(), node.nl_self_contained.end(),
                                 [](unsigned char ch) { return std::isspace(ch); });
        if (blank) out.insert(ViolationCode::EmptyStatement);
        for (std::size_t a = 0; a < node.deps.size(); ++a)
            for (std::size_t b = a + 1; b < node.deps.size(); ++b)
                if (node.deps[a] == node.deps[b]) out.insert(ViolationCode::DuplicateDep);
        for (const auto& dep : node.deps) {
            if (dep == node.id) out.insert(ViolationCode::SelfLoop);
            else if (!first.count(dep)) out.insert(ViolationCode::UnknownDep);
            else edge[first.at(dep)][first.at(node.id)] = true;
        }
    }

    // Transitive closure by repeated relaxation until nothing changes.
    auto reach = edge;
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (reach[i][j])
                    for (std::size_t l = 0; l < m; ++l)
                        if (edge[j][l] && !reach[i][l]) reach[i][l] = changed = true;
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            if (i != j && reach[i][j] && reach[j][i]) out.insert(ViolationCode::Cycle);

    // A dep declared after its consumer, unless the two sit on a common cycle.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t v = first.at(g.nodes[i].id);
        for (const auto& dep : g.nodes[i].deps) {
            if (dep == g.nodes[i].id || !first.count(dep)) continue;
            const std::size_t u = first.at(dep);
            if (first_decl[u] <= i) continue;
            if (!(reach[u][v] && reach[v][u])) out.insert(ViolationCode::ForwardReference);
        }
    }

    bool solution = false;
    for (const auto& node : g.nodes) {
        if (node.kind == NodeKind::TheoremSolution) {
            solution = true;
            continue;
        }
        int out_degree = 0;
        for (const auto& other : g.nodes)
            if (other.id != node.id)
                out_degree += static_cast<int>(std::count(other.deps.begin(), other.deps.end(), node.id));
        if (out_degree == 0) out.insert(ViolationCode::DanglingNonSolution);
    }
    if (!solution) out.insert(ViolationCode::NoSolution);
    return out;
}

double sugeno_by_subsets(const std::vector<double>& s) {
    const std::size_t m = s.size();
    for (double x : s)
        if (x == 0.0) return 0.0;
    double best = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        double lowest = 1.0;
        int size = 0;
        for (std::size_t i = 0; i < m; ++i)
            if (mask & (1u << i)) {
                lowest = std::min(lowest, s[i]);
                ++size;
            }
        best = std::max(best, std::min(lowest, static_cast<double>(size) / static_cast<double>(m)));
    }
    return best;
}

double proof_score_formula(const std::vector<NodeTriple>& nodes) {
    double sum = 0.0;
    for (const auto& t : nodes) sum += t.f * (t.c ? 1.0 : 0.0) * (t.structural ? 1.0 : 0.0);
    return sum / static_cast<double>(nodes.size());
}

ErrorSource flowchart(NodeKind kind, double f, bool c_formalizer, bool tactic_ok, bool negation_proved,
                      double threshold) {
    if (!(f >= threshold) || !c_formalizer) return ErrorSource::Formalizer;
    if (kind != NodeKind::Lemma && kind != NodeKind::TheoremSolution) return ErrorSource::NotApplicable;
    if (tactic_ok) return ErrorSource::None;
    if (negation_proved) return ErrorSource::NLStatement;
    return ErrorSource::Tactic;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json load(const fs::path& path) {
    std::ifstream in(path);
    return json::parse(in);
}


// Every chat exchange recorded anywhere in the file.
std::int64_t completion_tokens_in(const json& j) {
    std::int64_t total = 0;
    if (j.is_object()) {
        if (j.contains("request") && j.contains("completion_tokens")) return j.at("completion_tokens").get<std::int64_t>();
        for (const auto& [key, value] : j.items()) total += completion_tokens_in(value);
    } else if (j.is_array()) {
        for (const auto& value : j) total += completion_tokens_in(value);
    }
    return total;
}

struct Tally {
    int steps = 0, formal_ok = 0, provable = 0, tactic_ok = 0;
    double proofscore = 0.0;
    bool syntax = false;
    std::int64_t wall_ms = 0, tokens = 0;
};

bool provable_tag(const std::string& tag) { return tag == "L" || tag == "TS"; }

void count_truth(const json& problem, Tally& t) {
    const auto& truths = problem.at("truth_graphs");
    if (truths.empty()) return;
    for (const auto& node : truths.at(0).at("nodes")) {
        ++t.steps;
        if (provable_tag(node.at("kind").get<std::string>())) ++t.provable;
    }
}

Tally tally_problem(const fs::path& dir, const std::string& strategy, int k) {
    Tally t;
    const json problem = load(dir / "problem.json");
    if (fs::exists(dir / "timing.json")) t.wall_ms = load(dir / "timing.json").at("wall_ms").get<std::int64_t>();
    for (const char* name : {"graph.json", "faithfulness.json", "baseline.json"})
        if (fs::exists(dir / name)) t.tokens += completion_tokens_in(load(dir / name));
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.ends_with(".formal.json") || name.ends_with(".proof.json")) t.tokens += completion_tokens_in(load(entry.path()));
    }

    const bool complete = fs::exists(dir / "status.json") && load(dir / "status.json").at("state") == "complete";
    const bool pipeline = strategy == "dag" || strategy == "nodag";
    if (!complete) {
        if (pipeline) count_truth(problem, t);
        else if (strategy == "step") t.steps = t.provable = std::max<int>(1, static_cast<int>(problem.at("proof_steps").size()));
        return t;
    }

    const json score = load(dir / "score.json");
    std::map<std::string, bool> ok;
    if (pipeline) {
        const json graph = load(dir / "graph.json");
        if (!graph.at("passed").get<bool>() || static_cast<int>(graph.at("attempts").size()) > k) {
            count_truth(problem, t);
            return t;
        }
        t.syntax = true;
        for (const auto& node : graph.at("graph").at("nodes")) {
            const std::string id = node.at("id");
            const json formal = load(dir / (id + ".formal.json"));
            const int fa = formal.at("passed_at_attempt");
            bool c = formal.at("c_formalizer").get<bool>() && fa >= 1 && fa <= k;
            ++t.steps;
            t.formal_ok += c;
            if (provable_tag(node.at("kind"))) {
                const json proof = load(dir / (id + ".proof.json"));
                const int ta = proof.at("passed_at_attempt");
                c = c && proof.at("c_tactic").get<bool>() && ta >= 1 && ta <= k;
                ++t.provable;
                t.tactic_ok += c;
            }
            ok[id] = c;
            t.syntax = t.syntax && c;
        }
    } else {
        const json run = load(dir / "baseline.json");
        bool chain = true;
        for (const auto& unit : run.at("units")) {
            const int a = unit.at("passed_at_attempt");
            chain = chain && unit.at("status") == "passed" && a >= 1 && a <= k;
            ok[unit.at("label")] = chain;
        }
        const bool level = run.at("proof_level_ok");
        if (strategy == "full") {
            ok["proof"] = chain && level;
            t.syntax = chain && level;
        } else {
            t.steps = t.provable = static_cast<int>(run.at("units").size());
            for (const auto& unit : run.at("units")) t.tactic_ok += ok.at(unit.at("label"));
            t.syntax = chain;
        }
    }

    double sum = 0.0;
    for (const auto& node : score.at("nodes"))
        if (ok.at(node.at("id")) && node.at("structural").get<bool>()) sum += node.at("f").get<double>();
    const int n = score.at("n");
    t.proofscore = n > 0 ? sum / n : 0.0;
    return t;
}

}  // namespace

std::vector<Recount> recount_run(const fs::path& run_dir) {
    const json manifest = load(run_dir / "manifest.json");
    const std::string strategy = manifest.at("strategy");
    const int pass_k = manifest.at("pass_k");
    std::vector<int> ks = {pass_k};
    for (int k : manifest.at("prefix_k").get<std::vector<int>>())
        if (k >= 1 && k < pass_k && std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);

    std::vector<Recount> rows;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        Tally total;
        double proofscore = 0.0, syntax = 0.0, wall = 0.0, tokens = 0.0;
        int problems = 0;
        for (const auto& id : manifest.at("problems")) {
            const Tally t = tally_problem(run_dir / id.get<std::string>(), strategy, ks[i]);
            total.steps += t.steps;
            total.formal_ok += t.formal_ok;
            total.provable += t.provable;
            total.tactic_ok += t.tactic_ok;
            proofscore += t.proofscore;
            syntax += t.syntax;
            wall += static_cast<double>(t.wall_ms);
            tokens += static_cast<double>(t.tokens);
            ++problems;
        }
        Recount r;
        r.k = ks[i];
        r.problems = problems;
        auto frac = [](double a, double b) { return b > 0 ? a / b : 0.0; };
        if (strategy == "dag" || strategy == "nodag") {
            r.total_steps = total.steps;
            r.formalizer_accuracy = frac(total.formal_ok, total.steps);
            r.tactic_accuracy = frac(total.tactic_ok, total.provable);
        } else if (strategy == "step") {
            r.total_steps = total.steps;
            r.tactic_accuracy = frac(total.tactic_ok, total.provable);
        }
        r.proofscore = frac(proofscore, problems);
        r.correct_syntax = frac(syntax, problems);
        if (i == 0) {
            r.time_minutes = frac(wall, problems) / 60000.0;
            r.output_tokens_k = frac(tokens, problems) / 1000.0;
        }
        rows.push_back(r);
    }
    return rows;
}

}  // namespace proofflow::oracle
