#include "nicki/poison.hpp"

#include "nicki/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>

namespace nicki {

PairList candidate_pairs(Index n, Index k)
{
    PairList out;
    out.reserve(static_cast<std::size_t>(n * k + k * (k - 1) / 2));
    for (Index a = 0; a < k; ++a) {
        for (Index i = 0; i < n; ++i) {
            out.emplace_back(i, n + a);
        }
    }
    for (Index a = 0; a < k; ++a) {
        for (Index b = a + 1; b < k; ++b) {
            out.emplace_back(n + a, n + b);
        }
    }
    return out;
}

PoisonState PoisonState::fresh(const Graph& g, Index k)
{
    if (k < 0) {
        throw ParameterError("PoisonState: negative attacker count");
    }
    PoisonState s;
    s.n = g.num_nodes();
    s.k = k;
    s.b = Matrix::Zero(s.n, k);
    s.c = Matrix::Identity(k, k);
    s.x_a = Matrix::Zero(k, g.feature_dim());
    s.edge_candidates.assign(static_cast<std::size_t>(s.n * k + k * (k - 1) / 2), true);
    s.feature_candidates.assign(static_cast<std::size_t>(k * g.feature_dim()), true);
    return s;
}

Index PoisonState::num_enabled_edge_candidates() const
{
    return static_cast<Index>(std::count(edge_candidates.begin(), edge_candidates.end(), true));
}

Matrix assembled_adjacency(const Graph& g, const PoisonState& state)
{
    const Index n = g.num_nodes();
    const Index k = state.k;
    if (state.n != n || state.b.rows() != n || state.b.cols() != k || state.c.rows() != k ||
        state.c.cols() != k) {
        throw DimensionError("assembled_adjacency: state does not match graph");
    }
    Matrix a(n + k, n + k);
    a.topLeftCorner(n, n) = g.adjacency();
    a.topRightCorner(n, k) = state.b;
    a.bottomLeftCorner(k, n) = state.b.transpose();
    a.bottomRightCorner(k, k) = state.c;
    a.bottomRightCorner(k, k).diagonal().setZero();
    return a;
}

std::pair<Matrix, Matrix> build_intermediate(const Graph& g, const PoisonState& state)
{
    const Index n = g.num_nodes();
    const Index k = state.k;
    Matrix a_p = assembled_adjacency(g, state);
    a_p.rightCols(k).setOnes();
    a_p.bottomRows(k).setOnes();

    Matrix x_p;
    if (g.has_features()) {
        x_p.resize(n + k, g.feature_dim());
        x_p.topRows(n) = g.features();
        x_p.bottomRows(k).setOnes();
    } else {
        x_p = Matrix::Identity(n + k, n + k);
    }
    return {std::move(a_p), std::move(x_p)};
}

Index edge_budget(Index k, double avg_degree)
{
    // The small slack keeps products such as 10 × 4.8 from flooring to 47.
    return static_cast<Index>(std::floor(static_cast<double>(k) * avg_degree + 1e-9));
}

Budget compute_budgets(const Graph& g, Index k, FeatureBudgetMode mode)
{
    if (k < 1) {
        throw ConfigError("compute_budgets: at least one injected node required");
    }
    Budget b;
    b.kind = g.feature_kind();
    b.delta_e = edge_budget(k, g.average_degree());
    if (b.delta_e == 0) {
        throw ConfigError("compute_budgets: edge budget floors to zero (k=" + std::to_string(k) +
                          ", average degree " + std::to_string(g.average_degree()) + ")");
    }
    if (g.feature_kind() == FeatureKind::discrete) {
        const double ones = g.features().sum();
        const auto per_node = static_cast<Index>(
            std::floor(ones / static_cast<double>(g.num_nodes()) + 1e-9));
        b.delta_x = mode == FeatureBudgetMode::per_node ? k * per_node : per_node;
        if (b.delta_x == 0) {
            throw ConfigError("compute_budgets: feature budget floors to zero");
        }
        b.delta_x = std::min(b.delta_x, k * g.feature_dim());
    } else if (g.feature_kind() == FeatureKind::continuous) {
        b.range_lo = g.features().colwise().minCoeff();
        b.range_hi = g.features().colwise().maxCoeff();
    }
    return b;
}

Index injection_count(const Graph& g, int target_class, double ratio)
{
    if (!(ratio > 0.0) || ratio > 1.0) {
        throw ConfigError("injection ratio must lie in (0, 1]");
    }
    if (target_class < 0 || target_class >= g.num_classes()) {
        throw ConfigError("target class " + std::to_string(target_class) + " does not exist");
    }
    const auto size = static_cast<double>(g.nodes_of_class(target_class).size());
    const auto k = static_cast<Index>(std::floor(ratio * size + 1e-9));
    if (k < 1) {
        throw ConfigError("ratio " + std::to_string(ratio) + " injects no nodes for a class of " +
                          std::to_string(static_cast<Index>(size)) + " nodes");
    }
    return k;
}

std::vector<Index> PoisonedGraph::injected_ids() const
{
    std::vector<Index> out;
    for (Index a = 0; a < k; ++a) {
        out.push_back(num_original + a);
    }
    return out;
}

Graph inject(const Graph& clean, Index k, const std::vector<Edge>& new_edges, const Matrix& x_a,
             int attacker_label)
{
    const Index n = clean.num_nodes();
    std::vector<Edge> edges = clean.edges();
    for (const auto& [u, v] : new_edges) {
        if (std::max(u, v) < n || u == v || std::max(u, v) >= n + k || std::min(u, v) < 0) {
            throw ContractError("inject: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                ") does not touch an injected node");
        }
        edges.emplace_back(u, v);
    }
    Matrix x;
    if (clean.has_features()) {
        if (x_a.rows() != k || x_a.cols() != clean.feature_dim()) {
            throw DimensionError("inject: attacker features must be k×D");
        }
        x.resize(n + k, clean.feature_dim());
        x.topRows(n) = clean.features();
        x.bottomRows(k) = x_a;
    }
    std::vector<int> labels = clean.labels();
    labels.resize(static_cast<std::size_t>(n + k), attacker_label);
    return Graph(n + k, std::move(edges), std::move(x), clean.feature_kind(), std::move(labels),
                 clean.num_classes());
}

bool BudgetCheck::satisfied(const Budget& budget) const
{
    if (!original_adjacency_identical || !original_features_identical) {
        return false;
    }
    if (edge_entries_added - pretend_entries != 2 * budget.delta_e) {
        return false;
    }
    return !budget.feature_budget_applies() || feature_ones_added <= budget.delta_x;
}

BudgetCheck check_budget(const Graph& clean, const PoisonedGraph& pg)
{
    const Index n = clean.num_nodes();
    const Graph& g = pg.graph;
    if (pg.num_original != n || g.num_nodes() != n + pg.k) {
        throw DimensionError("check_budget: poisoned graph does not extend the clean graph");
    }
    BudgetCheck c;
    c.edge_entries_added = 2 * (g.num_edges() - clean.num_edges());
    c.pretend_entries = 2 * static_cast<Index>(pg.pretend_edges.size());
    const Matrix& a = g.adjacency();
    c.original_adjacency_identical = a.topLeftCorner(n, n) == clean.adjacency();
    if (clean.has_features()) {
        const Matrix& x = g.features();
        c.original_features_identical = x.topRows(n) == clean.features();
        if (clean.feature_kind() == FeatureKind::discrete) {
            c.feature_ones_added = static_cast<Index>((x.array() != 0.0).count() -
                                                      (clean.features().array() != 0.0).count());
        }
    } else {
        c.original_features_identical = !g.has_features();
    }
    return c;
}

Graph original_subgraph(const PoisonedGraph& pg)
{
    const Index n = pg.num_original;
    std::vector<Edge> edges;
    for (const auto& e : pg.graph.edges()) {
        if (e.second < n) {
            edges.push_back(e);
        }
    }
    Matrix x;
    if (pg.graph.has_features()) {
        x = pg.graph.features().topRows(n);
    }
    std::vector<int> labels(pg.graph.labels().begin(), pg.graph.labels().begin() + n);
    return Graph(n, std::move(edges), std::move(x), pg.graph.feature_kind(), std::move(labels),
                 pg.graph.num_classes());
}

namespace {

nlohmann::json index_array(const std::vector<Index>& ids)
{
    auto out = nlohmann::json::array();
    for (Index i : ids) {
        out.push_back(i);
    }
    return out;
}

std::vector<Index> read_ids(const nlohmann::json& j)
{
    std::vector<Index> out;
    for (const auto& v : j) {
        out.push_back(v.get<Index>());
    }
    return out;
}

} // namespace

void save_poisoned(const PoisonedGraph& pg, const std::filesystem::path& dir)
{
    save_graph_dir(pg.graph, dir);
    nlohmann::json m;
    m["method"] = pg.method;
    m["num_original"] = pg.num_original;
    m["num_classes"] = pg.graph.num_classes();
    m["k"] = pg.k;
    m["target_class"] = pg.target_class;
    m["base_class"] = pg.base_class;
    m["delta_e"] = pg.budget.delta_e;
    if (pg.budget.feature_budget_applies()) {
        m["delta_x"] = pg.budget.delta_x;
    } else {
        m["delta_x"] = nullptr;
    }
    m["feature_kind"] = to_string(pg.budget.kind);
    m["injected_node_ids"] = index_array(pg.injected_ids());
    auto labels = nlohmann::json::array();
    for (Index id : pg.injected_ids()) {
        labels.push_back(pg.graph.labels()[static_cast<std::size_t>(id)]);
    }
    m["attacker_labels"] = labels;
    auto pretend = nlohmann::json::array();
    for (const auto& [u, v] : pg.pretend_edges) {
        pretend.push_back({u, v});
    }
    m["pretend_edges"] = pretend;
    m["config"] = pg.config;
    m["history"] = {{"target_accuracy", pg.accuracy_history},
                    {"loss", pg.loss_history},
                    {"selected_epoch", pg.selected_epoch}};
    m["split"] = {{"seed", pg.split.seed},
                  {"train", index_array(pg.split.train)},
                  {"val", index_array(pg.split.val)},
                  {"test", index_array(pg.split.test)}};
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
}

PoisonedGraph load_poisoned(const std::filesystem::path& dir)
{
    const auto path = dir / "manifest.json";
    std::ifstream in(path);
    if (!in) {
        throw ParseError("missing manifest " + path.string());
    }
    nlohmann::json m;
    try {
        m = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        PoisonedGraph pg;
        Graph loaded = load_graph_dir(dir);
        const int classes = m.at("num_classes").get<int>();
        std::vector<Edge> edges = loaded.edges();
        Matrix x = loaded.features();
        std::vector<int> labels = loaded.labels();
        pg.graph = Graph(loaded.num_nodes(), std::move(edges), std::move(x), loaded.feature_kind(),
                         std::move(labels), classes);
        pg.method = m.at("method").get<std::string>();
        pg.num_original = m.at("num_original").get<Index>();
        pg.k = m.at("k").get<Index>();
        pg.target_class = m.at("target_class").get<int>();
        pg.base_class = m.at("base_class").get<int>();
        pg.budget.kind = feature_kind_from_string(m.at("feature_kind").get<std::string>());
        pg.budget.delta_e = m.at("delta_e").get<Index>();
        if (!m.at("delta_x").is_null()) {
            pg.budget.delta_x = m.at("delta_x").get<Index>();
        }
        if (pg.budget.kind == FeatureKind::continuous && pg.num_original > 0) {
            pg.budget.range_lo = pg.graph.features().topRows(pg.num_original).colwise().minCoeff();
            pg.budget.range_hi = pg.graph.features().topRows(pg.num_original).colwise().maxCoeff();
        }
        for (const auto& e : m.at("pretend_edges")) {
            pg.pretend_edges.emplace_back(e.at(0).get<Index>(), e.at(1).get<Index>());
        }
        pg.config = m.at("config").get<std::map<std::string, std::string>>();
        pg.accuracy_history = m.at("history").at("target_accuracy").get<std::vector<double>>();
        pg.loss_history = m.at("history").at("loss").get<std::vector<double>>();
        pg.selected_epoch = m.at("history").at("selected_epoch").get<int>();
        const auto& s = m.at("split");
        pg.split.seed = s.at("seed").get<std::uint64_t>();
        pg.split.train = read_ids(s.at("train"));
        pg.split.val = read_ids(s.at("val"));
        pg.split.test = read_ids(s.at("test"));
        if (pg.graph.num_nodes() != pg.num_original + pg.k) {
            throw ParseError(path.string() + ": node count differs from num_original + k");
        }
        return pg;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

} // namespace nicki
