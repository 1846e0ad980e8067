#include "nicki/graph.hpp"

#include "nicki/errors.hpp"
#include "nicki/log.hpp"
#include "nicki/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string_view>

namespace nicki {

std::string to_string(FeatureKind kind)
{
    switch (kind) {
    case FeatureKind::none:
        return "none";
    case FeatureKind::discrete:
        return "discrete";
    case FeatureKind::continuous:
        return "continuous";
    }
    return "none";
}

FeatureKind feature_kind_from_string(const std::string& s)
{
    if (s == "discrete") {
        return FeatureKind::discrete;
    }
    if (s == "continuous") {
        return FeatureKind::continuous;
    }
    if (s == "none") {
        return FeatureKind::none;
    }
    throw ParseError("unknown feature kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(Index num_nodes, std::vector<Edge> edges, Matrix features, FeatureKind kind,
             std::vector<int> labels, int num_classes)
    : n_(num_nodes), features_(std::move(features)), kind_(kind), labels_(std::move(labels))
{
    if (n_ < 0) {
        throw ParameterError("Graph: negative node count");
    }
    if (static_cast<Index>(labels_.size()) != n_) {
        throw DimensionError("Graph: label count " + std::to_string(labels_.size()) +
                             " differs from node count " + std::to_string(n_));
    }
    const int max_label = labels_.empty() ? -1 : *std::max_element(labels_.begin(), labels_.end());
    num_classes_ = num_classes < 0 ? max_label + 1 : num_classes;
    for (int l : labels_) {
        if (l < 0 || l >= num_classes_) {
            throw ParameterError("Graph: label " + std::to_string(l) + " outside [0, " +
                                 std::to_string(num_classes_) + ")");
        }
    }
    if (kind_ == FeatureKind::none) {
        features_.resize(n_, 0);
    } else if (features_.rows() != n_) {
        throw DimensionError("Graph: feature rows differ from node count");
    }

    for (auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n_ || v >= n_) {
            throw ParameterError("Graph: edge endpoint outside node range");
        }
        if (u > v) {
            std::swap(u, v);
        }
    }
    const std::size_t given = edges.size();
    edges.erase(std::remove_if(edges.begin(), edges.end(), [](const Edge& e) { return e.first == e.second; }),
                edges.end());
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    dropped_ = static_cast<Index>(given - edges.size());
    edges_ = std::move(edges);

    adjacency_ = Matrix::Zero(n_, n_);
    for (const auto& [u, v] : edges_) {
        adjacency_(u, v) = 1.0;
        adjacency_(v, u) = 1.0;
    }
}

std::vector<Index> Graph::nodes_of_class(int label) const
{
    std::vector<Index> out;
    for (Index i = 0; i < n_; ++i) {
        if (labels_[static_cast<std::size_t>(i)] == label) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<Index> Graph::class_sizes() const
{
    std::vector<Index> sizes(static_cast<std::size_t>(num_classes_), 0);
    for (int l : labels_) {
        ++sizes[static_cast<std::size_t>(l)];
    }
    return sizes;
}

std::vector<Index> Graph::degrees() const
{
    std::vector<Index> deg(static_cast<std::size_t>(n_), 0);
    for (const auto& [u, v] : edges_) {
        ++deg[static_cast<std::size_t>(u)];
        ++deg[static_cast<std::size_t>(v)];
    }
    return deg;
}

double Graph::average_degree() const
{
    return n_ == 0 ? 0.0 : 2.0 * static_cast<double>(edges_.size()) / static_cast<double>(n_);
}

// ---------------------------------------------------------------------------
// Parsing helpers

namespace {

std::vector<std::string_view> tokens(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out)
{
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::ifstream open_input(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    return in;
}

std::string format_number(double v)
{
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

Graph load_graph(const std::filesystem::path& edge_path,
                 const std::optional<std::filesystem::path>& feature_path,
                 const std::filesystem::path& label_path)
{
    const std::string label_name = label_path.string();
    std::vector<int> labels;
    {
        std::ifstream in = open_input(label_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto tok = tokens(line);
            if (tok.empty()) {
                continue;
            }
            int l = 0;
            if (tok.size() != 1 || !parse_number(tok[0], l)) {
                throw ParseError(label_name, lineno, "expected one integer class id");
            }
            if (l < 0) {
                throw ParseError(label_name, lineno, "label out of range: " + std::to_string(l));
            }
            labels.push_back(l);
        }
    }
    const auto n = static_cast<Index>(labels.size());

    const std::string edge_name = edge_path.string();
    std::vector<Edge> edges;
    Index max_id = -1;
    {
        std::ifstream in = open_input(edge_path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto tok = tokens(line);
            if (tok.empty()) {
                continue;
            }
            long long u = 0;
            long long v = 0;
            if (tok.size() != 2 || !parse_number(tok[0], u) || !parse_number(tok[1], v)) {
                throw ParseError(edge_name, lineno, "expected two integer node ids");
            }
            if (u < 0 || v < 0) {
                throw ParseError(edge_name, lineno, "negative node id");
            }
            if (u >= n || v >= n) {
                throw ParseError(edge_name, lineno,
                                 "node id " + std::to_string(std::max(u, v)) +
                                     " has no label (labels cover " + std::to_string(n) + " nodes)");
            }
            max_id = std::max<Index>(max_id, static_cast<Index>(std::max(u, v)));
            edges.emplace_back(static_cast<Index>(u), static_cast<Index>(v));
        }
    }

    Matrix features;
    FeatureKind kind = FeatureKind::none;
    if (feature_path) {
        const std::string feat_name = feature_path->string();
        std::ifstream in = open_input(*feature_path);
        std::string line;
        std::size_t lineno = 0;
        long long rows = -1;
        long long dim = -1;
        Index row = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto tok = tokens(line);
            if (tok.empty()) {
                continue;
            }
            if (rows < 0) {
                if (tok.size() != 3 || !parse_number(tok[0], rows) || !parse_number(tok[1], dim) ||
                    rows < 0 || dim < 0) {
                    throw ParseError(feat_name, lineno, "expected header 'n D kind'");
                }
                try {
                    kind = feature_kind_from_string(std::string(tok[2]));
                } catch (const ParseError&) {
                    throw ParseError(feat_name, lineno, "unknown feature kind '" + std::string(tok[2]) + "'");
                }
                if (rows != n) {
                    throw ParseError(feat_name, lineno,
                                     "feature rows " + std::to_string(rows) + " differ from label count " +
                                         std::to_string(n));
                }
                features = Matrix::Zero(n, static_cast<Index>(dim));
                continue;
            }
            if (row >= n) {
                throw ParseError(feat_name, lineno, "more feature rows than declared");
            }
            if (static_cast<long long>(tok.size()) != dim) {
                throw ParseError(feat_name, lineno,
                                 "ragged row: expected " + std::to_string(dim) + " values, got " +
                                     std::to_string(tok.size()));
            }
            for (Index j = 0; j < dim; ++j) {
                double v = 0;
                if (!parse_number(tok[static_cast<std::size_t>(j)], v) || !std::isfinite(v)) {
                    throw ParseError(feat_name, lineno, "non-numeric feature value");
                }
                if (kind == FeatureKind::discrete && v != 0.0 && v != 1.0) {
                    throw ParseError(feat_name, lineno, "discrete features must be 0 or 1");
                }
                features(row, j) = v;
            }
            ++row;
        }
        if (rows < 0) {
            throw ParseError(feat_name, lineno, "missing header");
        }
        if (row != n) {
            throw ParseError(feat_name, lineno, "expected " + std::to_string(n) + " feature rows, got " +
                                                    std::to_string(row));
        }
        if (kind == FeatureKind::none) {
            features.resize(n, 0);
        }
    }

    Graph g(n, std::move(edges), std::move(features), kind, std::move(labels));
    if (g.dropped_edges() > 0) {
        log().info("{}: dropped {} duplicate or self-loop edges", edge_name, g.dropped_edges());
    }
    return g;
}

Graph load_graph_dir(const std::filesystem::path& dir)
{
    const auto features = dir / "features.txt";
    return load_graph(dir / "edges.tsv",
                      std::filesystem::exists(features) ? std::optional(features) : std::nullopt,
                      dir / "labels.txt");
}

void save_graph_dir(const Graph& g, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "edges.tsv", std::ios::binary);
        for (const auto& [u, v] : g.edges()) {
            out << u << '\t' << v << '\n';
        }
    }
    {
        std::ofstream out(dir / "labels.txt", std::ios::binary);
        for (int l : g.labels()) {
            out << l << '\n';
        }
    }
    const auto feature_file = dir / "features.txt";
    if (g.has_features()) {
        std::ofstream out(feature_file, std::ios::binary);
        const Matrix& x = g.features();
        out << x.rows() << ' ' << x.cols() << ' ' << to_string(g.feature_kind()) << '\n';
        std::string line;
        for (Index i = 0; i < x.rows(); ++i) {
            line.clear();
            for (Index j = 0; j < x.cols(); ++j) {
                if (j > 0) {
                    line += ' ';
                }
                line += format_number(x(i, j));
            }
            line += '\n';
            out << line;
        }
    } else if (std::filesystem::exists(feature_file)) {
        std::filesystem::remove(feature_file);
    }
}

// ---------------------------------------------------------------------------
// Splits

namespace {

// Largest-remainder apportionment of `target` over classes with ideal shares.
std::vector<Index> apportion(const std::vector<double>& ideal, const std::vector<Index>& cap, Index target)
{
    const std::size_t c = ideal.size();
    std::vector<Index> out(c);
    Index assigned = 0;
    for (std::size_t i = 0; i < c; ++i) {
        out[i] = std::min<Index>(static_cast<Index>(std::floor(ideal[i])), cap[i]);
        assigned += out[i];
    }
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return ideal[a] - std::floor(ideal[a]) > ideal[b] - std::floor(ideal[b]);
    });
    // First pass rounds shares up once each; later passes fill what caps left over.
    bool first = true;
    bool progress = true;
    while (assigned < target && progress) {
        progress = false;
        for (std::size_t i : order) {
            if (assigned >= target) {
                break;
            }
            const bool at_floor = out[i] == static_cast<Index>(std::floor(ideal[i]));
            if (out[i] < cap[i] && (!first || at_floor)) {
                ++out[i];
                ++assigned;
                progress = true;
            }
        }
        first = false;
    }
    return out;
}

} // namespace

Split split_nodes(const Graph& g, std::array<double, 3> fractions, std::uint64_t seed)
{
    for (double f : fractions) {
        if (!(f > 0.0)) {
            throw ParameterError("split_nodes: fractions must be positive");
        }
    }
    if (std::abs(fractions[0] + fractions[1] + fractions[2] - 1.0) > 1e-9) {
        throw ParameterError("split_nodes: fractions must sum to 1");
    }
    const Index n = g.num_nodes();
    const std::size_t classes = static_cast<std::size_t>(g.num_classes());
    Rng rng(seed);

    std::vector<std::vector<Index>> members(classes);
    for (Index i = 0; i < n; ++i) {
        members[static_cast<std::size_t>(g.labels()[static_cast<std::size_t>(i)])].push_back(i);
    }
    for (std::size_t c = 0; c < classes; ++c) {
        rng.shuffle(members[c].begin(), members[c].end());
        if (!members[c].empty() && members[c].size() < 3) {
            log().warn("split_nodes: class {} has {} nodes; assignment is best effort", c, members[c].size());
        }
    }

    std::vector<Index> size(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        size[c] = static_cast<Index>(members[c].size());
    }
    auto shares = [&](double f) {
        std::vector<double> ideal(classes);
        for (std::size_t c = 0; c < classes; ++c) {
            ideal[c] = f * static_cast<double>(size[c]);
        }
        return ideal;
    };
    const auto train_target = static_cast<Index>(std::llround(fractions[0] * static_cast<double>(n)));
    const auto val_target = static_cast<Index>(std::llround(fractions[1] * static_cast<double>(n)));
    std::vector<Index> train_count = apportion(shares(fractions[0]), size, train_target);
    std::vector<Index> remaining(classes);
    for (std::size_t c = 0; c < classes; ++c) {
        remaining[c] = size[c] - train_count[c];
    }
    std::vector<Index> val_count = apportion(shares(fractions[1]), remaining, val_target);

    Split split;
    split.seed = seed;
    for (std::size_t c = 0; c < classes; ++c) {
        const auto& m = members[c];
        const auto tr = static_cast<std::size_t>(train_count[c]);
        const auto va = static_cast<std::size_t>(val_count[c]);
        split.train.insert(split.train.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(tr));
        split.val.insert(split.val.end(), m.begin() + static_cast<std::ptrdiff_t>(tr),
                         m.begin() + static_cast<std::ptrdiff_t>(tr + va));
        split.test.insert(split.test.end(), m.begin() + static_cast<std::ptrdiff_t>(tr + va), m.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.val.begin(), split.val.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

// ---------------------------------------------------------------------------
// Synthetic graphs

Graph sbm_generate(const SbmOptions& o)
{
    if (o.sizes.empty()) {
        throw ParameterError("sbm_generate: no classes");
    }
    for (double p : {o.p_in, o.p_out, o.signal, o.prototype_density}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw ParameterError("sbm_generate: probabilities must lie in [0, 1]");
        }
    }
    if (!(o.p_in > o.p_out)) {
        throw ParameterError("sbm_generate: p_in must exceed p_out");
    }
    if (o.feature_dim < 0) {
        throw ParameterError("sbm_generate: negative feature dimension");
    }
    Rng rng(o.seed);
    const Index n = std::accumulate(o.sizes.begin(), o.sizes.end(), Index{0});
    const auto classes = static_cast<Index>(o.sizes.size());
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (Index c = 0; c < classes; ++c) {
        if (o.sizes[static_cast<std::size_t>(c)] <= 0) {
            throw ParameterError("sbm_generate: class sizes must be positive");
        }
        labels.insert(labels.end(), static_cast<std::size_t>(o.sizes[static_cast<std::size_t>(c)]),
                      static_cast<int>(c));
    }

    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            const double p = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? o.p_in : o.p_out;
            if (rng.uniform() < p) {
                edges.emplace_back(i, j);
            }
        }
    }

    Matrix features;
    const Index dim = o.feature_kind == FeatureKind::none ? 0 : o.feature_dim;
    if (dim > 0) {
        Matrix prototypes(classes, dim);
        for (Index c = 0; c < classes; ++c) {
            for (Index j = 0; j < dim; ++j) {
                prototypes(c, j) = o.feature_kind == FeatureKind::discrete
                                       ? (rng.uniform() < o.prototype_density ? 1.0 : 0.0)
                                       : 2.0 * rng.normal();
            }
        }
        features.resize(n, dim);
        for (Index i = 0; i < n; ++i) {
            const Index c = labels[static_cast<std::size_t>(i)];
            for (Index j = 0; j < dim; ++j) {
                if (o.feature_kind == FeatureKind::discrete) {
                    const bool flip = rng.uniform() >= o.signal;
                    features(i, j) = flip ? 1.0 - prototypes(c, j) : prototypes(c, j);
                } else {
                    features(i, j) = o.signal * prototypes(c, j) + (1.0 - o.signal) * 2.0 * rng.normal();
                }
            }
        }
    }
    return Graph(n, std::move(edges), std::move(features), dim > 0 ? o.feature_kind : FeatureKind::none,
                 std::move(labels), static_cast<int>(classes));
}

Graph erdos_renyi(Index n, double p, std::uint64_t seed)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ParameterError("erdos_renyi: p outside [0, 1]");
    }
    Rng rng(seed);
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            if (rng.uniform() < p) {
                edges.emplace_back(i, j);
            }
        }
    }
    return Graph(n, std::move(edges), Matrix(), FeatureKind::none, std::vector<int>(static_cast<std::size_t>(n), 0));
}

} // namespace nicki
