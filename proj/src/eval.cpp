#include "nicki/eval.hpp"

#include "nicki/attack.hpp"
#include "nicki/errors.hpp"
#include "nicki/random.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace nicki {

Breakdown misclassification_breakdown(const std::vector<int>& predictions,
                                      const std::vector<int>& labels,
                                      const std::vector<Index>& test_ids, int target_class,
                                      int base_class)
{
    Index total = 0;
    Index base = 0;
    Index correct = 0;
    for (Index i : test_ids) {
        if (labels.at(static_cast<std::size_t>(i)) != target_class) {
            continue;
        }
        ++total;
        const int p = predictions.at(static_cast<std::size_t>(i));
        base += p == base_class;
        correct += p == target_class;
    }
    if (total == 0) {
        throw ContractError("misclassification_breakdown: no target-class test nodes");
    }
    const auto t = static_cast<double>(total);
    Breakdown b;
    b.to_base = static_cast<double>(base) / t;
    b.correct = static_cast<double>(correct) / t;
    b.to_other = static_cast<double>(total - base - correct) / t;
    return b;
}

AccuracySummary evaluate_graph(const Graph& g, const Split& split,
                               const std::vector<Index>& extra_train, int target_class,
                               int base_class, const EvalOptions& options)
{
    if (options.trials < 1) {
        throw ParameterError("evaluate: at least one trial required");
    }
    const auto a_hat = std::make_shared<const SparseMatrix>(normalized_adjacency(g.num_nodes(), g.edges()));
    const Matrix x = model_features(g);
    std::vector<Index> train = split.train;
    train.insert(train.end(), extra_train.begin(), extra_train.end());

    AccuracySummary s;
    for (int trial = 0; trial < options.trials; ++trial) {
        TrainOptions t;
        t.hidden = options.hidden;
        t.epochs = options.epochs;
        t.lr = options.lr;
        t.select_best_val = options.select_best_val;
        t.seed = derive_seed(options.seed, "eval.trial", static_cast<std::uint64_t>(trial));
        const TrainResult r = train_surrogate(a_hat, x, g.labels(), g.num_classes(), train, split.val, t);
        const std::vector<int> pred = gcn_predict(*a_hat, x, r.model);
        s.per_trial.push_back(target_class_accuracy(pred, g.labels(), split.test, target_class));
        const Breakdown b = misclassification_breakdown(pred, g.labels(), split.test, target_class, base_class);
        s.breakdown.to_base += b.to_base;
        s.breakdown.correct += b.correct;
        s.breakdown.to_other += b.to_other;
    }
    const auto n = static_cast<double>(options.trials);
    for (double a : s.per_trial) {
        s.mean += a;
    }
    s.mean /= n;
    for (double a : s.per_trial) {
        s.std += (a - s.mean) * (a - s.mean);
    }
    s.std = std::sqrt(s.std / n);
    s.breakdown.to_base /= n;
    s.breakdown.correct /= n;
    s.breakdown.to_other /= n;
    return s;
}

AccuracySummary evaluate_poisoned(const PoisonedGraph& pg, const EvalOptions& options)
{
    return evaluate_graph(pg.graph, pg.split, pg.injected_ids(), pg.target_class, pg.base_class, options);
}

DefenseResult similarity_threshold_defense(const Graph& g, double threshold, Index first_injected)
{
    if (!g.has_features()) {
        throw ContractError("similarity_threshold_defense: not applicable to featureless graphs");
    }
    if (threshold < -1.0 || threshold > 1.0) {
        throw ParameterError("similarity_threshold_defense: threshold must lie in [-1, 1]");
    }
    DefenseResult r;
    r.threshold = threshold;
    std::vector<Edge> kept;
    const Matrix& x = g.features();
    for (const auto& [u, v] : g.edges()) {
        if (cosine_similarity(x.row(u), x.row(v)) < threshold) {
            ++r.removed_edges;
            if (first_injected >= 0 && v >= first_injected) {
                ++r.removed_injected_edges;
            }
        } else {
            kept.emplace_back(u, v);
        }
    }
    r.pruned = Graph(g.num_nodes(), std::move(kept), g.features(), g.feature_kind(), g.labels(), g.num_classes());
    return r;
}

StatsDelta post_attack_stats(const Graph& clean, const Graph& poisoned)
{
    StatsDelta d;
    d.clean = graph_stats(clean);
    d.poisoned = graph_stats(poisoned);
    d.gini = d.poisoned.gini - d.clean.gini;
    d.entropy = d.poisoned.entropy - d.clean.entropy;
    d.powerlaw_exponent = d.poisoned.powerlaw_exponent - d.clean.powerlaw_exponent;
    d.triangle_count = d.poisoned.triangle_count - d.clean.triangle_count;
    d.avg_degree = d.poisoned.avg_degree - d.clean.avg_degree;
    return d;
}

EvalReport evaluate_report(const PoisonedGraph& pg, const EvalOptions& options, double defense_threshold)
{
    EvalReport r;
    r.method = pg.method;
    r.k = pg.k;
    const Graph clean = original_subgraph(pg);
    const auto it = pg.config.find("ratio");
    r.ratio = it == pg.config.end() ? 0.0 : std::stod(it->second);
    r.clean = evaluate_graph(clean, pg.split, {}, pg.target_class, pg.base_class, options);
    r.poisoned = evaluate_poisoned(pg, options);
    r.stats = post_attack_stats(clean, pg.graph);
    if (pg.graph.has_features()) {
        r.similarity_clean = edge_similarity_distribution(clean);
        r.similarity_poisoned = edge_similarity_distribution(pg.graph);
        r.defense.push_back(similarity_threshold_defense(pg.graph, defense_threshold, pg.num_original));
        r.defended = evaluate_graph(r.defense.back().pruned, pg.split, pg.injected_ids(), pg.target_class,
                                    pg.base_class, options);
    }
    return r;
}

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

nlohmann::json to_json(const StatsReport& s)
{
    nlohmann::json j;
    j["gini"] = s.gini;
    j["entropy"] = s.entropy;
    j["powerlaw_exponent"] = std::isnan(s.powerlaw_exponent) ? nlohmann::json(nullptr)
                                                              : nlohmann::json(s.powerlaw_exponent);
    j["triangle_count"] = s.triangle_count;
    j["avg_degree"] = s.avg_degree;
    return j;
}

nlohmann::json to_json(const Breakdown& b)
{
    return {{"to_base", b.to_base}, {"correct", b.correct}, {"to_other", b.to_other}};
}

nlohmann::json to_json(const AccuracySummary& a)
{
    return {{"mean", a.mean}, {"std", a.std}, {"per_trial", a.per_trial}, {"breakdown", to_json(a.breakdown)}};
}

nlohmann::json to_json(const EvalReport& r)
{
    nlohmann::json j;
    j["method"] = r.method;
    j["r"] = r.ratio;
    j["k"] = r.k;
    j["clean_accuracy"] = to_json(r.clean);
    j["poisoned_accuracy"] = to_json(r.poisoned);
    j["stats_clean"] = to_json(r.stats.clean);
    j["stats_poisoned"] = to_json(r.stats.poisoned);
    j["stats_delta"] = {{"gini", r.stats.gini},
                        {"entropy", r.stats.entropy},
                        {"powerlaw_exponent", std::isnan(r.stats.powerlaw_exponent)
                                                  ? nlohmann::json(nullptr)
                                                  : nlohmann::json(r.stats.powerlaw_exponent)},
                        {"triangle_count", r.stats.triangle_count},
                        {"avg_degree", r.stats.avg_degree}};
    auto defense = nlohmann::json::array();
    for (const auto& d : r.defense) {
        defense.push_back({{"threshold", d.threshold},
                           {"removed_edges", d.removed_edges},
                           {"removed_injected_edges", d.removed_injected_edges},
                           {"accuracy", to_json(r.defended)}});
    }
    j["defense_results"] = defense;
    return j;
}

std::string accuracy_csv_header()
{
    return "r,method,clean_accuracy,poisoned_accuracy,poisoned_std,to_base,correct,to_other\n";
}

std::string accuracy_csv_row(const EvalReport& r)
{
    std::ostringstream os;
    os << format_double(r.ratio) << ',' << r.method << ',' << format_double(r.clean.mean) << ','
       << format_double(r.poisoned.mean) << ',' << format_double(r.poisoned.std) << ','
       << format_double(r.poisoned.breakdown.to_base) << ',' << format_double(r.poisoned.breakdown.correct)
       << ',' << format_double(r.poisoned.breakdown.to_other) << '\n';
    return os.str();
}

std::string stats_csv_header()
{
    return "r,graph,GC,DE,PE,TC\n";
}

std::string stats_csv_rows(const StatsDelta& s, double ratio)
{
    std::ostringstream os;
    auto row = [&os](const std::string& r, const char* name, const StatsReport& st) {
        os << r << ',' << name << ',' << format_double(st.gini) << ',' << format_double(st.entropy) << ','
           << format_double(st.powerlaw_exponent) << ',' << st.triangle_count << '\n';
    };
    row("0", "clean", s.clean);
    row(format_double(ratio), "poisoned", s.poisoned);
    return os.str();
}

std::string histogram_csv(const SimilarityHistogram& h)
{
    std::ostringstream os;
    os << "bin_lo,bin_hi,count\n";
    for (int b = 0; b < SimilarityHistogram::kBins; ++b) {
        const auto count = h.counts.empty() ? 0 : h.counts[static_cast<std::size_t>(b)];
        os << format_double(h.bin_lo(b)) << ',' << format_double(h.bin_hi(b)) << ',' << count << '\n';
    }
    return os.str();
}

void write_report(const EvalReport& r, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir / "tables");
    {
        std::ofstream out(dir / "report.json", std::ios::binary);
        out << to_json(r).dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "tables" / "accuracy.csv", std::ios::binary);
        out << accuracy_csv_header() << accuracy_csv_row(r);
    }
    {
        std::ofstream out(dir / "tables" / "stats.csv", std::ios::binary);
        out << stats_csv_header() << stats_csv_rows(r.stats, r.ratio);
    }
    if (!r.similarity_clean.counts.empty()) {
        std::ofstream out(dir / "tables" / "similarity_clean.csv", std::ios::binary);
        out << histogram_csv(r.similarity_clean);
        std::ofstream out2(dir / "tables" / "similarity_poisoned.csv", std::ios::binary);
        out2 << histogram_csv(r.similarity_poisoned);
    }
}

} // namespace nicki
