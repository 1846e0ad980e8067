#pragma once

#include "nicki/models.hpp"
#include "nicki/poison.hpp"
#include "nicki/stats.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nicki {

struct Breakdown {
    double to_base = 0.0;
    double correct = 0.0;
    double to_other = 0.0;
};

/// Shares of target-class test nodes predicted as the base class, as the
/// target class and as anything else.
Breakdown misclassification_breakdown(const std::vector<int>& predictions,
                                      const std::vector<int>& labels,
                                      const std::vector<Index>& test_ids, int target_class,
                                      int base_class);

struct EvalOptions {
    int trials = 5;
    int epochs = 200;
    Index hidden = 16;
    double lr = 0.01;
    bool select_best_val = true;
    std::uint64_t seed = 0;
};

struct AccuracySummary {
    std::vector<double> per_trial;
    double mean = 0.0;
    double std = 0.0;
    Breakdown breakdown;
};

/// Trains `trials` fresh GCNs on the graph (attackers in the training set
/// with their assigned labels) and measures target-class test accuracy.
AccuracySummary evaluate_graph(const Graph& g, const Split& split,
                               const std::vector<Index>& extra_train, int target_class,
                               int base_class, const EvalOptions& options);

AccuracySummary evaluate_poisoned(const PoisonedGraph& pg, const EvalOptions& options);

struct DefenseResult {
    double threshold = 0.0;
    Index removed_edges = 0;
    Index removed_injected_edges = 0;
    Graph pruned;
};

/// Drops every edge whose endpoint features have cosine similarity below
/// `threshold`. Edges touching nodes ≥ `first_injected` count as injected.
DefenseResult similarity_threshold_defense(const Graph& g, double threshold,
                                           Index first_injected = -1);

struct StatsDelta {
    StatsReport clean;
    StatsReport poisoned;
    double gini = 0.0;
    double entropy = 0.0;
    double powerlaw_exponent = 0.0;
    std::int64_t triangle_count = 0;
    double avg_degree = 0.0;
};

StatsDelta post_attack_stats(const Graph& clean, const Graph& poisoned);

struct EvalReport {
    std::string method;
    double ratio = 0.0;
    Index k = 0;
    AccuracySummary clean;
    AccuracySummary poisoned;
    StatsDelta stats;
    SimilarityHistogram similarity_clean;
    SimilarityHistogram similarity_poisoned;
    std::vector<DefenseResult> defense;
    AccuracySummary defended;
};

/// Full evaluation of a poisoned graph against its clean part.
EvalReport evaluate_report(const PoisonedGraph& pg, const EvalOptions& options,
                           double defense_threshold = 0.1);

nlohmann::json to_json(const StatsReport& s);
nlohmann::json to_json(const Breakdown& b);
nlohmann::json to_json(const AccuracySummary& a);
nlohmann::json to_json(const EvalReport& r);

/// report.json plus tables/accuracy.csv, tables/stats.csv,
/// tables/similarity_clean.csv, tables/similarity_poisoned.csv.
void write_report(const EvalReport& r, const std::filesystem::path& dir);

// "r,method,clean_accuracy,poisoned_accuracy,poisoned_std,to_base,correct,to_other"
std::string accuracy_csv_header();
std::string accuracy_csv_row(const EvalReport& r);

// "r,graph,GC,DE,PE,TC"
std::string stats_csv_header();
std::string stats_csv_rows(const StatsDelta& s, double ratio);

std::string histogram_csv(const SimilarityHistogram& h);

// Shortest round-trip decimal text for a double.
std::string format_double(double v);

} // namespace nicki
