#include "nicki/attack.hpp"
#include "nicki/baselines.hpp"
#include "nicki/checkpoint.hpp"
#include "nicki/config.hpp"
#include "nicki/errors.hpp"
#include "nicki/eval.hpp"
#include "nicki/log.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace nicki;

namespace {

struct AttackArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> method;
    std::optional<double> r;
    std::optional<int> target_class;
    std::optional<int> base_class;
    std::optional<double> alpha;
    bool hide = false;
};

struct EvalArgs {
    std::vector<std::string> dirs;
    int trials = 5;
    std::uint64_t seed = 0;
    std::optional<std::string> out;
    double defense_threshold = 0.1;
    int epochs = 200;
};

struct StatsArgs {
    std::string clean;
    std::string poisoned;
    std::optional<std::string> out;
};

struct EmbedArgs {
    std::string dir;
    std::string out;
    std::uint64_t seed = 0;
};

void write_history(const AttackResult& result, const fs::path& path)
{
    std::ofstream out(path, std::ios::binary);
    out << "epoch,tau,loss,target_accuracy\n";
    for (const auto& e : result.history) {
        out << e.epoch << ',' << format_double(e.tau) << ',' << format_double(e.loss) << ','
            << format_double(e.target_accuracy) << '\n';
    }
}

int cmd_attack(const AttackArgs& args)
{
    RunConfig cfg = load_config(args.config);
    if (args.seed) {
        cfg.seed = *args.seed;
    }
    if (args.out) {
        cfg.out = *args.out;
    }
    if (args.method) {
        set_config_value(cfg, "attack", "method", *args.method);
    }
    if (args.hide) {
        if (cfg.method != "nicki" && cfg.method != "nicki-hide") {
            throw ConfigError("--hide only applies to method nicki");
        }
        cfg.method = "nicki-hide";
    }
    if (args.r) {
        cfg.attack.ratio = *args.r;
    }
    if (args.target_class) {
        cfg.attack.target_class = *args.target_class;
    }
    if (args.base_class) {
        cfg.attack.base_class = *args.base_class;
    }
    if (args.alpha) {
        cfg.attack.alpha = *args.alpha;
    }
    validate(cfg);

    const Graph g = load_dataset(cfg);
    const Split split = split_nodes(g, cfg.split, derive_seed(cfg.seed, "split"));
    log().info("attack: method={} n={} |E|={} r={}", cfg.method, g.num_nodes(), g.num_edges(),
               cfg.attack.ratio);

    fs::create_directories(cfg.out);
    PoisonedGraph pg;
    if (cfg.method == "nicki" || cfg.method == "nicki-hide") {
        const AttackConfig acfg = attack_config(cfg);
        AttackResult result = run_attack(g, split, acfg, [](const EpochRecord& e) {
            log().info("epoch {:3d} tau={:.3f} loss={:.4f} target_acc={:.4f}", e.epoch, e.tau, e.loss,
                       e.target_accuracy);
        });
        pg = std::move(result.poisoned);
        write_history(result, cfg.out / "history.csv");
        save_checkpoint(result.generator.named_parameters(), cfg.out / "generator");
        if (acfg.hide) {
            std::ofstream out(cfg.out / "hiding.json", std::ios::binary);
            out << hiding_manifest(result.hiding).dump(2) << '\n';
        }
    } else {
        pg = run_baseline(g, split, baseline_config(cfg));
    }
    pg.config = describe(cfg);
    save_poisoned(pg, cfg.out);

    const BudgetCheck check = check_budget(g, pg);
    if (!check.satisfied(pg.budget)) {
        throw ContractError("attack produced a graph outside its budget");
    }
    log().info("attack: k={} delta_e={} wrote {}", pg.k, pg.budget.delta_e, cfg.out.string());
    return 0;
}

int cmd_eval(const EvalArgs& args)
{
    if (args.dirs.size() > 1 && !args.out) {
        throw ConfigError("eval over several directories needs --out");
    }
    EvalOptions opts;
    opts.trials = args.trials;
    opts.seed = args.seed;
    opts.epochs = args.epochs;
    if (opts.trials < 1) {
        throw ConfigError("--trials must be at least 1");
    }

    std::vector<EvalReport> reports;
    for (const auto& d : args.dirs) {
        const fs::path dir(d);
        if (!fs::exists(dir / "manifest.json")) {
            throw ConfigError("no manifest.json in " + dir.string());
        }
        const PoisonedGraph pg = load_poisoned(dir);
        const auto it = pg.config.find("select_best_val");
        opts.select_best_val = it == pg.config.end() || it->second == "true";
        EvalReport report = evaluate_report(pg, opts, args.defense_threshold);
        log().info("eval {}: clean={:.4f} poisoned={:.4f}", dir.string(), report.clean.mean, report.poisoned.mean);
        const fs::path out = args.dirs.size() == 1 ? (args.out ? fs::path(*args.out) : dir / "eval")
                                                   : fs::path(*args.out) / dir.filename();
        write_report(report, out);
        reports.push_back(std::move(report));
    }

    if (args.dirs.size() > 1) {
        const fs::path out = fs::path(*args.out) / "tables";
        fs::create_directories(out);
        std::ofstream acc(out / "accuracy.csv", std::ios::binary);
        acc << accuracy_csv_header();
        std::ofstream st(out / "stats.csv", std::ios::binary);
        st << stats_csv_header();
        for (std::size_t i = 0; i < reports.size(); ++i) {
            acc << accuracy_csv_row(reports[i]);
            const std::string rows = stats_csv_rows(reports[i].stats, reports[i].ratio);
            // the clean row is shared, emit it once
            st << (i == 0 ? rows : rows.substr(rows.find('\n') + 1));
        }
    }
    return 0;
}

Graph load_any(const fs::path& dir, std::optional<PoisonedGraph>& pg)
{
    if (!fs::is_directory(dir)) {
        throw ConfigError("not a directory: " + dir.string());
    }
    if (fs::exists(dir / "manifest.json")) {
        pg = load_poisoned(dir);
        return pg->graph;
    }
    return load_graph_dir(dir);
}

int cmd_stats(const StatsArgs& args)
{
    std::optional<PoisonedGraph> clean_pg;
    std::optional<PoisonedGraph> pg;
    const Graph clean = load_any(args.clean, clean_pg);
    const Graph poisoned = load_any(args.poisoned, pg);

    if (poisoned.num_nodes() < clean.num_nodes() || poisoned.feature_dim() != clean.feature_dim() ||
        (pg && pg->num_original != clean.num_nodes())) {
        throw DimensionError("stats: poisoned graph does not extend the clean graph");
    }
    std::string ratio = "";
    if (pg) {
        const auto it = pg->config.find("ratio");
        if (it != pg->config.end()) {
            ratio = it->second;
        }
    }
    const StatsDelta d = post_attack_stats(clean, poisoned);
    std::string csv = stats_csv_header() + stats_csv_rows(d, 0.0);
    if (!ratio.empty()) {
        const auto second = csv.find("\n0,poisoned");
        if (second != std::string::npos) {
            csv.replace(second + 1, 1, ratio);
        }
    }
    if (args.out) {
        const fs::path out(*args.out);
        fs::create_directories(out);
        std::ofstream f(out / "stats.csv", std::ios::binary);
        f << csv;
        nlohmann::json j;
        j["clean"] = to_json(d.clean);
        j["poisoned"] = to_json(d.poisoned);
        j["delta"] = {{"gini", d.gini},
                      {"entropy", d.entropy},
                      {"powerlaw_exponent", std::isnan(d.powerlaw_exponent) ? nlohmann::json(nullptr)
                                                                            : nlohmann::json(d.powerlaw_exponent)},
                      {"triangle_count", d.triangle_count},
                      {"avg_degree", d.avg_degree}};
        std::ofstream jf(out / "stats.json", std::ios::binary);
        jf << j.dump(2) << '\n';
    } else {
        std::cout << csv;
    }
    return 0;
}

int cmd_export_embeddings(const EmbedArgs& args)
{
    std::optional<PoisonedGraph> pg;
    const Graph g = load_any(args.dir, pg);
    Split split;
    std::vector<Index> train;
    if (pg) {
        split = pg->split;
        train = poisoned_train_ids(split, *pg);
    } else {
        split = split_nodes(g, {0.1, 0.1, 0.8}, derive_seed(args.seed, "split"));
        train = split.train;
    }
    const auto a_hat = std::make_shared<const SparseMatrix>(normalized_adjacency(g.num_nodes(), g.edges()));
    const Matrix x = model_features(g);
    TrainOptions t;
    t.seed = derive_seed(args.seed, "embeddings");
    const TrainResult r = train_surrogate(a_hat, x, g.labels(), g.num_classes(), train, split.val, t);
    const Matrix h = gcn_hidden(*a_hat, x, r.model);

    const fs::path out(args.out);
    fs::create_directories(out);
    std::ofstream f(out / "embeddings.csv", std::ios::binary);
    f << "node,label,injected";
    for (Index c = 0; c < h.cols(); ++c) {
        f << ",h" << c;
    }
    f << '\n';
    const Index first_injected = pg ? pg->num_original : g.num_nodes();
    for (Index i = 0; i < h.rows(); ++i) {
        f << i << ',' << g.labels()[static_cast<std::size_t>(i)] << ',' << (i >= first_injected ? 1 : 0);
        for (Index c = 0; c < h.cols(); ++c) {
            f << ',' << format_double(h(i, c));
        }
        f << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"nicki: class-specific node-injection poisoning of graph classifiers"};
    app.require_subcommand(1);

    AttackArgs attack;
    auto* a = app.add_subcommand("attack", "Run an attack and write the poisoned graph");
    a->add_option("--config", attack.config, "Run configuration file")->required();
    a->add_option("--seed", attack.seed, "Root seed (overrides [run] seed)");
    a->add_option("--out", attack.out, "Output directory (overrides [run] out)");
    a->add_option("--method", attack.method, "nicki | nicki-hide | random | preferential");
    a->add_option("--r", attack.r, "Injection ratio");
    a->add_option("--target-class", attack.target_class, "Class to degrade");
    a->add_option("--base-class", attack.base_class, "Class attackers pretend to belong to");
    a->add_option("--alpha", attack.alpha, "Weight of the hiding feature term");
    a->add_flag("--hide", attack.hide, "Enable attacker hiding");

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "Evaluate poisoned graph directories");
    e->add_option("dirs", eval.dirs, "Poisoned graph directories")->required();
    e->add_option("--trials", eval.trials, "Independent GCN trainings per graph");
    e->add_option("--seed", eval.seed, "Root seed");
    e->add_option("--out", eval.out, "Output directory");
    e->add_option("--epochs", eval.epochs, "GCN training epochs");
    e->add_option("--defense-threshold", eval.defense_threshold, "Cosine similarity cut for the defense");

    StatsArgs stats;
    auto* s = app.add_subcommand("stats", "Compare structural statistics of two graphs");
    s->add_option("clean", stats.clean, "Clean graph directory")->required();
    s->add_option("poisoned", stats.poisoned, "Poisoned graph directory")->required();
    s->add_option("--out", stats.out, "Output directory (default: CSV on stdout)");

    EmbedArgs embed;
    auto* x = app.add_subcommand("export-embeddings", "Write hidden-layer GCN embeddings");
    x->add_option("dir", embed.dir, "Graph or poisoned graph directory")->required();
    x->add_option("--out", embed.out, "Output directory")->required();
    x->add_option("--seed", embed.seed, "Root seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*a) {
            return cmd_attack(attack);
        }
        if (*e) {
            return cmd_eval(eval);
        }
        if (*s) {
            return cmd_stats(stats);
        }
        return cmd_export_embeddings(embed);
    } catch (const ConfigError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const ParseError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const DimensionError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}
