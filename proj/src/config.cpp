#include "nicki/config.hpp"

#include "nicki/errors.hpp"
#include "nicki/eval.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace nicki {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key)
{
    return "[" + section + "] " + key;
}

double to_double(const std::string& section, const std::string& key, const std::string& v)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(where(section, key) + ": expected a number, got '" + v + "'");
    }
    return out;
}

long long to_int(const std::string& section, const std::string& key, const std::string& v)
{
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(where(section, key) + ": expected an integer, got '" + v + "'");
    }
    return out;
}

std::uint64_t to_u64(const std::string& section, const std::string& key, const std::string& v)
{
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(where(section, key) + ": expected a nonnegative integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& section, const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError(where(section, key) + ": expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v)
{
    std::filesystem::path p(v);
    if (p.is_relative() && !base.empty()) {
        return base / p;
    }
    return p;
}

} // namespace

std::vector<std::string> known_methods()
{
    return {"nicki", "nicki-hide", "random", "preferential"};
}

void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value, const std::filesystem::path& base_dir)
{
    AttackConfig& a = cfg.attack;
    if (section == "data") {
        if (key == "dir") {
            cfg.data_dir = resolve(base_dir, value);
        } else if (key == "synthetic") {
            if (value != "sbm") {
                throw ConfigError(where(section, key) + ": only 'sbm' is supported");
            }
            cfg.synthetic = true;
        } else if (key == "sbm_sizes") {
            cfg.sbm.sizes.clear();
            for (const auto& s : split_list(value)) {
                cfg.sbm.sizes.push_back(static_cast<Index>(to_int(section, key, s)));
            }
        } else if (key == "sbm_p_in") {
            cfg.sbm.p_in = to_double(section, key, value);
        } else if (key == "sbm_p_out") {
            cfg.sbm.p_out = to_double(section, key, value);
        } else if (key == "sbm_feature_dim") {
            cfg.sbm.feature_dim = static_cast<Index>(to_int(section, key, value));
        } else if (key == "sbm_signal") {
            cfg.sbm.signal = to_double(section, key, value);
        } else if (key == "sbm_prototype_density") {
            cfg.sbm.prototype_density = to_double(section, key, value);
        } else if (key == "sbm_feature_kind") {
            try {
                cfg.sbm.feature_kind = feature_kind_from_string(value);
            } catch (const std::exception&) {
                throw ConfigError(where(section, key) + ": unknown feature kind '" + value + "'");
            }
        } else if (key == "sbm_seed") {
            cfg.sbm.seed = to_u64(section, key, value);
        } else if (key == "split") {
            const auto parts = split_list(value);
            if (parts.size() != 3) {
                throw ConfigError(where(section, key) + ": expected three fractions");
            }
            for (std::size_t i = 0; i < 3; ++i) {
                cfg.split[i] = to_double(section, key, parts[i]);
            }
        } else {
            throw ConfigError("unknown key " + where(section, key));
        }
    } else if (section == "attack") {
        if (key == "method") {
            const auto methods = known_methods();
            if (std::find(methods.begin(), methods.end(), value) == methods.end()) {
                throw ConfigError(where(section, key) + ": unknown method '" + value + "'");
            }
            cfg.method = value;
        } else if (key == "r") {
            a.ratio = to_double(section, key, value);
        } else if (key == "target_class") {
            a.target_class = static_cast<int>(to_int(section, key, value));
        } else if (key == "base_class") {
            a.base_class = static_cast<int>(to_int(section, key, value));
        } else if (key == "alpha") {
            a.alpha = to_double(section, key, value);
        } else if (key == "tau_start") {
            a.tau_start = to_double(section, key, value);
        } else if (key == "tau_end") {
            a.tau_end = to_double(section, key, value);
        } else if (key == "gumbel") {
            a.gumbel = to_bool(section, key, value);
        } else if (key == "outer_epochs") {
            a.outer_epochs = static_cast<int>(to_int(section, key, value));
        } else if (key == "surrogate_epochs") {
            a.surrogate_epochs = static_cast<int>(to_int(section, key, value));
        } else if (key == "evaluator_epochs") {
            a.evaluator_epochs = static_cast<int>(to_int(section, key, value));
        } else if (key == "lr") {
            a.lr = to_double(section, key, value);
        } else if (key == "select_best_val") {
            a.select_best_val = to_bool(section, key, value);
        } else if (key == "feature_budget") {
            if (value == "per_node") {
                a.feature_budget = FeatureBudgetMode::per_node;
            } else if (value == "total") {
                a.feature_budget = FeatureBudgetMode::total;
            } else {
                throw ConfigError(where(section, key) + ": expected per_node or total");
            }
        } else if (key == "internal_degree_frac") {
            a.hiding.internal_degree_frac = to_double(section, key, value);
        } else if (key == "pretend_threshold") {
            a.hiding.feature_threshold = to_double(section, key, value);
        } else if (key == "cvae_epochs") {
            a.hiding.cvae.epochs = static_cast<int>(to_int(section, key, value));
        } else {
            throw ConfigError("unknown key " + where(section, key));
        }
    } else if (section == "run") {
        if (key == "seed") {
            cfg.seed = to_u64(section, key, value);
        } else if (key == "out") {
            cfg.out = resolve(base_dir, value);
        } else if (key == "trials") {
            cfg.trials = static_cast<int>(to_int(section, key, value));
        } else if (key == "defense_threshold") {
            cfg.defense_threshold = to_double(section, key, value);
        } else {
            throw ConfigError("unknown key " + where(section, key));
        }
    } else {
        throw ConfigError("unknown section [" + section + "]");
    }
}

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir,
                            const std::string& source)
{
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section != "data" && section != "attack" && section != "run") {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key = value");
        }
        if (section.empty()) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": setting outside a section");
        }
        try {
            set_config_value(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
        } catch (const ConfigError& e) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (cfg.method == "nicki-hide") {
        cfg.attack.hide = true;
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path(), path.string());
}

std::map<std::string, std::string> describe(const RunConfig& cfg)
{
    const AttackConfig& a = cfg.attack;
    std::map<std::string, std::string> m;
    m["method"] = cfg.method;
    m["ratio"] = format_double(a.ratio);
    m["target_class"] = std::to_string(a.target_class);
    m["base_class"] = std::to_string(a.base_class);
    m["seed"] = std::to_string(cfg.seed);
    m["split"] = format_double(cfg.split[0]) + "," + format_double(cfg.split[1]) + "," + format_double(cfg.split[2]);
    m["feature_budget"] = a.feature_budget == FeatureBudgetMode::per_node ? "per_node" : "total";
    if (cfg.synthetic) {
        std::string sizes;
        for (std::size_t i = 0; i < cfg.sbm.sizes.size(); ++i) {
            sizes += (i ? "," : "") + std::to_string(cfg.sbm.sizes[i]);
        }
        m["data"] = "sbm";
        m["sbm_sizes"] = sizes;
        m["sbm_p_in"] = format_double(cfg.sbm.p_in);
        m["sbm_p_out"] = format_double(cfg.sbm.p_out);
        m["sbm_feature_dim"] = std::to_string(cfg.sbm.feature_dim);
        m["sbm_signal"] = format_double(cfg.sbm.signal);
        m["sbm_prototype_density"] = format_double(cfg.sbm.prototype_density);
        m["sbm_feature_kind"] = to_string(cfg.sbm.feature_kind);
        m["sbm_seed"] = std::to_string(cfg.sbm.seed);
    } else if (cfg.data_dir) {
        m["data"] = cfg.data_dir->filename().string();
    }
    if (cfg.method == "nicki" || cfg.method == "nicki-hide") {
        m["alpha"] = format_double(a.alpha);
        m["tau_start"] = format_double(a.tau_start);
        m["tau_end"] = format_double(a.tau_end);
        m["gumbel"] = a.gumbel ? "true" : "false";
        m["outer_epochs"] = std::to_string(a.outer_epochs);
        m["surrogate_epochs"] = std::to_string(a.surrogate_epochs);
        m["evaluator_epochs"] = std::to_string(a.evaluator_epochs);
        m["lr"] = format_double(a.lr);
        m["select_best_val"] = a.select_best_val ? "true" : "false";
    }
    if (cfg.method == "nicki-hide") {
        m["internal_degree_frac"] = format_double(a.hiding.internal_degree_frac);
        m["pretend_threshold"] = format_double(a.hiding.feature_threshold);
        m["cvae_epochs"] = std::to_string(a.hiding.cvae.epochs);
    }
    return m;
}

void validate(const RunConfig& cfg)
{
    if (cfg.synthetic == cfg.data_dir.has_value()) {
        throw ConfigError("[data] needs exactly one of 'dir' or 'synthetic'");
    }
    const auto methods = known_methods();
    if (std::find(methods.begin(), methods.end(), cfg.method) == methods.end()) {
        throw ConfigError("unknown method '" + cfg.method + "'");
    }
    if (cfg.attack.target_class == cfg.attack.base_class) {
        throw ConfigError("target_class and base_class must differ");
    }
    if (!(cfg.attack.ratio > 0.0) || cfg.attack.ratio > 1.0) {
        throw ConfigError("r must lie in (0, 1]");
    }
    if (cfg.trials < 1) {
        throw ConfigError("trials must be at least 1");
    }
    double total = 0.0;
    for (double f : cfg.split) {
        if (!(f > 0.0)) {
            throw ConfigError("split fractions must be positive");
        }
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1");
    }
}

Graph load_dataset(const RunConfig& cfg)
{
    if (cfg.synthetic) {
        try {
            return sbm_generate(cfg.sbm);
        } catch (const ParameterError& e) {
            throw ConfigError(std::string("sbm: ") + e.what());
        }
    }
    if (!cfg.data_dir || !std::filesystem::is_directory(*cfg.data_dir)) {
        throw ConfigError("data directory not found: " + (cfg.data_dir ? cfg.data_dir->string() : ""));
    }
    return load_graph_dir(*cfg.data_dir);
}

AttackConfig attack_config(const RunConfig& cfg)
{
    AttackConfig a = cfg.attack;
    a.hide = cfg.method == "nicki-hide";
    a.seed = derive_seed(cfg.seed, "attack");
    return a;
}

BaselineConfig baseline_config(const RunConfig& cfg)
{
    BaselineConfig b;
    b.kind = cfg.method == "random" ? BaselineKind::random : BaselineKind::preferential;
    b.target_class = cfg.attack.target_class;
    b.base_class = cfg.attack.base_class;
    b.ratio = cfg.attack.ratio;
    b.feature_budget = cfg.attack.feature_budget;
    b.seed = derive_seed(cfg.seed, "baseline");
    return b;
}

} // namespace nicki
