#pragma once

#include "nicki/attack.hpp"
#include "nicki/baselines.hpp"
#include "nicki/graph.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace nicki {

/// Run configuration file: `key = value` lines grouped under `[data]`,
/// `[attack]` and `[run]` headers. `#` and `;` start comments. Unknown
/// sections or keys are rejected.
///
///   [data]
///   dir = data/cora               # graph directory (edges.tsv, labels.txt, features.txt)
///   synthetic = sbm               # instead of dir
///   sbm_sizes = 150,150
///   sbm_p_in = 0.05
///   sbm_p_out = 0.005
///   sbm_feature_dim = 64
///   sbm_signal = 0.8
///   sbm_prototype_density = 0.2
///   sbm_feature_kind = discrete
///   sbm_seed = 1
///   split = 0.1,0.1,0.8
///
///   [attack]
///   method = nicki                # nicki | nicki-hide | random | preferential
///   r = 0.1
///   target_class = 0
///   base_class = 1
///   alpha = 0.1
///   tau_start = 1.0
///   tau_end = 0.1
///   gumbel = true
///   outer_epochs = 50
///   surrogate_epochs = 50
///   evaluator_epochs = 200
///   lr = 0.01
///   select_best_val = true
///   feature_budget = per_node     # per_node | total
///   internal_degree_frac = 0.7
///   pretend_threshold = 0.1
///   cvae_epochs = 100
///
///   [run]
///   seed = 0
///   out = out/run
///   trials = 5
///   defense_threshold = 0.1
struct RunConfig {
    std::optional<std::filesystem::path> data_dir;
    bool synthetic = false;
    SbmOptions sbm;
    std::array<double, 3> split = {0.1, 0.1, 0.8};

    std::string method = "nicki";
    AttackConfig attack;

    std::uint64_t seed = 0;
    std::filesystem::path out = "out";
    int trials = 5;
    double defense_threshold = 0.1;
};

std::vector<std::string> known_methods();

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {},
                            const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

// Applies one `section.key = value` setting; throws ConfigError on bad keys or values.
void set_config_value(RunConfig& cfg, const std::string& section, const std::string& key,
                      const std::string& value, const std::filesystem::path& base_dir = {});

// Normalized key → value listing recorded in manifests.
std::map<std::string, std::string> describe(const RunConfig& cfg);

// Checks cross-field invariants (single method, distinct classes, ratio range).
void validate(const RunConfig& cfg);

Graph load_dataset(const RunConfig& cfg);

// Attack settings with every seed derived from the root seed.
AttackConfig attack_config(const RunConfig& cfg);
BaselineConfig baseline_config(const RunConfig& cfg);

} // namespace nicki
