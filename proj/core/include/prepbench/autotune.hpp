#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prepbench/bench.hpp"

namespace prepbench {

struct ContinuousParam {
    double lo = 0.0;
    double hi = 1.0;
};

struct ChoiceParam {
    std::vector<ParamValue> values;
};

using SearchParam = std::variant<ContinuousParam, ChoiceParam>;

/// An ordered pipeline template: fixed params plus searchable ones.
struct SearchStep {
    std::string op;
    std::map<std::string, ParamValue> fixed;
    std::map<std::string, SearchParam> searchable;
};

struct SearchSpace {
    std::vector<SearchStep> steps;
};

enum class SearchMode { Random, Grid };

struct Trial {
    int trial_id = 0;
    PipelineSpec pipeline;
    double objective = 0.0; // final validation accuracy
    double wall_ms = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

struct TuneReport {
    std::vector<Trial> trials;
    std::optional<int> best_trial_id;
    std::size_t subset_size = 0;
    double subset_divergence = 0.0;
};

/// Random mode draws n seeded samples; grid mode enumerates the cross-product
/// of choice values (continuous params are rejected in grid mode).
std::vector<PipelineSpec> sample_trials(const SearchSpace& space, int n, std::uint64_t seed,
                                        SearchMode mode = SearchMode::Random);

struct TuneConfig {
    double subset_fraction = 1.0;
    int n_trials = 1;
    int epochs = 5;
    double lambda = 1e-3;
    std::uint64_t seed = 0;
    SearchMode mode = SearchMode::Random;
    FeatureSpec features;
};

TuneReport run_search(const SearchSpace& space, const DatasetIndex& index,
                      const TuneConfig& config);

std::string tune_report_to_json(const TuneReport& report, const std::string& config_echo);

} // namespace prepbench
