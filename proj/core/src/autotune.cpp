#include "prepbench/autotune.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "prepbench/rng.hpp"

namespace prepbench {

namespace {

void validate_space(const SearchSpace& space) {
    for (const auto& step : space.steps) {
        for (const auto& [name, param] : step.searchable) {
            if (const auto* c = std::get_if<ContinuousParam>(&param)) {
                if (!(c->lo < c->hi))
                    throw Error(ErrorCode::EmptySpace,
                                "param '" + name + "': need lo < hi");
            } else if (std::get<ChoiceParam>(param).values.empty()) {
                throw Error(ErrorCode::EmptySpace, "param '" + name + "': empty choice list");
            }
        }
    }
}

// Re-parse through the pipeline front door so trial specs obey the same
// validation as user-written ones.
PipelineSpec validated(PipelineSpec spec) {
    return parse_pipeline(serialize_pipeline(spec));
}

} // namespace

std::vector<PipelineSpec> sample_trials(const SearchSpace& space, int n, std::uint64_t seed,
                                        SearchMode mode) {
    if (n < 1)
        throw Error(ErrorCode::EmptySpace, "need n >= 1 trials");
    validate_space(space);

    std::vector<PipelineSpec> out;
    if (mode == SearchMode::Random) {
        CounterRng rng(seed);
        for (int i = 0; i < n; ++i) {
            PipelineSpec spec;
            for (const auto& step : space.steps) {
                PipelineStep s;
                s.op = step.op;
                s.params = step.fixed;
                for (const auto& [name, param] : step.searchable) { // sorted by name
                    if (const auto* c = std::get_if<ContinuousParam>(&param))
                        s.params[name] = c->lo + rng.next_unit() * (c->hi - c->lo);
                    else {
                        const auto& choice = std::get<ChoiceParam>(param);
                        s.params[name] = choice.values[rng.next_below(choice.values.size())];
                    }
                }
                spec.steps.push_back(std::move(s));
            }
            out.push_back(validated(std::move(spec)));
        }
        return out;
    }

    // grid mode: cross-product over choice params, in sorted (step, name) order
    std::vector<std::pair<std::pair<std::size_t, std::string>, const ChoiceParam*>> axes;
    for (std::size_t i = 0; i < space.steps.size(); ++i) {
        for (const auto& [name, param] : space.steps[i].searchable) {
            if (std::holds_alternative<ContinuousParam>(param))
                throw Error(ErrorCode::EmptySpace,
                            "grid mode needs explicit choice lists, param '" + name +
                                "' is continuous");
            axes.push_back({{i, name}, &std::get<ChoiceParam>(param)});
        }
    }
    std::vector<std::size_t> cursor(axes.size(), 0);
    for (;;) {
        PipelineSpec spec;
        for (std::size_t i = 0; i < space.steps.size(); ++i) {
            PipelineStep s;
            s.op = space.steps[i].op;
            s.params = space.steps[i].fixed;
            spec.steps.push_back(std::move(s));
        }
        for (std::size_t a = 0; a < axes.size(); ++a)
            spec.steps[axes[a].first.first].params[axes[a].first.second] =
                axes[a].second->values[cursor[a]];
        out.push_back(validated(std::move(spec)));

        std::size_t a = 0;
        while (a < axes.size() && ++cursor[a] == axes[a].second->values.size()) {
            cursor[a] = 0;
            ++a;
        }
        if (a == axes.size())
            break;
    }
    return out;
}

TuneReport run_search(const SearchSpace& space, const DatasetIndex& index,
                      const TuneConfig& config) {
    std::vector<PipelineSpec> pipelines =
        sample_trials(space, config.n_trials, config.seed, config.mode);

    DatasetIndex subset = select_subset(index, config.subset_fraction, config.seed);

    TuneReport report;
    report.subset_size = subset.records.size();
    report.subset_divergence =
        config.subset_fraction < 1.0 ? prepbench::subset_divergence(index, subset) : 0.0;

    // features cached by pipeline content hash within this run
    std::unordered_map<std::uint64_t, LabeledFeatures> cache;

    for (std::size_t i = 0; i < pipelines.size(); ++i) {
        Trial trial;
        trial.trial_id = static_cast<int>(i);
        trial.pipeline = pipelines[i];
        trial.seed = config.seed;
        try {
            std::uint64_t h = pipeline_hash(trial.pipeline);
            auto it = cache.find(h);
            if (it == cache.end())
                it = cache.emplace(h, extract_features(subset, trial.pipeline, config.features,
                                                       config.seed))
                         .first;
            FeatureMatrix x = it->second.x;
            if (config.features.norm) {
                NormModel model = fit_norm(*config.features.norm, x, config.features.norm_epsilon);
                x = apply_norm(model, x);
            }
            TrainResult trained =
                svm_train(x, it->second.labels, config.lambda, config.epochs, config.seed);
            trial.objective = trained.log.empty() ? 0.0 : trained.log.back().val_accuracy;
            trial.wall_ms = trained.log.empty() ? 0.0 : trained.log.back().cumulative_wall_ms;
        } catch (const std::exception& e) {
            trial.failed = true;
            trial.error = e.what();
        }
        report.trials.push_back(std::move(trial));
    }

    // best = max objective; ties -> fewer steps, lower wall_ms, lower trial_id
    const Trial* best = nullptr;
    for (const auto& t : report.trials) {
        if (t.failed)
            continue;
        if (!best || t.objective > best->objective ||
            (t.objective == best->objective &&
             (t.pipeline.steps.size() < best->pipeline.steps.size() ||
              (t.pipeline.steps.size() == best->pipeline.steps.size() &&
               t.wall_ms < best->wall_ms))))
            best = &t;
    }
    if (best)
        report.best_trial_id = best->trial_id;
    return report;
}

std::string tune_report_to_json(const TuneReport& report, const std::string& config_echo) {
    nlohmann::ordered_json doc;
    if (!config_echo.empty())
        doc["config"] = nlohmann::ordered_json::parse(config_echo);
    doc["subset_size"] = report.subset_size;
    doc["subset_divergence"] = report.subset_divergence;
    doc["best_trial_id"] = report.best_trial_id
                               ? nlohmann::ordered_json(*report.best_trial_id)
                               : nlohmann::ordered_json(nullptr);
    doc["trials"] = nlohmann::ordered_json::array();
    for (const auto& t : report.trials) {
        nlohmann::ordered_json row;
        row["trial_id"] = t.trial_id;
        row["pipeline"] = nlohmann::ordered_json::parse(serialize_pipeline(t.pipeline));
        row["seed"] = t.seed;
        if (t.failed) {
            row["failed"] = true;
            row["error"] = t.error;
        } else {
            row["objective"] = t.objective;
            row["wall_ms"] = t.wall_ms;
        }
        doc["trials"].push_back(std::move(row));
    }
    return doc.dump(2);
}

} // namespace prepbench
