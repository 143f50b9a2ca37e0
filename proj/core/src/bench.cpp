#include "prepbench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "prepbench/image.hpp"
#include "prepbench/rng.hpp"

namespace prepbench {

namespace {

std::vector<std::size_t> seeded_shuffle(std::size_t n, CounterRng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);
    return order;
}

} // namespace

LabeledFeatures extract_features(const DatasetIndex& index, const PipelineSpec& pipeline,
                                 const FeatureSpec& spec, std::uint64_t seed) {
    if (spec.resize_dim < 4)
        throw Error(ErrorCode::BadParam, "resize_dim must be >= 4");
    LabeledFeatures out;
    std::size_t n = index.records.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = index.records[i];
        ImageBuffer img;
        try {
            img = read_image_file(rec.image_path);
            img = apply_pipeline(pipeline, img, seed ^ i);
            if (spec.to_gray && img.channels == 3)
                img = rgb_to_gray(img);
            img = resize_bilinear(img, spec.resize_dim, spec.resize_dim);
        } catch (const Error& e) {
            throw Error(e.code(), rec.image_path + ": " + e.what());
        }
        if (out.x.d == 0) {
            out.x = make_matrix(n, img.pixels.size());
        } else if (img.pixels.size() != out.x.d) {
            throw Error(ErrorCode::DimensionMismatch,
                        rec.image_path + ": inconsistent feature width");
        }
        for (std::size_t j = 0; j < img.pixels.size(); ++j)
            out.x.at(i, j) = img.pixels[j] / 255.0;
        out.labels.push_back(rec.annotation.dominant_class());
    }
    return out;
}

TrainResult svm_train(const FeatureMatrix& x, const std::vector<std::string>& labels,
                      double lambda, int epochs, std::uint64_t seed) {
    if (lambda <= 0)
        throw Error(ErrorCode::NonPositiveLambda, "lambda must be > 0");
    if (x.n < 2 || labels.size() != x.n)
        throw Error(ErrorCode::TooFewSamples, "need n >= 2 labeled samples");

    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() < 2)
        throw Error(ErrorCode::SingleClass, "need at least two classes");

    TrainResult result;
    SvmModel& model = result.model;
    model.classes.assign(unique.begin(), unique.end());
    model.lambda = lambda;
    model.seed = seed;
    std::size_t n_classes = model.classes.size();
    model.weights.assign(n_classes, std::vector<double>(x.d, 0.0));
    model.bias.assign(n_classes, 0.0);

    std::vector<int> label_idx(x.n);
    for (std::size_t i = 0; i < x.n; ++i)
        label_idx[i] = static_cast<int>(
            std::lower_bound(model.classes.begin(), model.classes.end(), labels[i]) -
            model.classes.begin());

    // split stream is separate from the epoch-shuffle stream so the split is
    // a pure function of (seed, n)
    CounterRng split_rng(seed ^ 0x5C471D00ULL);
    std::vector<std::size_t> split_order = seeded_shuffle(x.n, split_rng);
    std::size_t n_val = x.n / 5;
    std::vector<std::size_t> train_ids(split_order.begin(), split_order.end() - n_val);
    std::vector<std::size_t> val_ids(split_order.end() - n_val, split_order.end());

    auto score = [&](std::size_t sample, std::size_t cls) {
        const double* row = &x.values[sample * x.d];
        const auto& w = model.weights[cls];
        double s = model.bias[cls];
        for (std::size_t j = 0; j < x.d; ++j)
            s += w[j] * row[j];
        return s;
    };
    auto accuracy_on = [&](const std::vector<std::size_t>& ids) {
        if (ids.empty())
            return 0.0;
        std::size_t hits = 0;
        for (std::size_t id : ids) {
            std::size_t best = 0;
            double best_s = score(id, 0);
            for (std::size_t c = 1; c < n_classes; ++c) {
                double s = score(id, c);
                if (s > best_s) { // ties keep the lexicographically smaller class
                    best_s = s;
                    best = c;
                }
            }
            hits += (static_cast<int>(best) == label_idx[id]);
        }
        return static_cast<double>(hits) / static_cast<double>(ids.size());
    };

    CounterRng epoch_rng(seed);
    std::uint64_t t = 0;
    double wall_ms = 0.0;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        auto start = std::chrono::steady_clock::now();
        std::vector<std::size_t> order = train_ids;
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[epoch_rng.next_below(i)]);

        for (std::size_t id : order) {
            ++t;
            double eta = 1.0 / (lambda * static_cast<double>(t));
            const double* row = &x.values[id * x.d];
            for (std::size_t c = 0; c < n_classes; ++c) {
                int y = (static_cast<int>(c) == label_idx[id]) ? 1 : -1;
                auto& w = model.weights[c];
                double margin = y * score(id, c);
                double shrink = 1.0 - eta * lambda;
                for (std::size_t j = 0; j < x.d; ++j)
                    w[j] *= shrink;
                if (margin < 1.0) {
                    double step = eta * y;
                    for (std::size_t j = 0; j < x.d; ++j)
                        w[j] += step * row[j];
                    model.bias[c] += step; // bias unregularized
                }
            }
        }
        auto stop = std::chrono::steady_clock::now();
        wall_ms += std::chrono::duration<double, std::milli>(stop - start).count();

        double hinge = 0.0;
        for (std::size_t id : train_ids)
            for (std::size_t c = 0; c < n_classes; ++c) {
                int y = (static_cast<int>(c) == label_idx[id]) ? 1 : -1;
                hinge += std::max(0.0, 1.0 - y * score(id, c));
            }
        hinge /= static_cast<double>(train_ids.size() * n_classes);

        double val_acc = val_ids.empty() ? accuracy_on(train_ids) : accuracy_on(val_ids);
        result.log.push_back({epoch, hinge, val_acc, wall_ms});
    }
    model.epochs_trained = epochs;
    return result;
}

std::vector<std::string> svm_predict(const SvmModel& model, const FeatureMatrix& x) {
    if (model.weights.empty() || model.weights[0].size() != x.d)
        throw Error(ErrorCode::DimensionMismatch, "model/feature dimension mismatch");
    std::vector<std::string> out;
    out.reserve(x.n);
    for (std::size_t i = 0; i < x.n; ++i) {
        const double* row = &x.values[i * x.d];
        std::size_t best = 0;
        double best_s = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < model.classes.size(); ++c) {
            double s = model.bias[c];
            for (std::size_t j = 0; j < x.d; ++j)
                s += model.weights[c][j] * row[j];
            if (c == 0 || s > best_s) {
                best_s = s;
                best = c;
            }
        }
        out.push_back(model.classes[best]);
    }
    return out;
}

double hinge_objective(const std::vector<double>& w, double b, const double* x, std::size_t d,
                       int y, double lambda) {
    double s = b;
    double norm2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        s += w[j] * x[j];
        norm2 += w[j] * w[j];
    }
    return 0.5 * lambda * norm2 + std::max(0.0, 1.0 - y * s);
}

void hinge_gradient(const std::vector<double>& w, double b, const double* x, std::size_t d,
                    int y, double lambda, std::vector<double>& grad_w, double& grad_b) {
    double s = b;
    for (std::size_t j = 0; j < d; ++j)
        s += w[j] * x[j];
    bool active = y * s < 1.0;
    grad_w.resize(d);
    for (std::size_t j = 0; j < d; ++j)
        grad_w[j] = lambda * w[j] - (active ? y * x[j] : 0.0);
    grad_b = active ? -static_cast<double>(y) : 0.0;
}

BenchReport run_benchmark(const DatasetIndex& index, const std::vector<NamedPipeline>& pipelines,
                          const FeatureSpec& spec, double lambda, int epochs, double threshold,
                          std::uint64_t seed) {
    if (pipelines.empty())
        throw Error(ErrorCode::BadParam, "need at least one pipeline");
    BenchReport report;
    report.threshold = threshold;
    report.lambda = lambda;
    report.epochs = epochs;
    report.seed = seed;

    for (const auto& named : pipelines) {
        LabeledFeatures feats = extract_features(index, named.spec, spec, seed);
        FeatureMatrix x = std::move(feats.x);
        if (spec.norm) {
            NormModel model = fit_norm(*spec.norm, x, spec.norm_epsilon);
            x = apply_norm(model, x);
        }
        TrainResult trained = svm_train(x, feats.labels, lambda, epochs, seed);

        PipelineRun run;
        run.id = named.id;
        run.spec = named.spec;
        run.log = std::move(trained.log);
        for (const auto& row : run.log) {
            if (!run.epochs_to_threshold && row.val_accuracy >= threshold) {
                run.epochs_to_threshold = row.epoch;
                run.wall_ms_to_threshold = row.cumulative_wall_ms;
            }
        }
        run.final_accuracy = run.log.empty() ? 0.0 : run.log.back().val_accuracy;
        report.runs.push_back(std::move(run));
    }
    return report;
}

std::string bench_report_to_json(const BenchReport& report, const std::string& config_echo) {
    nlohmann::ordered_json doc;
    doc["threshold"] = report.threshold;
    doc["lambda"] = report.lambda;
    doc["epochs"] = report.epochs;
    doc["seed"] = report.seed;
    if (!config_echo.empty())
        doc["config"] = nlohmann::ordered_json::parse(config_echo);
    doc["pipelines"] = nlohmann::ordered_json::array();
    for (const auto& run : report.runs) {
        nlohmann::ordered_json r;
        r["id"] = run.id;
        r["pipeline"] = nlohmann::ordered_json::parse(serialize_pipeline(run.spec));
        r["final_accuracy"] = run.final_accuracy;
        r["epochs_to_threshold"] =
            run.epochs_to_threshold ? nlohmann::ordered_json(*run.epochs_to_threshold)
                                    : nlohmann::ordered_json(nullptr);
        r["wall_ms_to_threshold"] =
            run.wall_ms_to_threshold ? nlohmann::ordered_json(*run.wall_ms_to_threshold)
                                     : nlohmann::ordered_json(nullptr);
        r["log"] = nlohmann::ordered_json::array();
        for (const auto& row : run.log) {
            r["log"].push_back({{"epoch", row.epoch},
                                {"train_hinge_loss", row.train_hinge_loss},
                                {"val_accuracy", row.val_accuracy},
                                {"cumulative_wall_ms", row.cumulative_wall_ms}});
        }
        doc["pipelines"].push_back(std::move(r));
    }
    return doc.dump(2);
}

} // namespace prepbench
