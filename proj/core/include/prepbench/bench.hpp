#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prepbench/normalize.hpp"
#include "prepbench/pipeline.hpp"
#include "prepbench/vocdata.hpp"

namespace prepbench {

/// The fixed interface between preprocessing and the classifier.
struct FeatureSpec {
    int resize_dim = 32;
    bool to_gray = true;
    std::optional<NormKind> norm;
    double norm_epsilon = 1e-2;
};

struct SvmModel {
    std::vector<std::string> classes; // sorted
    std::vector<std::vector<double>> weights; // per class, d each
    std::vector<double> bias;                 // per class
    double lambda = 0.0;
    int epochs_trained = 0;
    std::uint64_t seed = 0;
};

struct TrainLogRow {
    int epoch = 0;
    double train_hinge_loss = 0.0;
    double val_accuracy = 0.0;
    double cumulative_wall_ms = 0.0;
};

using TrainLog = std::vector<TrainLogRow>;

struct NamedPipeline {
    std::string id;
    PipelineSpec spec;
};

struct PipelineRun {
    std::string id;
    PipelineSpec spec;
    TrainLog log;
    std::optional<int> epochs_to_threshold;
    std::optional<double> wall_ms_to_threshold;
    double final_accuracy = 0.0;
};

struct BenchReport {
    std::vector<PipelineRun> runs;
    double threshold = 0.0;
    double lambda = 0.0;
    int epochs = 0;
    std::uint64_t seed = 0;
};

struct LabeledFeatures {
    FeatureMatrix x;
    std::vector<std::string> labels;
};

/// Pipeline -> optional grayscale -> resize -> scale to [0,1] -> flatten.
/// Image i in the batch uses noise seed = seed ^ i.
LabeledFeatures extract_features(const DatasetIndex& index, const PipelineSpec& pipeline,
                                 const FeatureSpec& spec, std::uint64_t seed = 0);

struct TrainResult {
    SvmModel model;
    TrainLog log;
};

/// One-vs-rest Pegasos: step 1/(lambda*t), unregularized bias, seeded shuffles.
/// Validation split = last 20% of a seeded shuffle of the sample order.
TrainResult svm_train(const FeatureMatrix& x, const std::vector<std::string>& labels,
                      double lambda, int epochs, std::uint64_t seed);

std::vector<std::string> svm_predict(const SvmModel& model, const FeatureMatrix& x);

/// Per-example hinge objective and analytic subgradient for one binary
/// classifier; used by the finite-difference check.
double hinge_objective(const std::vector<double>& w, double b, const double* x,
                       std::size_t d, int y, double lambda);
void hinge_gradient(const std::vector<double>& w, double b, const double* x, std::size_t d,
                    int y, double lambda, std::vector<double>& grad_w, double& grad_b);

BenchReport run_benchmark(const DatasetIndex& index, const std::vector<NamedPipeline>& pipelines,
                          const FeatureSpec& spec, double lambda, int epochs, double threshold,
                          std::uint64_t seed);

std::string bench_report_to_json(const BenchReport& report, const std::string& config_echo);

} // namespace prepbench
