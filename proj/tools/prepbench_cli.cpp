// prepbench: batch preprocessing, dataset statistics, quality metrics, and
// SVM convergence benchmarking over VOC-style corpora.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "prepbench/autotune.hpp"
#include "prepbench/bench.hpp"
#include "prepbench/pipeline.hpp"
#include "prepbench/quality.hpp"
#include "prepbench/vocdata.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace prepbench;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::UnreadableImage, "cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::UnreadableImage, "cannot write " + path);
    out << text;
}

std::vector<fs::path> list_images(const std::string& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        auto ext = entry.path().extension();
        if (ext == ".pgm" || ext == ".ppm")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

void for_each_parallel(std::size_t count, const std::function<void(std::size_t)>& work) {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, count));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    work(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

FeatureSpec parse_feature_spec(const ordered_json& doc) {
    FeatureSpec spec;
    if (!doc.is_object())
        return spec;
    spec.resize_dim = doc.value("resize_dim", 32);
    spec.to_gray = doc.value("to_gray", true);
    if (doc.contains("norm") && !doc["norm"].is_null()) {
        std::string kind = doc["norm"].get<std::string>();
        if (kind == "mean")
            spec.norm = NormKind::Mean;
        else if (kind == "standardize")
            spec.norm = NormKind::Standardize;
        else if (kind == "zca")
            spec.norm = NormKind::Zca;
        else
            throw Error(ErrorCode::BadParam, "unknown norm kind '" + kind + "'");
    }
    spec.norm_epsilon = doc.value("epsilon", 1e-2);
    return spec;
}

ordered_json require_field(const ordered_json& doc, const std::string& name) {
    if (!doc.contains(name))
        throw Error(ErrorCode::BadParam, "config lacks required field '" + name + "'");
    return doc[name];
}

int cmd_analyze(const std::string& annotations, const std::string& images,
                const std::string& out_path) {
    std::vector<ScanIssue> issues;
    DatasetIndex index = scan_dataset(annotations, images, &issues);
    for (const auto& issue : issues)
        std::cerr << "warning: " << issue.path << ": " << issue.message << "\n";
    DatasetStats stats = compute_stats(index);

    ordered_json doc;
    doc["config"] = {{"annotations", annotations}, {"images", images}};
    doc["records"] = index.records.size();
    doc["classes"] = index.class_set;
    doc["resolution_hist"] = ordered_json::array();
    for (const auto& [res, count] : stats.resolution_hist)
        doc["resolution_hist"].push_back(
            {{"width", res.first}, {"height", res.second}, {"count", count}});
    doc["class_counts"] = ordered_json::object();
    for (const auto& [name, count] : stats.class_counts)
        doc["class_counts"][name] = count;
    doc["luminance_hist"] = stats.luminance_hist;
    doc["objects_per_image"] = {{"mean", stats.objects_per_image_mean},
                                {"max", stats.objects_per_image_max}};
    spit(out_path, doc.dump(2) + "\n");

    // plain-text bars alongside the JSON
    std::size_t peak = 1;
    for (auto c : stats.luminance_hist)
        peak = std::max(peak, c);
    std::cout << "mean-luminance histogram (16 bins):\n";
    for (int b = 0; b < 16; ++b) {
        std::size_t c = stats.luminance_hist[b];
        std::cout << "  [" << b * 16 << "-" << b * 16 + 15 << "]\t" << c << "\t"
                  << std::string(c * 40 / peak, '#') << "\n";
    }
    std::cout << "classes:\n";
    for (const auto& [name, count] : stats.class_counts)
        std::cout << "  " << name << "\t" << count << "\n";
    return issues.empty() ? kExitOk : kExitData;
}

int cmd_apply(const std::string& pipeline_path, const std::string& in_dir,
              const std::string& out_dir, std::uint64_t seed) {
    PipelineSpec spec = parse_pipeline(slurp(pipeline_path));
    fs::create_directories(out_dir);
    std::vector<fs::path> files = list_images(in_dir);
    for_each_parallel(files.size(), [&](std::size_t i) {
        ImageBuffer img = read_image_file(files[i].string());
        ImageBuffer result = apply_pipeline(spec, img, seed ^ i);
        write_image_file(result, (fs::path(out_dir) / files[i].filename()).string());
    });
    std::cout << "processed " << files.size() << " images\n";
    return kExitOk;
}

int cmd_quality(const std::string& ref_dir, const std::string& test_dir,
                const std::string& out_path) {
    std::vector<fs::path> refs = list_images(ref_dir);
    std::vector<std::string> rows(refs.size());
    for_each_parallel(refs.size(), [&](std::size_t i) {
        fs::path test = fs::path(test_dir) / refs[i].filename();
        if (!fs::exists(test))
            throw Error(ErrorCode::MissingImage, test.string());
        ImageBuffer a = read_image_file(refs[i].string());
        ImageBuffer b = read_image_file(test.string());
        if (a.channels == 3)
            a = rgb_to_gray(a);
        if (b.channels == 3)
            b = rgb_to_gray(b);
        rows[i] = quality_csv_row(quality_report(refs[i].filename().string(), a, b));
    });
    std::string csv = quality_csv_header() + "\n";
    for (const auto& r : rows)
        csv += r + "\n";
    spit(out_path, csv);
    return kExitOk;
}

std::vector<NamedPipeline> parse_named_pipelines(const ordered_json& arr) {
    if (!arr.is_array() || arr.empty())
        throw Error(ErrorCode::BadParam, "'pipelines' must be a non-empty array");
    std::vector<NamedPipeline> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& item = arr[i];
        NamedPipeline np;
        if (item.is_array()) {
            np.id = "pipeline_" + std::to_string(i);
            np.spec = parse_pipeline(item.dump());
        } else {
            np.id = item.value("id", "pipeline_" + std::to_string(i));
            np.spec = parse_pipeline(require_field(item, "steps").dump());
        }
        out.push_back(std::move(np));
    }
    return out;
}

int cmd_bench(const std::string& config_path, const std::string& out_path) {
    ordered_json config;
    try {
        config = ordered_json::parse(slurp(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedJson, e.what());
    }
    std::string annotations = require_field(config, "annotations").get<std::string>();
    std::string images = require_field(config, "images").get<std::string>();
    auto pipelines = parse_named_pipelines(require_field(config, "pipelines"));
    FeatureSpec features =
        parse_feature_spec(config.contains("features") ? config["features"] : ordered_json());
    double lambda = require_field(config, "lambda").get<double>();
    int epochs = require_field(config, "epochs").get<int>();
    // no default: the convergence threshold is an explicit experimental choice
    double threshold = require_field(config, "threshold").get<double>();
    std::uint64_t seed = require_field(config, "seed").get<std::uint64_t>();

    DatasetIndex index = scan_dataset(annotations, images);
    BenchReport report =
        run_benchmark(index, pipelines, features, lambda, epochs, threshold, seed);
    spit(out_path, bench_report_to_json(report, config.dump()) + "\n");
    return kExitOk;
}

SearchSpace parse_search_space(const ordered_json& arr) {
    if (!arr.is_array())
        throw Error(ErrorCode::BadParam, "'search_space' must be an array of steps");
    SearchSpace space;
    for (const auto& item : arr) {
        SearchStep step;
        step.op = require_field(item, "op").get<std::string>();
        if (item.contains("params")) {
            for (const auto& [name, value] : item["params"].items()) {
                if (value.is_number_integer())
                    step.fixed[name] = value.get<std::int64_t>();
                else if (value.is_number())
                    step.fixed[name] = value.get<double>();
                else
                    step.fixed[name] = value.get<std::string>();
            }
        }
        if (item.contains("search")) {
            for (const auto& [name, sp] : item["search"].items()) {
                std::string type = require_field(sp, "type").get<std::string>();
                if (type == "continuous") {
                    step.searchable[name] = ContinuousParam{
                        require_field(sp, "lo").get<double>(),
                        require_field(sp, "hi").get<double>()};
                } else if (type == "choice") {
                    ChoiceParam choice;
                    for (const auto& v : require_field(sp, "values")) {
                        if (v.is_number_integer())
                            choice.values.push_back(v.get<std::int64_t>());
                        else if (v.is_number())
                            choice.values.push_back(v.get<double>());
                        else
                            choice.values.push_back(v.get<std::string>());
                    }
                    step.searchable[name] = std::move(choice);
                } else {
                    throw Error(ErrorCode::BadParam, "search type must be continuous|choice");
                }
            }
        }
        space.steps.push_back(std::move(step));
    }
    return space;
}

int cmd_tune(const std::string& config_path, const std::string& out_path) {
    ordered_json config;
    try {
        config = ordered_json::parse(slurp(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedJson, e.what());
    }
    std::string annotations = require_field(config, "annotations").get<std::string>();
    std::string images = require_field(config, "images").get<std::string>();
    SearchSpace space = parse_search_space(require_field(config, "search_space"));

    TuneConfig tc;
    tc.subset_fraction = config.value("subset_fraction", 1.0);
    tc.n_trials = config.value("n_trials", 1);
    tc.epochs = require_field(config, "epochs").get<int>();
    tc.lambda = require_field(config, "lambda").get<double>();
    tc.seed = require_field(config, "seed").get<std::uint64_t>();
    tc.mode = config.value("mode", std::string("random")) == "grid" ? SearchMode::Grid
                                                                    : SearchMode::Random;
    tc.features =
        parse_feature_spec(config.contains("features") ? config["features"] : ordered_json());

    DatasetIndex index = scan_dataset(annotations, images);
    TuneReport report = run_search(space, index, tc);
    spit(out_path, tune_report_to_json(report, config.dump()) + "\n");
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"image preprocessing pipelines, dataset statistics, and SVM "
                 "convergence benchmarks"};
    app.require_subcommand(1);

    std::string annotations, images, out_path, pipeline_path, in_dir, out_dir;
    std::string ref_dir, test_dir, config_path;
    std::uint64_t seed = 0;

    auto* analyze = app.add_subcommand("analyze", "dataset statistics");
    analyze->add_option("--annotations", annotations)->required();
    analyze->add_option("--images", images)->required();
    analyze->add_option("--out", out_path)->required();

    auto* apply = app.add_subcommand("apply", "batch-apply a pipeline");
    apply->add_option("--pipeline", pipeline_path)->required();
    apply->add_option("--in", in_dir)->required();
    apply->add_option("--out", out_dir)->required();
    apply->add_option("--seed", seed);

    auto* quality = app.add_subcommand("quality", "quality metrics ref vs test");
    quality->add_option("--ref", ref_dir)->required();
    quality->add_option("--test", test_dir)->required();
    quality->add_option("--out", out_path)->required();

    auto* bench = app.add_subcommand("bench", "pipeline convergence benchmark");
    bench->add_option("--config", config_path)->required();
    bench->add_option("--out", out_path)->required();

    auto* tune = app.add_subcommand("tune", "preprocessing parameter search");
    tune->add_option("--config", config_path)->required();
    tune->add_option("--out", out_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (analyze->parsed())
            return cmd_analyze(annotations, images, out_path);
        if (apply->parsed())
            return cmd_apply(pipeline_path, in_dir, out_dir, seed);
        if (quality->parsed())
            return cmd_quality(ref_dir, test_dir, out_path);
        if (bench->parsed())
            return cmd_bench(config_path, out_path);
        if (tune->parsed())
            return cmd_tune(config_path, out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
