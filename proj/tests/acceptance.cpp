// Acceptance suite: one test case per release criterion, each printing an
// explicit PASS/FAIL verdict line so the run log reads as a checklist.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>

#include <doctest.h>
#include <json.hpp>

#include "prepbench/autotune.hpp"
#include "prepbench/bench.hpp"
#include "prepbench/filters.hpp"
#include "prepbench/normalize.hpp"
#include "prepbench/quality.hpp"
#include "prepbench/transforms.hpp"
#include "prepbench/vocdata.hpp"
#include "support/helpers.hpp"
#include "support/synthetic.hpp"

using namespace prepbench;
using Clock = std::chrono::steady_clock;

namespace {

const Clock::time_point g_suite_start = Clock::now();

double elapsed_s(Clock::time_point since) {
    return std::chrono::duration<double>(Clock::now() - since).count();
}

void verdict(int n, const char* label, bool ok) {
    std::printf("[acceptance] criterion %d (%s): %s\n", n, label, ok ? "PASS" : "FAIL");
    std::fflush(stdout);
    CHECK_MESSAGE(ok, "criterion ", n, " (", label, ")");
}

nlohmann::ordered_json load_json_without_wall_times(const std::string& path) {
    auto doc = nlohmann::ordered_json::parse(testsupport::slurp(path));
    std::function<void(nlohmann::ordered_json&)> scrub = [&](nlohmann::ordered_json& node) {
        if (node.is_object()) {
            for (auto& [key, value] : node.items()) {
                if (key == "cumulative_wall_ms" || key == "wall_ms_to_threshold" ||
                    key == "wall_ms")
                    value = nullptr;
                else
                    scrub(value);
            }
        } else if (node.is_array()) {
            for (auto& value : node)
                scrub(value);
        }
    };
    scrub(doc);
    return doc;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(PREPBENCH_CLI_PATH) + " " + args;
    return std::system(cmd.c_str());
}

} // namespace

TEST_CASE("criterion 1: equalization-family LUT monotonicity") {
    auto start = Clock::now();
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto img = testsupport::random_gray(64, 64, 1000 + seed);
        auto ref = testsupport::random_gray(64, 64, 2000 + seed);
        IntensityMap maps[3] = {
            equalize(img).map, mmsiche(img).map,
            match_histogram_map(compute_histogram(img), compute_histogram(ref))};
        for (const auto& map : maps)
            for (int r = 1; r < 256; ++r)
                ok = ok && map.lut[r] >= map.lut[r - 1];
    }
    auto strip = testsupport::gradient_strip();
    auto [strip_out, strip_map] = equalize(strip);
    for (int r = 0; r < 256; ++r)
        ok = ok && strip_map.lut[r] == r;
    ok = ok && strip_out == strip;
    double secs = elapsed_s(start);
    std::printf("[acceptance]   lut sweep took %.2f s (budget 5)\n", secs);
    ok = ok && secs < 5.0;
    verdict(1, "transform LUT suite", ok);
}

TEST_CASE("criterion 2: mmsiche brightness preservation") {
    auto corpus = testsupport::load_corpus();
    int mmsiche_wins = 0;
    bool oracle_ok = true;
    for (const auto& img : corpus) {
        auto mm = mmsiche(img);
        auto eq = equalize(img);
        double ambe_mm = ambe(img, mm.image);
        double ambe_eq = ambe(img, eq.image);
        if (ambe_mm < ambe_eq)
            ++mmsiche_wins;

        // independent straight-from-prose oracle
        auto lut = testsupport::mmsiche_oracle_lut(img);
        ImageBuffer oracle_img = img;
        for (auto& p : oracle_img.pixels)
            p = static_cast<std::uint8_t>(lut[p]);
        oracle_ok = oracle_ok && std::abs(ambe_mm - ambe(img, oracle_img)) < 1e-9;
    }
    std::printf("[acceptance]   mmsiche beats equalize on AMBE for %d/10 images\n",
                mmsiche_wins);
    verdict(2, "mmsiche brightness preservation", mmsiche_wins >= 8 && oracle_ok);
}

TEST_CASE("criterion 3: mmsiche entropy retention") {
    auto corpus = testsupport::load_corpus();
    int ge_equalize = 0, near_original = 0;
    for (const auto& img : corpus) {
        double h0 = entropy(img);
        double h_mm = entropy(mmsiche(img).image);
        double h_eq = entropy(equalize(img).image);
        if (h_mm >= h_eq)
            ++ge_equalize;
        if (std::abs(h_mm - h0) <= 0.3)
            ++near_original;
    }
    std::printf("[acceptance]   entropy(mmsiche) >= entropy(equalize): %d/10; "
                "within 0.3 bits of original: %d/10\n",
                ge_equalize, near_original);
    verdict(3, "mmsiche entropy", ge_equalize >= 7 && near_original >= 8);
}

TEST_CASE("criterion 4: denoising PSNR improvement") {
    auto corpus = testsupport::load_corpus();
    auto names = testsupport::corpus_files();
    int wiener_wins = 0, median_wins = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto& clean = corpus[i];

        auto gauss_noisy = add_gaussian(clean, 15.0, 1);
        double before_g = psnr(clean, gauss_noisy);
        double after_g = psnr(clean, wiener_filter(gauss_noisy, 5));
        if (after_g > before_g)
            ++wiener_wins;

        auto imp_noisy = add_impulse(clean, 0.05, 1);
        double before_i = psnr(clean, imp_noisy);
        double after_i = psnr(clean, median_filter(imp_noisy, 3));
        if (after_i > before_i)
            ++median_wins;

        std::printf("[acceptance]   %-14s wiener %+.2f dB, median %+.2f dB\n",
                    names[i].c_str(), after_g - before_g, after_i - before_i);
    }
    verdict(4, "denoising PSNR", wiener_wins == 10 && median_wins == 10);
}

TEST_CASE("criterion 5: zca whitening and jacobi accuracy") {
    FeatureMatrix x = make_matrix(1000, 16);
    CounterRng rng(77);
    for (auto& v : x.values)
        v = rng.next_unit();
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 1; j < x.d; ++j)
            x.at(i, j) = 0.6 * x.at(i, j - 1) + 0.4 * x.at(i, j); // induce correlation

    auto model = fit_norm(NormKind::Zca, x, 0.0);
    auto white = apply_norm(model, x);

    std::vector<double> mean(16, 0.0);
    for (std::size_t i = 0; i < white.n; ++i)
        for (std::size_t j = 0; j < 16; ++j)
            mean[j] += white.at(i, j) / static_cast<double>(white.n);
    bool cov_ok = true;
    for (std::size_t j = 0; j < 16 && cov_ok; ++j)
        for (std::size_t k = 0; k < 16; ++k) {
            double s = 0;
            for (std::size_t i = 0; i < white.n; ++i)
                s += (white.at(i, j) - mean[j]) * (white.at(i, k) - mean[k]);
            s /= static_cast<double>(white.n - 1);
            if (std::abs(s - (j == k ? 1.0 : 0.0)) >= 1e-6) {
                cov_ok = false;
                break;
            }
        }

    bool sym_ok = true;
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t k = 0; k < 16; ++k)
            sym_ok = sym_ok &&
                     std::abs(model.whitening[j * 16 + k] - model.whitening[k * 16 + j]) < 1e-9;

    // jacobi reconstruction against the covariance it diagonalized
    std::vector<double> cov(16 * 16, 0.0);
    std::vector<double> raw_mean(16, 0.0);
    for (std::size_t i = 0; i < x.n; ++i)
        for (std::size_t j = 0; j < 16; ++j)
            raw_mean[j] += x.at(i, j) / static_cast<double>(x.n);
    for (std::size_t j = 0; j < 16; ++j)
        for (std::size_t k = 0; k < 16; ++k) {
            double s = 0;
            for (std::size_t i = 0; i < x.n; ++i)
                s += (x.at(i, j) - raw_mean[j]) * (x.at(i, k) - raw_mean[k]);
            cov[j * 16 + k] = s / static_cast<double>(x.n - 1);
        }
    std::vector<double> eigvals, u;
    jacobi_eigen(cov, 16, eigvals, u);
    double norm_c = 0;
    for (double v : cov)
        norm_c = std::max(norm_c, std::abs(v));
    bool recon_ok = true;
    for (std::size_t r = 0; r < 16; ++r)
        for (std::size_t c = 0; c < 16; ++c) {
            double recon = 0;
            for (std::size_t i = 0; i < 16; ++i)
                recon += u[r * 16 + i] * eigvals[i] * u[c * 16 + i];
            recon_ok = recon_ok && std::abs(recon - cov[r * 16 + c]) < 1e-9 * norm_c;
        }

    verdict(5, "zca whitening", cov_ok && sym_ok && recon_ok);
}

TEST_CASE("criterion 6: svm convergence and gradient checks") {
    // separable blobs -> 100% training accuracy within 50 epochs
    FeatureMatrix x = make_matrix(40, 2);
    std::vector<std::string> labels;
    CounterRng rng(3);
    for (std::size_t i = 0; i < 40; ++i) {
        bool pos = i < 20;
        x.at(i, 0) = (pos ? 2.0 : -2.0) + 0.4 * (rng.next_unit() - 0.5);
        x.at(i, 1) = (pos ? 2.0 : -2.0) + 0.4 * (rng.next_unit() - 0.5);
        labels.push_back(pos ? "pos" : "neg");
    }
    auto sep = svm_train(x, labels, 0.1, 50, 1);
    auto preds = svm_predict(sep.model, x);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        hits += preds[i] == labels[i];
    bool separable_ok = hits == labels.size();

    // xor is not linearly separable: training accuracy caps at 3/4
    FeatureMatrix xr = make_matrix(4, 2);
    xr.at(0, 0) = 0;
    xr.at(0, 1) = 0;
    xr.at(1, 0) = 1;
    xr.at(1, 1) = 1;
    xr.at(2, 0) = 0;
    xr.at(2, 1) = 1;
    xr.at(3, 0) = 1;
    xr.at(3, 1) = 0;
    std::vector<std::string> xor_labels = {"a", "a", "b", "b"};
    auto xo = svm_train(xr, xor_labels, 1e-2, 200, 1);
    auto xor_preds = svm_predict(xo.model, xr);
    std::size_t xor_hits = 0;
    for (std::size_t i = 0; i < 4; ++i)
        xor_hits += xor_preds[i] == xor_labels[i];
    bool xor_ok = xor_hits <= 3;

    // gradient vs central finite differences at 100 seeded points
    bool grad_ok = true;
    CounterRng grng(11);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t d = 4;
        std::vector<double> w(d), pt(d);
        for (std::size_t j = 0; j < d; ++j) {
            w[j] = 2.0 * grng.next_unit() - 1.0;
            pt[j] = 2.0 * grng.next_unit() - 1.0;
        }
        double b = 2.0 * grng.next_unit() - 1.0;
        double lambda = 0.05 + grng.next_unit();
        int y = grng.next_below(2) == 0 ? 1 : -1;
        std::vector<double> grad_w;
        double grad_b = 0;
        hinge_gradient(w, b, pt.data(), d, y, lambda, grad_w, grad_b);
        const double h = 1e-6;
        for (std::size_t j = 0; j < d; ++j) {
            auto wp = w, wm = w;
            wp[j] += h;
            wm[j] -= h;
            double fd = (hinge_objective(wp, b, pt.data(), d, y, lambda) -
                         hinge_objective(wm, b, pt.data(), d, y, lambda)) /
                        (2 * h);
            double denom = std::max(std::abs(fd), 1.0);
            grad_ok = grad_ok && std::abs(grad_w[j] - fd) / denom < 1e-4;
        }
    }

    std::printf("[acceptance]   separable %zu/40, xor %zu/4\n", hits, xor_hits);
    verdict(6, "svm convergence", separable_ok && xor_ok && grad_ok);
}

TEST_CASE("criterion 7: voc parsing against golden dumps") {
    bool ok = true;
    for (const char* stem : {"000001", "000002", "000003"}) {
        auto ann = parse_annotation(
            testsupport::slurp(testsupport::fixture_dir() + "/voc/annotations/" + stem + ".xml"));
        ok = ok && testsupport::dump_annotation(ann) ==
                       testsupport::slurp(testsupport::fixture_dir() + "/voc/golden/" + stem +
                                          ".txt");
    }
    bool invalid_ok = false;
    try {
        parse_annotation(
            testsupport::slurp(testsupport::fixture_dir() + "/voc_bad/invalid_box.xml"));
    } catch (const Error& e) {
        invalid_ok = e.code() == ErrorCode::InvalidBox;
    }
    verdict(7, "voc golden parsing", ok && invalid_ok);
}

TEST_CASE("criterion 8: cli bench/tune determinism") {
    testsupport::TempDir dir("accept_determinism");
    testsupport::make_dark_corpus(dir.str() + "/data", 6, 13);
    std::string ann = dir.str() + "/data/annotations";
    std::string img = dir.str() + "/data/images";

    std::string bench_config = R"({
      "annotations": ")" + ann + R"(",
      "images": ")" + img + R"(",
      "pipelines": [
        {"id": "raw", "steps": []},
        {"id": "bright", "steps": [{"op": "gamma", "params": {"gamma": 0.5}}]}
      ],
      "features": {"resize_dim": 8, "to_gray": true},
      "lambda": 0.01, "epochs": 4, "threshold": 0.5, "seed": 3
    })";
    std::ofstream(dir.str() + "/bench.json") << bench_config;

    bool ok = true;
    ok = ok && run_cli("bench --config " + dir.str() + "/bench.json --out " + dir.str() +
                       "/bench1.json") == 0;
    ok = ok && run_cli("bench --config " + dir.str() + "/bench.json --out " + dir.str() +
                       "/bench2.json") == 0;
    ok = ok && load_json_without_wall_times(dir.str() + "/bench1.json") ==
                   load_json_without_wall_times(dir.str() + "/bench2.json");

    std::string tune_config = R"({
      "annotations": ")" + ann + R"(",
      "images": ")" + img + R"(",
      "search_space": [
        {"op": "gamma", "search": {"gamma": {"type": "choice", "values": [0.5, 1.0, 2.0]}}}
      ],
      "features": {"resize_dim": 8, "to_gray": true},
      "mode": "grid", "subset_fraction": 1.0, "n_trials": 3,
      "lambda": 0.01, "epochs": 4, "seed": 3
    })";
    std::ofstream(dir.str() + "/tune.json") << tune_config;

    ok = ok && run_cli("tune --config " + dir.str() + "/tune.json --out " + dir.str() +
                       "/tune1.json") == 0;
    ok = ok && run_cli("tune --config " + dir.str() + "/tune.json --out " + dir.str() +
                       "/tune2.json") == 0;
    ok = ok && load_json_without_wall_times(dir.str() + "/tune1.json") ==
                   load_json_without_wall_times(dir.str() + "/tune2.json");

    verdict(8, "bench/tune determinism", ok);
}

TEST_CASE("criterion 9: tuner recovers a brightening gamma") {
    auto start = Clock::now();
    testsupport::TempDir dir("accept_stage2");
    testsupport::make_dark_corpus(dir.str(), 12, 99);
    auto index = scan_dataset(dir.str() + "/annotations", dir.str() + "/images");

    SearchSpace space;
    SearchStep step;
    step.op = "gamma";
    step.searchable["gamma"] = ChoiceParam{{0.4, 0.5, 0.7, 1.0, 1.5, 2.2}};
    space.steps.push_back(std::move(step));

    int bright_wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        TuneConfig config;
        config.mode = SearchMode::Grid;
        config.epochs = 8;
        config.lambda = 1e-2;
        config.seed = seed;
        config.features.resize_dim = 16;
        auto report = run_search(space, index, config);
        REQUIRE(report.best_trial_id.has_value());
        const auto& best = report.trials[*report.best_trial_id];
        double gamma = std::get<double>(best.pipeline.steps[0].params.at("gamma"));
        std::printf("[acceptance]   seed %llu -> gamma %.1f (accuracy %.3f)\n",
                    static_cast<unsigned long long>(seed), gamma, best.objective);
        if (gamma < 1.0)
            ++bright_wins;
    }
    double secs = elapsed_s(start);
    std::printf("[acceptance]   stage-2 sweep took %.1f s (budget 180)\n", secs);
    verdict(9, "stage-2 parameter recovery", bright_wins >= 9 && secs < 180.0);
}

TEST_CASE("criterion 10: suite wall time") {
    double secs = elapsed_s(g_suite_start);
    std::printf("[acceptance]   acceptance binary elapsed %.1f s (budget 600)\n", secs);
    verdict(10, "wall time", secs < 600.0);
}
