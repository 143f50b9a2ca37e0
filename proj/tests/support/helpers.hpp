#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "prepbench/image.hpp"
#include "prepbench/rng.hpp"
#include "prepbench/transforms.hpp"
#include "prepbench/vocdata.hpp"

namespace testsupport {

inline std::string fixture_dir() {
    return PREPBENCH_FIXTURE_DIR;
}

/// 256x1 strip with every gray level once.
inline prepbench::ImageBuffer gradient_strip() {
    prepbench::ImageBuffer img = prepbench::make_image(256, 1, 1);
    for (int x = 0; x < 256; ++x)
        img.pixels[x] = static_cast<std::uint8_t>(x);
    return img;
}

inline prepbench::ImageBuffer random_gray(int w, int h, std::uint64_t seed) {
    prepbench::ImageBuffer img = prepbench::make_image(w, h, 1);
    prepbench::CounterRng rng(seed);
    for (auto& p : img.pixels)
        p = static_cast<std::uint8_t>(rng.next_below(256));
    return img;
}

inline std::vector<std::string> corpus_files() {
    return {"grad_h.pgm",  "grad_diag.pgm", "blob.pgm",    "two_blobs.pgm", "rings.pgm",
            "tex_a.pgm",   "tex_b.pgm",     "tex_c.pgm",   "tex_d.pgm",     "tex_e.pgm"};
}

inline std::vector<prepbench::ImageBuffer> load_corpus() {
    std::vector<prepbench::ImageBuffer> out;
    for (const auto& name : corpus_files())
        out.push_back(prepbench::read_image_file(fixture_dir() + "/corpus/" + name));
    return out;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::string s((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return s;
}

/// Stable text dump of an annotation, compared against golden files.
inline std::string dump_annotation(const prepbench::Annotation& ann) {
    std::string out = "filename=" + ann.filename + "\n";
    out += "size=" + std::to_string(ann.width) + "x" + std::to_string(ann.height) + "\n";
    for (const auto& o : ann.objects)
        out += "object=" + o.class_name + " difficult=" + (o.difficult ? "1" : "0") +
               " box=" + std::to_string(o.xmin) + "," + std::to_string(o.ymin) + "," +
               std::to_string(o.xmax) + "," + std::to_string(o.ymax) + "\n";
    return out;
}

/// Independent MMSICHE oracle written straight from the published procedure:
/// median of occupied-bin counts as plateau, bisect at the intensity median,
/// sub-divide at the two clipped sub-means, equalize each range into itself.
/// Returns the full 256-entry mapping.
inline std::array<int, 256> mmsiche_oracle_lut(const prepbench::ImageBuffer& img) {
    long long counts[256] = {0};
    for (auto p : img.pixels)
        ++counts[p];
    long long total = static_cast<long long>(img.pixels.size());

    int xm = 255;
    {
        long long cum = 0;
        for (int v = 0; v < 256; ++v) {
            cum += counts[v];
            if (2 * cum >= total) {
                xm = v;
                break;
            }
        }
    }

    std::vector<long long> occ;
    for (int v = 0; v < 256; ++v)
        if (counts[v] > 0)
            occ.push_back(counts[v]);
    std::sort(occ.begin(), occ.end());
    long long tc = occ.empty() ? 0 : occ[(occ.size() - 1) / 2];

    long long clipped[256];
    for (int v = 0; v < 256; ++v)
        clipped[v] = std::min(counts[v], tc);

    auto wmean = [&](int lo, int hi, int fallback) {
        double num = 0, den = 0;
        for (int v = lo; v <= hi; ++v) {
            num += static_cast<double>(clipped[v]) * v;
            den += static_cast<double>(clipped[v]);
        }
        if (den == 0)
            return fallback;
        return static_cast<int>(std::lround(num / den));
    };
    int xml = wmean(0, xm, xm);
    int xmu = xm < 255 ? wmean(xm + 1, 255, xm + 1) : 255;

    std::array<int, 256> lut;
    for (int r = 0; r < 256; ++r)
        lut[r] = r;
    int bounds[5] = {0, xml + 1, xm + 1, xmu + 1, 256};
    for (int part = 0; part < 4; ++part) {
        int a = bounds[part], b = bounds[part + 1] - 1;
        if (a > b)
            continue;
        long long sub_total = 0;
        for (int v = a; v <= b; ++v)
            sub_total += clipped[v];
        if (sub_total == 0)
            continue;
        long long cum = 0;
        for (int r = a; r <= b; ++r) {
            cum += clipped[r];
            lut[r] = a + static_cast<int>(
                             std::lround((b - a) * (static_cast<double>(cum) / sub_total)));
        }
    }
    return lut;
}

/// Writable scratch directory, unique per tag, cleaned on construction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("prepbench_test_" + tag);
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

} // namespace testsupport
