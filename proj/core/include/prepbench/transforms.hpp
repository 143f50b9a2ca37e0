#pragma once

#include <array>
#include <cstdint>

#include "prepbench/image.hpp"

namespace prepbench {

/// 256-bin intensity histogram of a grayscale image.
struct Histogram {
    std::array<std::uint64_t, 256> counts{};
    std::uint64_t total = 0;
};

/// Gray-level lookup table; the result of every point operation.
struct IntensityMap {
    std::array<std::uint8_t, 256> lut{};
};

/// Intermediate quantities of the median-mean sub-image clipped equalization.
struct MmsicheDecomposition {
    int median_xm = 0;
    std::uint64_t plateau_tc = 0;
    int lower_mean_xml = 0;
    int upper_mean_xmu = 0;
    Histogram clipped_hist;
    // Four disjoint [lo, hi] intervals covering [0,255]; hi < lo marks an empty interval.
    std::array<std::pair<int, int>, 4> sub_ranges{};
};

enum class SliceMode { Preserve, Binary };

ImageBuffer apply_lut(const ImageBuffer& img, const IntensityMap& map);

ImageBuffer negative(const ImageBuffer& img);
ImageBuffer threshold(const ImageBuffer& img, int t);
ImageBuffer log_transform(const ImageBuffer& img, double c);
ImageBuffer log_transform(const ImageBuffer& img); // default gain 255/ln(256)
ImageBuffer gamma_transform(const ImageBuffer& img, double gamma, double c = 1.0);
ImageBuffer piecewise_stretch(const ImageBuffer& img, int r1, int s1, int r2, int s2);
ImageBuffer gray_level_slice(const ImageBuffer& img, int a, int b, SliceMode mode);

Histogram compute_histogram(const ImageBuffer& img);

struct EqualizeResult {
    ImageBuffer image;
    IntensityMap map;
};

EqualizeResult equalize(const ImageBuffer& img);
IntensityMap equalize_map(const Histogram& hist);

ImageBuffer match_histogram(const ImageBuffer& img, const Histogram& reference);
IntensityMap match_histogram_map(const Histogram& source, const Histogram& reference);

ImageBuffer local_equalize(const ImageBuffer& img, int window);

struct MmsicheResult {
    ImageBuffer image;
    IntensityMap map;
    MmsicheDecomposition decomposition;
};

MmsicheResult mmsiche(const ImageBuffer& img);

double default_log_gain();

} // namespace prepbench
