#pragma once

#include <cstdint>
#include <optional>

#include "prepbench/image.hpp"

namespace prepbench {

struct NoiseSpec {
    enum class Kind { Gaussian, Impulse };
    Kind kind = Kind::Gaussian;
    double sigma = 0.0; // gaussian std-dev, intensity units
    double p = 0.0;     // impulse corruption probability
    std::uint64_t seed = 0;
};

ImageBuffer box_filter(const ImageBuffer& img, int k);
ImageBuffer median_filter(const ImageBuffer& img, int k);

/// Locally adaptive (Lee-style) Wiener filter. noise_var defaults to the
/// mean of all local variances when not given.
ImageBuffer wiener_filter(const ImageBuffer& img, int k,
                          std::optional<double> noise_var = std::nullopt);

/// Unsharp masking with gain ramped by local variance: flat areas untouched,
/// busy areas sharpened at gain_high.
ImageBuffer unsharp_adaptive(const ImageBuffer& img, int k, double gain_high,
                             double var_lo, double var_hi);

/// 2x resolution enhancement: bilinear upscale, then replace the Haar LL band
/// with the original image scaled by the LL gain, then inverse transform.
ImageBuffer dwt_upscale(const ImageBuffer& img);

ImageBuffer add_gaussian(const ImageBuffer& img, double sigma, std::uint64_t seed);
ImageBuffer add_impulse(const ImageBuffer& img, double p, std::uint64_t seed);

} // namespace prepbench
