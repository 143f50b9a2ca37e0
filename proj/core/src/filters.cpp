#include "prepbench/filters.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "prepbench/rng.hpp"

namespace prepbench {

namespace {

void require_gray(const ImageBuffer& img) {
    if (img.channels != 1)
        throw Error(ErrorCode::WrongChannelCount, "filter requires a grayscale image");
}

void require_odd_kernel(int k, int min_k = 1) {
    if (k < min_k || k % 2 == 0)
        throw Error(ErrorCode::EvenKernel,
                    "kernel must be odd and >= " + std::to_string(min_k));
}

// Neighborhood mean/variance maps with replicate-clamp borders.
void local_moments(const ImageBuffer& img, int k, std::vector<double>& mean,
                   std::vector<double>& var) {
    int half = k / 2;
    double area = static_cast<double>(k) * k;
    mean.resize(img.pixels.size());
    var.resize(img.pixels.size());
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double sum = 0, sum2 = 0;
            for (int dy = -half; dy <= half; ++dy) {
                int yy = std::clamp(y + dy, 0, img.height - 1);
                for (int dx = -half; dx <= half; ++dx) {
                    int xx = std::clamp(x + dx, 0, img.width - 1);
                    double v = img.at(xx, yy);
                    sum += v;
                    sum2 += v * v;
                }
            }
            double m = sum / area;
            mean[static_cast<std::size_t>(y) * img.width + x] = m;
            var[static_cast<std::size_t>(y) * img.width + x] =
                std::max(sum2 / area - m * m, 0.0);
        }
    }
}

} // namespace

ImageBuffer box_filter(const ImageBuffer& img, int k) {
    require_gray(img);
    require_odd_kernel(k);
    std::vector<double> mean, var;
    local_moments(img, k, mean, var);
    ImageBuffer out = img;
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = clamp_u8(mean[i]);
    return out;
}

ImageBuffer median_filter(const ImageBuffer& img, int k) {
    require_gray(img);
    require_odd_kernel(k);
    int half = k / 2;
    ImageBuffer out = img;
    std::vector<std::uint8_t> window;
    window.reserve(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            window.clear();
            for (int dy = -half; dy <= half; ++dy) {
                int yy = std::clamp(y + dy, 0, img.height - 1);
                for (int dx = -half; dx <= half; ++dx) {
                    int xx = std::clamp(x + dx, 0, img.width - 1);
                    window.push_back(img.at(xx, yy));
                }
            }
            auto mid = window.begin() + window.size() / 2;
            std::nth_element(window.begin(), mid, window.end());
            out.at(x, y) = *mid;
        }
    }
    return out;
}

ImageBuffer wiener_filter(const ImageBuffer& img, int k, std::optional<double> noise_var) {
    require_gray(img);
    require_odd_kernel(k, 3);
    if (noise_var && *noise_var < 0)
        throw Error(ErrorCode::NegativeNoiseVar, "noise variance must be >= 0");
    std::vector<double> mean, var;
    local_moments(img, k, mean, var);
    double nv;
    if (noise_var) {
        nv = *noise_var;
    } else {
        double sum = 0;
        for (double v : var)
            sum += v;
        nv = var.empty() ? 0.0 : sum / var.size();
    }
    constexpr double eps = 1e-9;
    ImageBuffer out = img;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        double gain = std::max(var[i] - nv, 0.0) / std::max(var[i], eps);
        out.pixels[i] = clamp_u8(mean[i] + gain * (img.pixels[i] - mean[i]));
    }
    return out;
}

ImageBuffer unsharp_adaptive(const ImageBuffer& img, int k, double gain_high,
                             double var_lo, double var_hi) {
    require_gray(img);
    require_odd_kernel(k);
    if (var_lo < 0 || var_lo >= var_hi || gain_high < 0)
        throw Error(ErrorCode::InvalidVarianceBand, "need 0 <= var_lo < var_hi, gain_high >= 0");
    std::vector<double> mean, var;
    local_moments(img, k, mean, var);
    ImageBuffer out = img;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        double v = var[i];
        double g;
        if (v <= var_lo)
            g = 0.0;
        else if (v >= var_hi)
            g = gain_high;
        else
            g = gain_high * (v - var_lo) / (var_hi - var_lo);
        double mask = img.pixels[i] - mean[i];
        out.pixels[i] = clamp_u8(img.pixels[i] + g * mask);
    }
    return out;
}

ImageBuffer dwt_upscale(const ImageBuffer& img) {
    require_gray(img);
    if (img.width < 2 || img.height < 2 || img.width % 2 != 0 || img.height % 2 != 0)
        throw Error(ErrorCode::OddDimensions, "dwt_upscale needs even dimensions >= 2");

    int ow = img.width * 2, oh = img.height * 2;
    ImageBuffer up = resize_bilinear(img, ow, oh);

    // One-level orthonormal Haar; LL of a constant-v block is 2v.
    int sw = img.width, sh = img.height;
    std::vector<double> hl(static_cast<std::size_t>(sw) * sh);
    std::vector<double> lh(hl.size()), hh(hl.size());
    for (int j = 0; j < sh; ++j) {
        for (int i = 0; i < sw; ++i) {
            double a = up.at(2 * i, 2 * j);
            double b = up.at(2 * i + 1, 2 * j);
            double c = up.at(2 * i, 2 * j + 1);
            double d = up.at(2 * i + 1, 2 * j + 1);
            std::size_t idx = static_cast<std::size_t>(j) * sw + i;
            hl[idx] = (a - b + c - d) / 2.0;
            lh[idx] = (a + b - c - d) / 2.0;
            hh[idx] = (a - b - c + d) / 2.0;
        }
    }

    ImageBuffer out = make_image(ow, oh, 1);
    for (int j = 0; j < sh; ++j) {
        for (int i = 0; i < sw; ++i) {
            std::size_t idx = static_cast<std::size_t>(j) * sw + i;
            double ll = 2.0 * img.at(i, j); // original image carries the LL band
            double a = (ll + hl[idx] + lh[idx] + hh[idx]) / 2.0;
            double b = (ll - hl[idx] + lh[idx] - hh[idx]) / 2.0;
            double c = (ll + hl[idx] - lh[idx] - hh[idx]) / 2.0;
            double d = (ll - hl[idx] - lh[idx] + hh[idx]) / 2.0;
            out.at(2 * i, 2 * j) = clamp_u8(a);
            out.at(2 * i + 1, 2 * j) = clamp_u8(b);
            out.at(2 * i, 2 * j + 1) = clamp_u8(c);
            out.at(2 * i + 1, 2 * j + 1) = clamp_u8(d);
        }
    }
    return out;
}

ImageBuffer add_gaussian(const ImageBuffer& img, double sigma, std::uint64_t seed) {
    require_gray(img);
    if (sigma < 0)
        throw Error(ErrorCode::NonPositiveParam, "sigma must be >= 0");
    if (sigma == 0)
        return img;
    CounterRng rng(seed);
    ImageBuffer out = img;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        // Box-Muller, cosine branch only, two uniforms per pixel in raster order.
        double u1 = rng.next_unit();
        double u2 = rng.next_unit();
        double n = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        out.pixels[i] = clamp_u8(img.pixels[i] + sigma * n);
    }
    return out;
}

ImageBuffer add_impulse(const ImageBuffer& img, double p, std::uint64_t seed) {
    require_gray(img);
    if (p < 0 || p > 1)
        throw Error(ErrorCode::NonPositiveParam, "p must be in [0,1]");
    CounterRng rng(seed);
    ImageBuffer out = img;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        double u = rng.next_unit();
        double polarity = rng.next_unit(); // always drawn, keeps the stream aligned
        if (u <= p)
            out.pixels[i] = polarity <= 0.5 ? 0 : 255;
    }
    return out;
}

} // namespace prepbench
