#include "prepbench/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace prepbench {

namespace {

void require_gray(const ImageBuffer& img) {
    if (img.channels != 1)
        throw Error(ErrorCode::WrongChannelCount, "operation requires a grayscale image");
}

} // namespace

ImageBuffer apply_lut(const ImageBuffer& img, const IntensityMap& map) {
    require_gray(img);
    ImageBuffer out = img;
    for (auto& p : out.pixels)
        p = map.lut[p];
    return out;
}

ImageBuffer negative(const ImageBuffer& img) {
    IntensityMap m;
    for (int r = 0; r < 256; ++r)
        m.lut[r] = static_cast<std::uint8_t>(255 - r);
    return apply_lut(img, m);
}

ImageBuffer threshold(const ImageBuffer& img, int t) {
    if (t < 0 || t > 255)
        throw Error(ErrorCode::InvalidRange, "threshold must be in [0,255]");
    IntensityMap m;
    for (int r = 0; r < 256; ++r)
        m.lut[r] = (r >= t) ? 255 : 0;
    return apply_lut(img, m);
}

double default_log_gain() {
    return 255.0 / std::log(256.0);
}

ImageBuffer log_transform(const ImageBuffer& img, double c) {
    if (c <= 0)
        throw Error(ErrorCode::NonPositiveGain, "log gain must be positive");
    IntensityMap m;
    for (int r = 0; r < 256; ++r)
        m.lut[r] = clamp_u8(c * std::log(1.0 + r));
    return apply_lut(img, m);
}

ImageBuffer log_transform(const ImageBuffer& img) {
    return log_transform(img, default_log_gain());
}

ImageBuffer gamma_transform(const ImageBuffer& img, double gamma, double c) {
    if (gamma <= 0 || c <= 0)
        throw Error(ErrorCode::NonPositiveParam, "gamma and gain must be positive");
    IntensityMap m;
    for (int r = 0; r < 256; ++r)
        m.lut[r] = clamp_u8(255.0 * c * std::pow(r / 255.0, gamma));
    return apply_lut(img, m);
}

ImageBuffer piecewise_stretch(const ImageBuffer& img, int r1, int s1, int r2, int s2) {
    if (!(0 <= r1 && r1 <= r2 && r2 <= 255) || !(0 <= s1 && s1 <= s2 && s2 <= 255))
        throw Error(ErrorCode::InvalidControlPoints, "control points must be ordered in [0,255]");
    IntensityMap m;
    auto segment = [](int r, int ra, int sa, int rb, int sb) {
        if (rb == ra)
            return static_cast<double>(sa);
        return sa + static_cast<double>(r - ra) * (sb - sa) / (rb - ra);
    };
    for (int r = 0; r < 256; ++r) {
        double s;
        if (r < r1)
            s = segment(r, 0, 0, r1, s1);
        else if (r < r2 || (r == r2 && r1 == r2))
            s = (r1 == r2) ? s1 : segment(r, r1, s1, r2, s2);
        else if (r == r2)
            s = s2;
        else
            s = segment(r, r2, s2, 255, 255);
        m.lut[r] = clamp_u8(s);
    }
    return apply_lut(img, m);
}

ImageBuffer gray_level_slice(const ImageBuffer& img, int a, int b, SliceMode mode) {
    if (!(0 <= a && a <= b && b <= 255))
        throw Error(ErrorCode::InvalidRange, "slice range must satisfy 0 <= A <= B <= 255");
    IntensityMap m;
    for (int r = 0; r < 256; ++r) {
        if (r >= a && r <= b)
            m.lut[r] = 255;
        else
            m.lut[r] = (mode == SliceMode::Preserve) ? static_cast<std::uint8_t>(r) : 0;
    }
    return apply_lut(img, m);
}

Histogram compute_histogram(const ImageBuffer& img) {
    require_gray(img);
    Histogram h;
    for (auto p : img.pixels)
        ++h.counts[p];
    h.total = img.pixels.size();
    return h;
}

IntensityMap equalize_map(const Histogram& hist) {
    // lut = round(256*CDF) - 1, clamped; exact identity on the uniform histogram.
    IntensityMap m;
    std::uint64_t cum = 0;
    for (int r = 0; r < 256; ++r) {
        cum += hist.counts[r];
        double cdf = hist.total ? static_cast<double>(cum) / hist.total : 0.0;
        m.lut[r] = static_cast<std::uint8_t>(std::clamp(round_half_away(256.0 * cdf) - 1, 0L, 255L));
    }
    return m;
}

EqualizeResult equalize(const ImageBuffer& img) {
    IntensityMap m = equalize_map(compute_histogram(img));
    return {apply_lut(img, m), m};
}

IntensityMap match_histogram_map(const Histogram& source, const Histogram& reference) {
    if (reference.total == 0)
        throw Error(ErrorCode::EmptyReference, "reference histogram is empty");
    std::array<double, 256> cdf_src{}, cdf_ref{};
    std::uint64_t cs = 0, cr = 0;
    for (int v = 0; v < 256; ++v) {
        cs += source.counts[v];
        cr += reference.counts[v];
        cdf_src[v] = source.total ? static_cast<double>(cs) / source.total : 0.0;
        cdf_ref[v] = static_cast<double>(cr) / reference.total;
    }
    IntensityMap m;
    int z = 0;
    for (int r = 0; r < 256; ++r) {
        while (z < 255 && cdf_ref[z] < cdf_src[r])
            ++z;
        m.lut[r] = static_cast<std::uint8_t>(z);
    }
    return m;
}

ImageBuffer match_histogram(const ImageBuffer& img, const Histogram& reference) {
    return apply_lut(img, match_histogram_map(compute_histogram(img), reference));
}

ImageBuffer local_equalize(const ImageBuffer& img, int window) {
    require_gray(img);
    if (window < 1 || window % 2 == 0)
        throw Error(ErrorCode::EvenWindow, "window must be odd and >= 1");
    ImageBuffer out = img;
    int half = window / 2;
    std::size_t area = static_cast<std::size_t>(window) * window;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::uint8_t center = img.at(x, y);
            // rank of the center value in its edge-replicated neighborhood
            std::uint64_t at_or_below = 0;
            for (int dy = -half; dy <= half; ++dy) {
                int yy = std::clamp(y + dy, 0, img.height - 1);
                for (int dx = -half; dx <= half; ++dx) {
                    int xx = std::clamp(x + dx, 0, img.width - 1);
                    if (img.at(xx, yy) <= center)
                        ++at_or_below;
                }
            }
            double cdf = static_cast<double>(at_or_below) / area;
            out.at(x, y) =
                static_cast<std::uint8_t>(std::clamp(round_half_away(256.0 * cdf) - 1, 0L, 255L));
        }
    }
    return out;
}

MmsicheResult mmsiche(const ImageBuffer& img) {
    Histogram hist = compute_histogram(img);
    MmsicheDecomposition dec;

    // (1) median: smallest intensity with CDF >= 0.5
    std::uint64_t cum = 0;
    int xm = 255;
    for (int v = 0; v < 256; ++v) {
        cum += hist.counts[v];
        if (2 * cum >= hist.total) {
            xm = v;
            break;
        }
    }
    dec.median_xm = xm;

    // (2) plateau: lower-median of the non-zero histogram counts
    std::vector<std::uint64_t> occupied;
    for (auto c : hist.counts)
        if (c > 0)
            occupied.push_back(c);
    std::sort(occupied.begin(), occupied.end());
    dec.plateau_tc = occupied.empty() ? 0 : occupied[(occupied.size() - 1) / 2];

    dec.clipped_hist.total = 0;
    for (int v = 0; v < 256; ++v) {
        dec.clipped_hist.counts[v] = std::min(hist.counts[v], dec.plateau_tc);
        dec.clipped_hist.total += dec.clipped_hist.counts[v];
    }
    const auto& ch = dec.clipped_hist.counts;

    // (3) sub-means of the two halves, weighted by clipped counts
    auto weighted_mean = [&](int lo, int hi, int fallback) {
        double num = 0, den = 0;
        for (int v = lo; v <= hi; ++v) {
            num += static_cast<double>(ch[v]) * v;
            den += static_cast<double>(ch[v]);
        }
        if (den == 0)
            return fallback;
        return static_cast<int>(round_half_away(num / den));
    };
    dec.lower_mean_xml = weighted_mean(0, xm, xm);
    dec.upper_mean_xmu = xm < 255 ? weighted_mean(xm + 1, 255, xm + 1) : 255;

    dec.sub_ranges = {{{0, dec.lower_mean_xml},
                       {dec.lower_mean_xml + 1, xm},
                       {xm + 1, dec.upper_mean_xmu},
                       {dec.upper_mean_xmu + 1, 255}}};

    // (4) equalize each sub-range into itself using the clipped counts
    IntensityMap m;
    for (int r = 0; r < 256; ++r)
        m.lut[r] = static_cast<std::uint8_t>(r);
    for (auto [a, b] : dec.sub_ranges) {
        if (a > b)
            continue;
        std::uint64_t sub_total = 0;
        for (int v = a; v <= b; ++v)
            sub_total += ch[v];
        if (sub_total == 0)
            continue; // empty sub-range stays identity
        std::uint64_t c = 0;
        for (int r = a; r <= b; ++r) {
            c += ch[r];
            double cdf = static_cast<double>(c) / sub_total;
            m.lut[r] = static_cast<std::uint8_t>(a + round_half_away((b - a) * cdf));
        }
    }

    return {apply_lut(img, m), m, dec};
}

} // namespace prepbench
