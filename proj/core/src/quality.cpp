#include "prepbench/quality.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "prepbench/transforms.hpp"

namespace prepbench {

namespace {

void require_same_dims(const ImageBuffer& a, const ImageBuffer& b) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        throw Error(ErrorCode::DimensionMismatch, "images differ in shape");
}

} // namespace

double mse(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_dims(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        double d = static_cast<double>(a.pixels[i]) - b.pixels[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.pixels.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
    double e = mse(a, b);
    if (e == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(255.0 * 255.0 / e);
}

double avg_luminance(const ImageBuffer& img) {
    double sum = 0.0;
    for (auto p : img.pixels)
        sum += p;
    return sum / static_cast<double>(img.pixels.size());
}

double ambe(const ImageBuffer& a, const ImageBuffer& b) {
    require_same_dims(a, b);
    return std::abs(avg_luminance(a) - avg_luminance(b));
}

double entropy(const ImageBuffer& img) {
    Histogram h = compute_histogram(img);
    double bits = 0.0;
    for (auto c : h.counts) {
        if (c == 0)
            continue;
        double p = static_cast<double>(c) / h.total;
        bits -= p * std::log2(p);
    }
    return bits;
}

int background_gray(const ImageBuffer& img) {
    Histogram h = compute_histogram(img);
    int best = 0;
    for (int v = 1; v < 256; ++v)
        if (h.counts[v] > h.counts[best])
            best = v; // strict >, ties keep the smallest intensity
    return best;
}

QualityReport quality_report(const std::string& file, const ImageBuffer& reference,
                             const ImageBuffer& test) {
    QualityReport r;
    r.file = file;
    r.mse = mse(reference, test);
    r.psnr_finite = r.mse > 0.0;
    r.psnr_db = r.psnr_finite ? 10.0 * std::log10(255.0 * 255.0 / r.mse) : 0.0;
    r.ambe = ambe(reference, test);
    r.entropy_bits = entropy(test);
    r.avg_luminance = avg_luminance(test);
    r.background_gray = background_gray(test);
    return r;
}

std::string quality_csv_header() {
    return "file,mse,psnr_db,ambe,entropy_bits,avg_luminance,background_gray";
}

std::string quality_csv_row(const QualityReport& r) {
    std::ostringstream os;
    os.precision(12);
    os << r.file << ',' << r.mse << ',';
    if (r.psnr_finite)
        os << r.psnr_db;
    else
        os << "inf";
    os << ',' << r.ambe << ',' << r.entropy_bits << ',' << r.avg_luminance << ','
       << r.background_gray;
    return os.str();
}

} // namespace prepbench
