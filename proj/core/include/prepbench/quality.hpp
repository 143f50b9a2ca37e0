#pragma once

#include <string>

#include "prepbench/image.hpp"

namespace prepbench {

struct QualityReport {
    std::string file;
    double mse = 0.0;
    double psnr_db = 0.0;   // valid only when psnr_finite
    bool psnr_finite = true;
    double ambe = 0.0;
    double entropy_bits = 0.0;
    double avg_luminance = 0.0;
    int background_gray = 0;
};

double mse(const ImageBuffer& a, const ImageBuffer& b);

/// 10*log10(255^2 / mse); infinity flagged via psnr_finite in reports.
double psnr(const ImageBuffer& a, const ImageBuffer& b); // +inf when mse == 0

double ambe(const ImageBuffer& a, const ImageBuffer& b);
double entropy(const ImageBuffer& img);
double avg_luminance(const ImageBuffer& img);
int background_gray(const ImageBuffer& img);

QualityReport quality_report(const std::string& file, const ImageBuffer& reference,
                             const ImageBuffer& test);

std::string quality_csv_header();
std::string quality_csv_row(const QualityReport& r);

} // namespace prepbench
