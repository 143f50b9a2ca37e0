#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prepbench/error.hpp"

namespace prepbench {

struct BoundingBox {
    std::string class_name;
    int xmin = 0, ymin = 0, xmax = 0, ymax = 0;
    bool difficult = false;
};

struct Annotation {
    std::string filename;
    int width = 0;
    int height = 0;
    std::vector<BoundingBox> objects;

    /// Class with most objects; ties break lexicographically. Empty when no objects.
    std::string dominant_class() const;
};

struct DatasetRecord {
    std::string image_path;
    Annotation annotation;
};

struct DatasetIndex {
    std::vector<DatasetRecord> records;
    std::vector<std::string> class_set; // sorted unique
};

struct DatasetStats {
    std::map<std::pair<int, int>, std::size_t> resolution_hist;
    std::map<std::string, std::size_t> class_counts;
    std::array<std::size_t, 16> luminance_hist{}; // equal-width bins over mean luminance
    double objects_per_image_mean = 0.0;
    std::size_t objects_per_image_max = 0;
};

Annotation parse_annotation(const std::string& xml_text);

struct ScanIssue {
    std::string path;
    std::string message;
};

/// Pairs annotation files (*.xml) with images; records sorted by annotation path.
DatasetIndex scan_dataset(const std::string& annotation_dir, const std::string& image_dir,
                          std::vector<ScanIssue>* issues = nullptr);

DatasetStats compute_stats(const DatasetIndex& index);

/// Seeded stratified draw plus greedy chi-squared improvement toward the
/// full-set class/luminance distributions.
DatasetIndex select_subset(const DatasetIndex& index, double fraction, std::uint64_t seed);

/// The representativeness objective: chi2(class proportions) + chi2(luminance
/// histogram), add-one smoothed, subset vs full set. Exposed for reporting.
double subset_divergence(const DatasetIndex& full, const DatasetIndex& subset);

} // namespace prepbench
