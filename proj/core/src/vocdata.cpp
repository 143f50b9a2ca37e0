#include "prepbench/vocdata.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "prepbench/image.hpp"
#include "prepbench/rng.hpp"
#include "prepbench/xml.hpp"

namespace fs = std::filesystem;

namespace prepbench {

std::string Annotation::dominant_class() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& o : objects)
        ++counts[o.class_name];
    std::string best;
    std::size_t best_n = 0;
    for (const auto& [name, n] : counts) {
        if (n > best_n) { // map order breaks ties lexicographically
            best = name;
            best_n = n;
        }
    }
    return best;
}

namespace {

const xml::Element& require_child(const xml::Element& parent, const std::string& name) {
    const xml::Element* c = parent.find(name);
    if (!c)
        throw Error(ErrorCode::MissingField, "<" + parent.name + "> lacks <" + name + ">");
    return *c;
}

std::string trimmed(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int int_field(const xml::Element& parent, const std::string& name) {
    std::string t = trimmed(require_child(parent, name).text);
    try {
        std::size_t used = 0;
        int v = std::stoi(t, &used);
        if (used != t.size())
            throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::MissingField, "<" + name + "> is not an integer: '" + t + "'");
    }
}

} // namespace

Annotation parse_annotation(const std::string& xml_text) {
    auto root = xml::parse(xml_text);
    if (root->name != "annotation")
        throw Error(ErrorCode::MissingField, "root element must be <annotation>");

    Annotation ann;
    ann.filename = trimmed(require_child(*root, "filename").text);
    if (ann.filename.empty())
        throw Error(ErrorCode::MissingField, "<filename> is empty");
    const auto& size = require_child(*root, "size");
    ann.width = int_field(size, "width");
    ann.height = int_field(size, "height");
    if (ann.width < 1 || ann.height < 1)
        throw Error(ErrorCode::MissingField, "non-positive image size");

    for (const xml::Element* obj : root->find_all("object")) {
        BoundingBox box;
        box.class_name = trimmed(require_child(*obj, "name").text);
        if (box.class_name.empty())
            throw Error(ErrorCode::MissingField, "<object> has empty <name>");
        if (const xml::Element* diff = obj->find("difficult"))
            box.difficult = trimmed(diff->text) == "1";
        const auto& bnd = require_child(*obj, "bndbox");
        box.xmin = int_field(bnd, "xmin");
        box.ymin = int_field(bnd, "ymin");
        box.xmax = int_field(bnd, "xmax");
        box.ymax = int_field(bnd, "ymax");
        if (!(0 <= box.xmin && box.xmin < box.xmax && box.xmax <= ann.width) ||
            !(0 <= box.ymin && box.ymin < box.ymax && box.ymax <= ann.height))
            throw Error(ErrorCode::InvalidBox,
                        box.class_name + " box (" + std::to_string(box.xmin) + "," +
                            std::to_string(box.ymin) + "," + std::to_string(box.xmax) + "," +
                            std::to_string(box.ymax) + ") outside " +
                            std::to_string(ann.width) + "x" + std::to_string(ann.height));
        ann.objects.push_back(std::move(box));
    }
    return ann;
}

DatasetIndex scan_dataset(const std::string& annotation_dir, const std::string& image_dir,
                          std::vector<ScanIssue>* issues) {
    std::vector<fs::path> ann_files;
    for (const auto& entry : fs::directory_iterator(annotation_dir))
        if (entry.is_regular_file() && entry.path().extension() == ".xml")
            ann_files.push_back(entry.path());
    std::sort(ann_files.begin(), ann_files.end());

    DatasetIndex index;
    std::set<std::string> classes;
    for (const auto& path : ann_files) {
        try {
            std::ifstream in(path);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            Annotation ann = parse_annotation(text);

            fs::path img = fs::path(image_dir) / ann.filename;
            if (!fs::exists(img)) {
                // VOC filenames usually say .jpg; we work from converted pgm/ppm
                fs::path alt = img;
                alt.replace_extension(".pgm");
                if (!fs::exists(alt)) {
                    alt.replace_extension(".ppm");
                    if (!fs::exists(alt))
                        throw Error(ErrorCode::MissingImage, "no image for " + ann.filename);
                }
                img = alt;
            }
            for (const auto& o : ann.objects)
                classes.insert(o.class_name);
            index.records.push_back({img.string(), std::move(ann)});
        } catch (const Error& e) {
            if (!issues)
                throw;
            issues->push_back({path.string(), e.what()});
        }
    }
    index.class_set.assign(classes.begin(), classes.end());
    return index;
}

namespace {

int luminance_bin(const ImageBuffer& gray) {
    double mean = 0;
    for (auto p : gray.pixels)
        mean += p;
    mean /= static_cast<double>(gray.pixels.size());
    return std::min(15, static_cast<int>(mean / 16.0));
}

ImageBuffer load_gray(const std::string& path) {
    ImageBuffer img = read_image_file(path);
    return img.channels == 3 ? rgb_to_gray(img) : img;
}

} // namespace

DatasetStats compute_stats(const DatasetIndex& index) {
    DatasetStats stats;
    std::size_t total_objects = 0;
    for (const auto& rec : index.records) {
        ++stats.resolution_hist[{rec.annotation.width, rec.annotation.height}];
        for (const auto& o : rec.annotation.objects)
            ++stats.class_counts[o.class_name];
        total_objects += rec.annotation.objects.size();
        stats.objects_per_image_max =
            std::max(stats.objects_per_image_max, rec.annotation.objects.size());
        ++stats.luminance_hist[luminance_bin(load_gray(rec.image_path))];
    }
    if (!index.records.empty())
        stats.objects_per_image_mean =
            static_cast<double>(total_objects) / static_cast<double>(index.records.size());
    return stats;
}

namespace {

struct RecordTraits {
    std::string dominant;
    int lum_bin;
};

// chi2 with add-one smoothing, expected scaled to the observed total
double chi2(const std::vector<double>& observed, const std::vector<double>& expected) {
    double o_total = 0, e_total = 0;
    for (double o : observed)
        o_total += o + 1;
    for (double e : expected)
        e_total += e + 1;
    double stat = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double o = observed[i] + 1;
        double e = (expected[i] + 1) * o_total / e_total;
        stat += (o - e) * (o - e) / e;
    }
    return stat;
}

double divergence(const std::vector<RecordTraits>& traits,
                  const std::vector<std::string>& class_set,
                  const std::vector<std::size_t>& subset_ids,
                  const std::vector<std::size_t>& full_ids) {
    std::map<std::string, std::size_t> class_idx;
    for (std::size_t i = 0; i < class_set.size(); ++i)
        class_idx[class_set[i]] = i;
    auto tally = [&](const std::vector<std::size_t>& ids, std::vector<double>& cls,
                     std::vector<double>& lum) {
        cls.assign(std::max<std::size_t>(class_set.size(), 1), 0.0);
        lum.assign(16, 0.0);
        for (std::size_t id : ids) {
            auto it = class_idx.find(traits[id].dominant);
            if (it != class_idx.end())
                cls[it->second] += 1;
            lum[traits[id].lum_bin] += 1;
        }
    };
    std::vector<double> sc, sl, fc, fl;
    tally(subset_ids, sc, sl);
    tally(full_ids, fc, fl);
    return chi2(sc, fc) + chi2(sl, fl);
}

std::vector<RecordTraits> collect_traits(const DatasetIndex& index) {
    std::vector<RecordTraits> traits;
    traits.reserve(index.records.size());
    for (const auto& rec : index.records)
        traits.push_back({rec.annotation.dominant_class(), luminance_bin(load_gray(rec.image_path))});
    return traits;
}

} // namespace

double subset_divergence(const DatasetIndex& full, const DatasetIndex& subset) {
    auto traits = collect_traits(full);
    std::map<std::string, std::size_t> by_path;
    for (std::size_t i = 0; i < full.records.size(); ++i)
        by_path[full.records[i].image_path] = i;
    std::vector<std::size_t> subset_ids, full_ids;
    for (const auto& rec : subset.records)
        subset_ids.push_back(by_path.at(rec.image_path));
    for (std::size_t i = 0; i < full.records.size(); ++i)
        full_ids.push_back(i);
    return divergence(traits, full.class_set, subset_ids, full_ids);
}

DatasetIndex select_subset(const DatasetIndex& index, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw Error(ErrorCode::InvalidFraction, "fraction must be in (0, 1]");
    std::size_t n = index.records.size();
    if (fraction == 1.0 || n <= 1)
        return index;
    std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(round_half_away(fraction * n)));
    if (m >= n)
        return index;

    auto traits = collect_traits(index);
    CounterRng rng(seed);

    // (a) stratified draw proportional to dominant-class group sizes
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < n; ++i)
        groups[traits[i].dominant].push_back(i);

    std::vector<std::size_t> chosen;
    std::vector<std::pair<double, std::string>> remainders;
    std::size_t allocated = 0;
    std::map<std::string, std::size_t> quota;
    for (const auto& [name, members] : groups) {
        double exact = fraction * static_cast<double>(members.size());
        std::size_t q = static_cast<std::size_t>(exact);
        quota[name] = std::min(q, members.size());
        allocated += quota[name];
        remainders.push_back({exact - q, name});
    }
    std::sort(remainders.begin(), remainders.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [frac, name] : remainders) {
        if (allocated >= m)
            break;
        if (quota[name] < groups[name].size()) {
            ++quota[name];
            ++allocated;
        }
    }
    for (auto& [name, members] : groups) {
        // seeded partial Fisher-Yates
        for (std::size_t i = 0; i < quota[name]; ++i) {
            std::size_t j = i + rng.next_below(members.size() - i);
            std::swap(members[i], members[j]);
            chosen.push_back(members[i]);
        }
    }
    // top up / trim in case rounding left us off target
    std::set<std::size_t> in_set(chosen.begin(), chosen.end());
    while (in_set.size() < m) {
        std::size_t cand = rng.next_below(n);
        in_set.insert(cand);
    }
    while (in_set.size() > m)
        in_set.erase(std::next(in_set.begin(), rng.next_below(in_set.size())));

    std::vector<std::size_t> subset_ids(in_set.begin(), in_set.end());
    std::vector<std::size_t> full_ids(n);
    for (std::size_t i = 0; i < n; ++i)
        full_ids[i] = i;

    // (b) greedy swap improvement on the chi2 objective
    double best_d = divergence(traits, index.class_set, subset_ids, full_ids);
    std::vector<std::size_t> outside;
    auto rebuild_outside = [&] {
        outside.clear();
        std::set<std::size_t> members(subset_ids.begin(), subset_ids.end());
        for (std::size_t i = 0; i < n; ++i)
            if (!members.count(i))
                outside.push_back(i);
    };
    rebuild_outside();
    for (int iter = 0; iter < 1000 && !outside.empty(); ++iter) {
        std::size_t out_pos = rng.next_below(subset_ids.size());
        std::size_t in_pos = rng.next_below(outside.size());
        std::size_t removed = subset_ids[out_pos];
        subset_ids[out_pos] = outside[in_pos];
        double d = divergence(traits, index.class_set, subset_ids, full_ids);
        if (d < best_d) {
            best_d = d;
            outside[in_pos] = removed;
        } else {
            subset_ids[out_pos] = removed;
        }
    }

    std::sort(subset_ids.begin(), subset_ids.end());
    DatasetIndex out;
    std::set<std::string> classes;
    for (std::size_t id : subset_ids) {
        out.records.push_back(index.records[id]);
        for (const auto& o : index.records[id].annotation.objects)
            classes.insert(o.class_name);
    }
    out.class_set.assign(classes.begin(), classes.end());
    return out;
}

} // namespace prepbench
