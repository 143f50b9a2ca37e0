#include "prepbench/pipeline.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include <json.hpp>

#include "prepbench/filters.hpp"
#include "prepbench/transforms.hpp"

namespace prepbench {

namespace {

using nlohmann::ordered_json;

struct ParamView {
    const std::map<std::string, ParamValue>& params;
    const std::string& op;
    std::size_t step;

    [[noreturn]] void bad(const std::string& what) const {
        throw Error(ErrorCode::BadParam,
                    "step " + std::to_string(step) + " (" + op + "): " + what);
    }

    bool has(const std::string& name) const { return params.count(name) > 0; }

    double number(const std::string& name) const {
        auto it = params.find(name);
        if (it == params.end())
            bad("missing param '" + name + "'");
        if (const auto* d = std::get_if<double>(&it->second))
            return *d;
        if (const auto* i = std::get_if<std::int64_t>(&it->second))
            return static_cast<double>(*i);
        bad("param '" + name + "' must be a number");
    }

    double number_or(const std::string& name, double fallback) const {
        return has(name) ? number(name) : fallback;
    }

    long integer(const std::string& name) const {
        auto it = params.find(name);
        if (it == params.end())
            bad("missing param '" + name + "'");
        if (const auto* i = std::get_if<std::int64_t>(&it->second))
            return static_cast<long>(*i);
        bad("param '" + name + "' must be an integer");
    }

    std::string text(const std::string& name) const {
        auto it = params.find(name);
        if (it == params.end())
            bad("missing param '" + name + "'");
        if (const auto* s = std::get_if<std::string>(&it->second))
            return *s;
        bad("param '" + name + "' must be a string");
    }
};

struct OpInfo {
    std::vector<std::string> allowed_params;
    // Validates params; throws BadParam on violated preconditions.
    std::function<void(const ParamView&)> validate;
    // seed is already derived for this step.
    std::function<ImageBuffer(const ParamView&, const ImageBuffer&, std::uint64_t)> apply;
};

void check_range(const ParamView& p, const std::string& name, double lo, double hi) {
    double v = p.number(name);
    if (v < lo || v > hi)
        p.bad("param '" + name + "' out of range [" + std::to_string(lo) + ", " +
              std::to_string(hi) + "]");
}

void check_odd(const ParamView& p, const std::string& name, long min_v) {
    long v = p.integer(name);
    if (v < min_v || v % 2 == 0)
        p.bad("param '" + name + "' must be odd and >= " + std::to_string(min_v));
}

const std::map<std::string, OpInfo>& registry() {
    static const std::map<std::string, OpInfo> reg = [] {
        std::map<std::string, OpInfo> r;
        r["negative"] = {{},
                         [](const ParamView&) {},
                         [](const ParamView&, const ImageBuffer& im, std::uint64_t) {
                             return negative(im);
                         }};
        r["threshold"] = {{"t"},
                          [](const ParamView& p) { check_range(p, "t", 0, 255); },
                          [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                              return threshold(im, static_cast<int>(p.integer("t")));
                          }};
        r["log"] = {{"c"},
                    [](const ParamView& p) {
                        if (p.has("c") && p.number("c") <= 0)
                            p.bad("gain must be positive");
                    },
                    [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                        return log_transform(im, p.number_or("c", default_log_gain()));
                    }};
        r["gamma"] = {{"gamma", "c"},
                      [](const ParamView& p) {
                          if (p.number("gamma") <= 0 || p.number_or("c", 1.0) <= 0)
                              p.bad("gamma and gain must be positive");
                      },
                      [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                          return gamma_transform(im, p.number("gamma"), p.number_or("c", 1.0));
                      }};
        r["piecewise"] = {{"r1", "s1", "r2", "s2"},
                          [](const ParamView& p) {
                              long r1 = p.integer("r1"), s1 = p.integer("s1");
                              long r2 = p.integer("r2"), s2 = p.integer("s2");
                              if (!(0 <= r1 && r1 <= r2 && r2 <= 255) ||
                                  !(0 <= s1 && s1 <= s2 && s2 <= 255))
                                  p.bad("control points must be ordered in [0,255]");
                          },
                          [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                              return piecewise_stretch(
                                  im, static_cast<int>(p.integer("r1")),
                                  static_cast<int>(p.integer("s1")),
                                  static_cast<int>(p.integer("r2")),
                                  static_cast<int>(p.integer("s2")));
                          }};
        r["slice"] = {{"a", "b", "mode"},
                      [](const ParamView& p) {
                          long a = p.integer("a"), b = p.integer("b");
                          if (!(0 <= a && a <= b && b <= 255))
                              p.bad("need 0 <= a <= b <= 255");
                          std::string mode = p.has("mode") ? p.text("mode") : "preserve";
                          if (mode != "preserve" && mode != "binary")
                              p.bad("mode must be 'preserve' or 'binary'");
                      },
                      [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                          std::string mode = p.has("mode") ? p.text("mode") : "preserve";
                          return gray_level_slice(im, static_cast<int>(p.integer("a")),
                                                  static_cast<int>(p.integer("b")),
                                                  mode == "binary" ? SliceMode::Binary
                                                                   : SliceMode::Preserve);
                      }};
        r["equalize"] = {{},
                         [](const ParamView&) {},
                         [](const ParamView&, const ImageBuffer& im, std::uint64_t) {
                             return equalize(im).image;
                         }};
        r["match"] = {{"reference"},
                      [](const ParamView& p) { p.text("reference"); },
                      [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                          ImageBuffer ref = read_image_file(p.text("reference"));
                          if (ref.channels == 3)
                              ref = rgb_to_gray(ref);
                          return match_histogram(im, compute_histogram(ref));
                      }};
        r["local_equalize"] = {{"w"},
                               [](const ParamView& p) { check_odd(p, "w", 1); },
                               [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                                   return local_equalize(im, static_cast<int>(p.integer("w")));
                               }};
        r["mmsiche"] = {{},
                        [](const ParamView&) {},
                        [](const ParamView&, const ImageBuffer& im, std::uint64_t) {
                            return mmsiche(im).image;
                        }};
        r["box"] = {{"k"},
                    [](const ParamView& p) { check_odd(p, "k", 1); },
                    [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                        return box_filter(im, static_cast<int>(p.integer("k")));
                    }};
        r["median"] = {{"k"},
                       [](const ParamView& p) { check_odd(p, "k", 1); },
                       [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                           return median_filter(im, static_cast<int>(p.integer("k")));
                       }};
        r["wiener"] = {{"k", "noise_var"},
                       [](const ParamView& p) {
                           check_odd(p, "k", 3);
                           if (p.has("noise_var") && p.number("noise_var") < 0)
                               p.bad("noise_var must be >= 0");
                       },
                       [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                           std::optional<double> nv;
                           if (p.has("noise_var"))
                               nv = p.number("noise_var");
                           return wiener_filter(im, static_cast<int>(p.integer("k")), nv);
                       }};
        r["unsharp"] = {{"k", "gain_high", "var_lo", "var_hi"},
                        [](const ParamView& p) {
                            check_odd(p, "k", 1);
                            if (p.number("gain_high") < 0 || p.number("var_lo") < 0 ||
                                p.number("var_lo") >= p.number("var_hi"))
                                p.bad("need 0 <= var_lo < var_hi and gain_high >= 0");
                        },
                        [](const ParamView& p, const ImageBuffer& im, std::uint64_t) {
                            return unsharp_adaptive(im, static_cast<int>(p.integer("k")),
                                                    p.number("gain_high"), p.number("var_lo"),
                                                    p.number("var_hi"));
                        }};
        r["dwt_upscale"] = {{},
                            [](const ParamView&) {},
                            [](const ParamView&, const ImageBuffer& im, std::uint64_t) {
                                return dwt_upscale(im);
                            }};
        r["add_gaussian"] = {{"sigma"},
                             [](const ParamView& p) {
                                 if (p.number("sigma") < 0)
                                     p.bad("sigma must be >= 0");
                             },
                             [](const ParamView& p, const ImageBuffer& im, std::uint64_t seed) {
                                 return add_gaussian(im, p.number("sigma"), seed);
                             }};
        r["add_impulse"] = {{"p"},
                            [](const ParamView& p) { check_range(p, "p", 0, 1); },
                            [](const ParamView& p, const ImageBuffer& im, std::uint64_t seed) {
                                return add_impulse(im, p.number("p"), seed);
                            }};
        r["to_gray"] = {{},
                        [](const ParamView&) {},
                        [](const ParamView&, const ImageBuffer& im, std::uint64_t) {
                            return im.channels == 3 ? rgb_to_gray(im) : im;
                        }};
        return r;
    }();
    return reg;
}

void validate_step(const PipelineStep& step, std::size_t index) {
    auto it = registry().find(step.op);
    if (it == registry().end())
        throw Error(ErrorCode::UnknownOp, "step " + std::to_string(index) + ": '" + step.op + "'");
    const OpInfo& info = it->second;
    for (const auto& [name, value] : step.params) {
        (void)value;
        if (std::find(info.allowed_params.begin(), info.allowed_params.end(), name) ==
            info.allowed_params.end())
            throw Error(ErrorCode::BadParam, "step " + std::to_string(index) + " (" + step.op +
                                                 "): unknown param '" + name + "'");
    }
    info.validate(ParamView{step.params, step.op, index});
}

} // namespace

PipelineSpec parse_pipeline(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedJson, e.what());
    }
    if (!doc.is_array())
        throw Error(ErrorCode::MalformedJson, "pipeline must be a JSON array of steps");

    PipelineSpec spec;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        if (!item.is_object() || !item.contains("op") || !item["op"].is_string())
            throw Error(ErrorCode::MalformedJson,
                        "step " + std::to_string(i) + ": expected {\"op\": ...}");
        PipelineStep step;
        step.op = item["op"].get<std::string>();
        for (const auto& [key, value] : item.items()) {
            if (key == "op")
                continue;
            if (key != "params")
                throw Error(ErrorCode::MalformedJson,
                            "step " + std::to_string(i) + ": unexpected key '" + key + "'");
            if (!value.is_object())
                throw Error(ErrorCode::MalformedJson,
                            "step " + std::to_string(i) + ": params must be an object");
            for (const auto& [pname, pval] : value.items()) {
                if (pval.is_number_integer())
                    step.params[pname] = pval.get<std::int64_t>();
                else if (pval.is_number())
                    step.params[pname] = pval.get<double>();
                else if (pval.is_string())
                    step.params[pname] = pval.get<std::string>();
                else
                    throw Error(ErrorCode::BadParam, "step " + std::to_string(i) + ": param '" +
                                                         pname + "' must be number or string");
            }
        }
        validate_step(step, i);
        spec.steps.push_back(std::move(step));
    }
    return spec;
}

std::string serialize_pipeline(const PipelineSpec& spec) {
    ordered_json doc = ordered_json::array();
    for (const auto& step : spec.steps) {
        ordered_json item;
        item["op"] = step.op;
        if (!step.params.empty()) {
            ordered_json params = ordered_json::object();
            for (const auto& [name, value] : step.params) { // std::map keeps keys sorted
                std::visit([&](const auto& v) { params[name] = v; }, value);
            }
            item["params"] = std::move(params);
        }
        doc.push_back(std::move(item));
    }
    return doc.dump();
}

std::uint64_t pipeline_hash(const PipelineSpec& spec) {
    std::string canon = serialize_pipeline(spec);
    std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

ImageBuffer apply_pipeline(const PipelineSpec& spec, const ImageBuffer& img, std::uint64_t seed) {
    ImageBuffer current = img;
    for (std::size_t i = 0; i < spec.steps.size(); ++i) {
        const auto& step = spec.steps[i];
        const OpInfo& info = registry().at(step.op);
        if (current.channels == 3 && step.op != "to_gray")
            throw Error(ErrorCode::ChannelMismatch,
                        "step " + std::to_string(i) + " (" + step.op +
                            ") needs grayscale; add a to_gray step first");
        try {
            current = info.apply(ParamView{step.params, step.op, i}, current, seed ^ i);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& e) {
            throw Error(ErrorCode::BadParam,
                        "step " + std::to_string(i) + " (" + step.op + "): " + e.what());
        }
    }
    return current;
}

} // namespace prepbench
