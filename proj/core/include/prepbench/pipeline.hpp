#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "prepbench/image.hpp"

namespace prepbench {

using ParamValue = std::variant<double, std::int64_t, std::string>;

struct PipelineStep {
    std::string op;
    std::map<std::string, ParamValue> params; // canonical: sorted keys

    bool operator==(const PipelineStep&) const = default;
};

/// Ordered, parameterized preprocessing recipe; the unit the tuner searches over.
struct PipelineSpec {
    std::vector<PipelineStep> steps;

    bool operator==(const PipelineSpec&) const = default;
};

/// Registered op names: negative, threshold, log, gamma, piecewise, slice,
/// equalize, match, local_equalize, mmsiche, box, median, wiener, unsharp,
/// dwt_upscale, add_gaussian, add_impulse, to_gray.
PipelineSpec parse_pipeline(const std::string& json_text);

std::string serialize_pipeline(const PipelineSpec& spec);

/// FNV-1a over the canonical serialization; stable across platforms.
std::uint64_t pipeline_hash(const PipelineSpec& spec);

/// Applies steps in order. RGB input is converted to gray before the first
/// gray-only op when a to_gray step precedes it; noise steps use seed ^ step_index.
ImageBuffer apply_pipeline(const PipelineSpec& spec, const ImageBuffer& img,
                           std::uint64_t seed = 0);

} // namespace prepbench
