#pragma once

#include <string>

#include "mwlab/weight_field.hpp"

namespace mwlab {

/// Self-describing binary interchange format for weight fields:
///   magic "MWLF" | version u32 | m u32 | n u32 | L f64 | d u32 | count u64
/// followed by count * d * d complex128 little-endian values in row-major
/// grid order, matrix entries row-major. A JSON sidecar (path + ".json")
/// carries the same metadata for tooling. Round trips are bit-exact.
void save_field(const WeightField& w, const std::string& path);

WeightField load_field(const std::string& path);

inline constexpr std::uint32_t kWeightFormatVersion = 1;

}  // namespace mwlab
