#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsdg/vectors.hpp"

namespace tsdg {

/// fvecs: repeated records of (int32-LE d, d x float32-LE).
VectorSet load_fvecs(const std::string& path);
void write_fvecs(const VectorSet& set, const std::string& path);

/// bvecs: (int32-LE d, d x uint8), widened to float32 on load.
VectorSet load_bvecs(const std::string& path);

/// Dispatches on extension: .bvecs -> load_bvecs, otherwise load_fvecs.
VectorSet load_vectors(const std::string& path);

/// ivecs: repeated records of (int32-LE k, k x int32-LE).
std::vector<std::vector<std::int32_t>> load_ivecs(const std::string& path);
void write_ivecs(const std::vector<std::vector<std::int32_t>>& lists,
                 const std::string& path);

}  // namespace tsdg
