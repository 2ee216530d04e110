#pragma once

// Gray-level dependence: for every ROI voxel, the number d of 26-neighbors in
// the ROI whose level differs by at most alpha. The matrix column is
// j = d + 1 (1..27), so a voxel without dependents sits in column 1.

#include <cstdlib>

#include "gbmos/core/error.hpp"
#include "gbmos/radiomics/discretize.hpp"
#include "gbmos/radiomics/size_matrix.hpp"

namespace gbmos {

inline SizeMatrix gldm_matrix(const DiscretizedRoi& d, int alpha = 0) {
    if (alpha < 0) throw ParameterError("dependence tolerance must be non-negative");
    SizeMatrix m(static_cast<std::size_t>(d.ng), 27);
    for (std::int64_t z = 0; z < d.dims[2]; ++z)
        for (std::int64_t y = 0; y < d.dims[1]; ++y)
            for (std::int64_t x = 0; x < d.dims[0]; ++x) {
                const int a = d.levels[d.linear(x, y, z)];
                if (!a) continue;
                std::size_t dep = 0;
                for (const auto& o : detail::neighbors26()) {
                    const int b = d.at(x + o[0], y + o[1], z + o[2]);
                    dep += b && std::abs(a - b) <= alpha;
                }
                ++m.at(static_cast<std::size_t>(a), dep + 1);
            }
    return m;
}

inline FeatureMap gldm_features(const DiscretizedRoi& d, int alpha = 0) {
    if (d.count == 0) throw DataError("empty ROI");
    static const detail::SizeFeatureNames names{"SmallDependenceEmphasis",
                                                "LargeDependenceEmphasis",
                                                "GrayLevelNonUniformity",
                                                nullptr,
                                                "DependenceNonUniformity",
                                                "DependenceNonUniformityNormalized",
                                                nullptr,
                                                "GrayLevelVariance",
                                                "DependenceVariance",
                                                "DependenceEntropy",
                                                "LowGrayLevelEmphasis",
                                                "HighGrayLevelEmphasis",
                                                "SmallDependenceLowGrayLevelEmphasis",
                                                "SmallDependenceHighGrayLevelEmphasis",
                                                "LargeDependenceLowGrayLevelEmphasis",
                                                "LargeDependenceHighGrayLevelEmphasis"};
    return detail::size_matrix_features(gldm_matrix(d, alpha), static_cast<double>(d.count), names);
}

} // namespace gbmos
