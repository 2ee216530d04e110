#pragma once

// Gray-level size zones: 26-connected components of equal level.

#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/radiomics/discretize.hpp"
#include "gbmos/radiomics/size_matrix.hpp"

namespace gbmos {

inline SizeMatrix glszm_matrix(const DiscretizedRoi& d) {
    std::vector<std::pair<int, std::size_t>> zones; // (level, size)
    std::vector<std::uint8_t> seen(d.levels.size(), 0);
    std::vector<Index3> stack;
    std::size_t largest = 1;
    for (std::int64_t z = 0; z < d.dims[2]; ++z)
        for (std::int64_t y = 0; y < d.dims[1]; ++y)
            for (std::int64_t x = 0; x < d.dims[0]; ++x) {
                const auto start = d.linear(x, y, z);
                const int a = d.levels[start];
                if (!a || seen[start]) continue;
                seen[start] = 1;
                stack.assign(1, Index3{x, y, z});
                std::size_t size = 0;
                while (!stack.empty()) {
                    const auto p = stack.back();
                    stack.pop_back();
                    ++size;
                    for (const auto& o : detail::neighbors26()) {
                        const Index3 q{p[0] + o[0], p[1] + o[1], p[2] + o[2]};
                        if (d.at(q[0], q[1], q[2]) != a) continue;
                        const auto qi = d.linear(q[0], q[1], q[2]);
                        if (seen[qi]) continue;
                        seen[qi] = 1;
                        stack.push_back(q);
                    }
                }
                zones.emplace_back(a, size);
                largest = std::max(largest, size);
            }
    SizeMatrix m(static_cast<std::size_t>(d.ng), largest);
    for (const auto& [level, size] : zones) ++m.at(static_cast<std::size_t>(level), size);
    return m;
}

inline FeatureMap glszm_features(const DiscretizedRoi& d) {
    if (d.count == 0) throw DataError("empty ROI");
    static const detail::SizeFeatureNames names{
        "SmallAreaEmphasis",  "LargeAreaEmphasis",  "GrayLevelNonUniformity",  "GrayLevelNonUniformityNormalized",
        "SizeZoneNonUniformity", "SizeZoneNonUniformityNormalized", "ZonePercentage", "GrayLevelVariance",
        "ZoneVariance",       "ZoneEntropy",        "LowGrayLevelZoneEmphasis", "HighGrayLevelZoneEmphasis",
        "SmallAreaLowGrayLevelEmphasis", "SmallAreaHighGrayLevelEmphasis", "LargeAreaLowGrayLevelEmphasis",
        "LargeAreaHighGrayLevelEmphasis"};
    return detail::size_matrix_features(glszm_matrix(d), static_cast<double>(d.count), names);
}

} // namespace gbmos
