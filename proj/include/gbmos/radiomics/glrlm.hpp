#pragma once

// Gray-level run lengths along each of the 13 directions; features are
// averaged over directions.

#include <algorithm>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/radiomics/discretize.hpp"
#include "gbmos/radiomics/size_matrix.hpp"

namespace gbmos {

inline std::vector<SizeMatrix> glrlm_matrices(const DiscretizedRoi& d) {
    const auto longest = static_cast<std::size_t>(std::max({d.dims[0], d.dims[1], d.dims[2]}));
    std::vector<SizeMatrix> out;
    for (const auto& dir : detail::directions13()) {
        SizeMatrix m(static_cast<std::size_t>(d.ng), longest);
        for (std::int64_t z = 0; z < d.dims[2]; ++z)
            for (std::int64_t y = 0; y < d.dims[1]; ++y)
                for (std::int64_t x = 0; x < d.dims[0]; ++x) {
                    const int a = d.levels[d.linear(x, y, z)];
                    if (!a || d.at(x - dir[0], y - dir[1], z - dir[2]) == a) continue; // not a run start
                    std::int64_t len = 1;
                    while (d.at(x + len * dir[0], y + len * dir[1], z + len * dir[2]) == a) ++len;
                    ++m.at(static_cast<std::size_t>(a), static_cast<std::size_t>(len));
                }
        out.push_back(std::move(m));
    }
    return out;
}

inline FeatureMap glrlm_features(const DiscretizedRoi& d) {
    if (d.count == 0) throw DataError("empty ROI");
    static const detail::SizeFeatureNames names{
        "ShortRunEmphasis",           "LongRunEmphasis",     "GrayLevelNonUniformity",          "GrayLevelNonUniformityNormalized",
        "RunLengthNonUniformity",     "RunLengthNonUniformityNormalized", "RunPercentage",       "GrayLevelVariance",
        "RunVariance",                "RunEntropy",          "LowGrayLevelRunEmphasis",         "HighGrayLevelRunEmphasis",
        "ShortRunLowGrayLevelEmphasis", "ShortRunHighGrayLevelEmphasis", "LongRunLowGrayLevelEmphasis", "LongRunHighGrayLevelEmphasis"};
    std::vector<FeatureMap> per_dir;
    for (const auto& m : glrlm_matrices(d))
        per_dir.push_back(detail::size_matrix_features(m, static_cast<double>(d.count), names));
    FeatureMap out = per_dir.front();
    for (auto& [name, v] : out) {
        v = 0;
        for (const auto& m : per_dir) v += m.at(name);
        v /= static_cast<double>(per_dir.size());
    }
    return out;
}

} // namespace gbmos
