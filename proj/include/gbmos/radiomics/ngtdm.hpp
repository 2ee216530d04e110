#pragma once

// Neighboring gray-tone differences. Only voxels with at least one ROI voxel
// in their 26-neighborhood contribute. Conventions for degenerate inputs:
// coarseness 1e6 when its denominator is 0; busyness and complexity 0/0 -> 0;
// contrast 0 and busyness 0 with a single level; strength 0 when all s_i = 0.

#include <cmath>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/radiomics/discretize.hpp"
#include "gbmos/radiomics/features.hpp"

namespace gbmos {

constexpr double kCoarsenessSentinel = 1e6;

struct NgtdmTable {
    std::vector<double> n; // voxels per level with a valid neighborhood (index 1..ng)
    std::vector<double> s; // sum of |level - neighborhood mean|
};

inline NgtdmTable ngtdm_table(const DiscretizedRoi& d) {
    NgtdmTable t{std::vector<double>(static_cast<std::size_t>(d.ng) + 1, 0.0),
                 std::vector<double>(static_cast<std::size_t>(d.ng) + 1, 0.0)};
    for (std::int64_t z = 0; z < d.dims[2]; ++z)
        for (std::int64_t y = 0; y < d.dims[1]; ++y)
            for (std::int64_t x = 0; x < d.dims[0]; ++x) {
                const int a = d.levels[d.linear(x, y, z)];
                if (!a) continue;
                int sum = 0, cnt = 0;
                for (const auto& o : detail::neighbors26()) {
                    const int b = d.at(x + o[0], y + o[1], z + o[2]);
                    if (b) {
                        sum += b;
                        ++cnt;
                    }
                }
                if (!cnt) continue;
                t.n[static_cast<std::size_t>(a)] += 1;
                t.s[static_cast<std::size_t>(a)] += std::fabs(a - static_cast<double>(sum) / cnt);
            }
    return t;
}

inline FeatureMap ngtdm_features(const DiscretizedRoi& d) {
    if (d.count == 0) throw DataError("empty ROI");
    const auto t = ngtdm_table(d);
    const std::size_t ng = static_cast<std::size_t>(d.ng);
    double nvp = 0, s_total = 0;
    for (std::size_t i = 1; i <= ng; ++i) {
        nvp += t.n[i];
        s_total += t.s[i];
    }
    std::vector<double> p(ng + 1, 0.0);
    std::vector<std::size_t> present;
    for (std::size_t i = 1; i <= ng; ++i)
        if (t.n[i] > 0) {
            p[i] = t.n[i] / nvp;
            present.push_back(i);
        }
    const double ngp = static_cast<double>(present.size());

    double ps = 0;
    for (auto i : present) ps += p[i] * t.s[i];
    double contrast_sum = 0, busy_den = 0, complexity = 0, strength_num = 0;
    for (auto i : present)
        for (auto j : present) {
            const double di = static_cast<double>(i), dj = static_cast<double>(j);
            contrast_sum += p[i] * p[j] * (di - dj) * (di - dj);
            busy_den += std::fabs(di * p[i] - dj * p[j]);
            complexity += std::fabs(di - dj) * (p[i] * t.s[i] + p[j] * t.s[j]) / (p[i] + p[j]);
            strength_num += (p[i] + p[j]) * (di - dj) * (di - dj);
        }

    FeatureMap f;
    f["Busyness"] = (ngp > 1 && busy_den > 0) ? ps / busy_den : 0.0;
    f["Coarseness"] = ps > 0 ? 1.0 / ps : kCoarsenessSentinel;
    f["Complexity"] = nvp > 0 ? complexity / nvp : 0.0;
    f["Contrast"] = ngp > 1 ? contrast_sum / (ngp * (ngp - 1)) * s_total / nvp : 0.0;
    f["Strength"] = s_total > 0 ? strength_num / s_total : 0.0;
    return f;
}

} // namespace gbmos
