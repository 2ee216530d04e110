#pragma once

// Shared feature formulas for the (gray level x size) matrices: run lengths,
// zone sizes and dependence counts. Column j is 1-based.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gbmos/radiomics/features.hpp"

namespace gbmos {

struct SizeMatrix {
    std::size_t ng = 0, nj = 0;
    std::vector<std::uint64_t> counts; // (i-1) * nj + (j-1)

    SizeMatrix() = default;
    SizeMatrix(std::size_t levels, std::size_t sizes) : ng(levels), nj(sizes), counts(levels * sizes, 0) {}

    std::uint64_t& at(std::size_t i, std::size_t j) { return counts[(i - 1) * nj + (j - 1)]; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return counts[(i - 1) * nj + (j - 1)]; }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto c : counts) t += c;
        return t;
    }
    /// Sum of count * j; equals the voxel count for runs and zones.
    std::uint64_t weighted_total() const {
        std::uint64_t t = 0;
        for (std::size_t i = 1; i <= ng; ++i)
            for (std::size_t j = 1; j <= nj; ++j) t += at(i, j) * j;
        return t;
    }
};

namespace detail {

enum SizeFeature {
    kSmallEmph,
    kLargeEmph,
    kGlNonUni,
    kGlNonUniNorm,
    kSizeNonUni,
    kSizeNonUniNorm,
    kPercentage,
    kGlVariance,
    kSizeVariance,
    kEntropy,
    kLowGl,
    kHighGl,
    kSmallLowGl,
    kSmallHighGl,
    kLargeLowGl,
    kLargeHighGl,
    kSizeFeatureCount
};

using SizeFeatureNames = std::array<const char*, kSizeFeatureCount>;

/// Features of one matrix; names set to nullptr are omitted.
inline FeatureMap size_matrix_features(const SizeMatrix& m, double n_voxels, const SizeFeatureNames& names) {
    const double nz = static_cast<double>(m.total());
    std::vector<double> row(m.ng + 1, 0.0), col(m.nj + 1, 0.0);
    double se = 0, le = 0, lgl = 0, hgl = 0, slgl = 0, shgl = 0, llgl = 0, lhgl = 0;
    for (std::size_t i = 1; i <= m.ng; ++i)
        for (std::size_t j = 1; j <= m.nj; ++j) {
            const double c = static_cast<double>(m.at(i, j));
            if (c == 0) continue;
            const double i2 = static_cast<double>(i * i), j2 = static_cast<double>(j * j);
            row[i] += c;
            col[j] += c;
            se += c / j2;
            le += c * j2;
            lgl += c / i2;
            hgl += c * i2;
            slgl += c / (i2 * j2);
            shgl += c * i2 / j2;
            llgl += c * j2 / i2;
            lhgl += c * i2 * j2;
        }
    double gln = 0, sn = 0, mu_i = 0, mu_j = 0, entropy = 0;
    for (std::size_t i = 1; i <= m.ng; ++i) {
        gln += row[i] * row[i];
        mu_i += static_cast<double>(i) * row[i] / nz;
    }
    for (std::size_t j = 1; j <= m.nj; ++j) {
        sn += col[j] * col[j];
        mu_j += static_cast<double>(j) * col[j] / nz;
    }
    double var_i = 0, var_j = 0;
    for (std::size_t i = 1; i <= m.ng; ++i)
        for (std::size_t j = 1; j <= m.nj; ++j) {
            const double p = static_cast<double>(m.at(i, j)) / nz;
            if (p == 0) continue;
            var_i += p * (static_cast<double>(i) - mu_i) * (static_cast<double>(i) - mu_i);
            var_j += p * (static_cast<double>(j) - mu_j) * (static_cast<double>(j) - mu_j);
            entropy += entropy_term(p);
        }
    const std::array<double, kSizeFeatureCount> v{se / nz,  le / nz,     gln / nz,  gln / (nz * nz), sn / nz,   sn / (nz * nz),
                                                  nz / n_voxels, var_i, var_j, entropy, lgl / nz, hgl / nz,
                                                  slgl / nz, shgl / nz, llgl / nz, lhgl / nz};
    FeatureMap f;
    for (std::size_t k = 0; k < kSizeFeatureCount; ++k)
        if (names[k]) f[names[k]] = v[k];
    return f;
}

} // namespace detail
} // namespace gbmos
