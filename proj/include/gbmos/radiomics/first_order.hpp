#pragma once

// First-order intensity statistics over raw ROI intensities. Entropy and
// uniformity use the discretized histogram. Variance, skewness and kurtosis
// are population moments; kurtosis is not excess. Skewness and kurtosis are
// 0 for a constant ROI.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/stats.hpp"
#include "gbmos/radiomics/discretize.hpp"
#include "gbmos/radiomics/features.hpp"

namespace gbmos {

inline std::vector<double> roi_intensities(const VoxelVolume& vol, const RoiMask& roi) {
    if (!vol.geometry.same_grid(roi.geometry)) throw ParameterError("volume and ROI grids differ");
    std::vector<double> x;
    for (std::size_t n = 0; n < roi.member.size(); ++n)
        if (roi.member[n]) x.push_back(vol.data[n]);
    return x;
}

inline FeatureMap first_order_features(const std::vector<double>& values, const DiscretizedRoi& disc, double voxel_volume) {
    if (values.empty()) throw DataError("empty ROI");
    std::vector<double> x = values;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());

    double sum = 0, sum_sq = 0;
    for (double v : x) {
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    double m2 = 0, m3 = 0, m4 = 0, mad = 0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        mad += std::fabs(d);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    const double p10 = stats::percentile_sorted(x, 10), p90 = stats::percentile_sorted(x, 90);
    double robust_sum = 0, robust_n = 0;
    for (double v : x)
        if (v >= p10 && v <= p90) {
            robust_sum += v;
            robust_n += 1;
        }
    const double robust_mean = robust_sum / robust_n;
    double robust_mad = 0;
    for (double v : x)
        if (v >= p10 && v <= p90) robust_mad += std::fabs(v - robust_mean);

    const auto hist = disc.histogram();
    double entropy = 0, uniformity = 0;
    const double total = static_cast<double>(disc.count);
    for (std::size_t l = 1; l < hist.size(); ++l) {
        const double p = static_cast<double>(hist[l]) / total;
        entropy += detail::entropy_term(p);
        uniformity += p * p;
    }

    FeatureMap f;
    f["10Percentile"] = p10;
    f["90Percentile"] = p90;
    f["Energy"] = sum_sq;
    f["Entropy"] = entropy;
    f["InterquartileRange"] = stats::percentile_sorted(x, 75) - stats::percentile_sorted(x, 25);
    f["Kurtosis"] = m2 > 0 ? m4 / (m2 * m2) : 0.0;
    f["Maximum"] = x.back();
    f["Mean"] = mean;
    f["MeanAbsoluteDeviation"] = mad / n;
    f["Median"] = stats::percentile_sorted(x, 50);
    f["Minimum"] = x.front();
    f["Range"] = x.back() - x.front();
    f["RobustMeanAbsoluteDeviation"] = robust_mad / robust_n;
    f["RootMeanSquared"] = std::sqrt(sum_sq / n);
    f["Skewness"] = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
    f["TotalEnergy"] = sum_sq * voxel_volume;
    f["Uniformity"] = uniformity;
    f["Variance"] = m2;
    return f;
}

inline FeatureMap first_order_features(const VoxelVolume& vol, const RoiMask& roi, const DiscretizedRoi& disc) {
    return first_order_features(roi_intensities(vol, roi), disc, roi.geometry.voxel_volume());
}

} // namespace gbmos
