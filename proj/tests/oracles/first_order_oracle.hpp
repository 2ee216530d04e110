#pragma once

// Straight-line first-order statistics in long double, with its own
// percentile routine.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

inline long double pct(std::vector<long double> v, double q) {
    std::sort(v.begin(), v.end());
    const long double h = (v.size() - 1) * (q / 100.0L);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - lo) * (v[lo + 1] - v[lo]);
}

inline std::map<std::string, double> first_order(const std::vector<double>& xs, const std::vector<int>& levels, double voxel_volume) {
    std::vector<long double> x(xs.begin(), xs.end());
    const long double n = x.size();
    long double s = 0, s2 = 0;
    for (auto v : x) {
        s += v;
        s2 += v * v;
    }
    const long double mean = s / n;
    long double c2 = 0, c3 = 0, c4 = 0, ad = 0;
    for (auto v : x) {
        c2 += std::pow(v - mean, 2);
        c3 += std::pow(v - mean, 3);
        c4 += std::pow(v - mean, 4);
        ad += std::fabs(v - mean);
    }
    c2 /= n;
    c3 /= n;
    c4 /= n;
    const long double p10 = pct(x, 10), p90 = pct(x, 90);
    std::vector<long double> mid;
    for (auto v : x)
        if (v >= p10 && v <= p90) mid.push_back(v);
    long double mm = 0;
    for (auto v : mid) mm += v;
    mm /= mid.size();
    long double rmad = 0;
    for (auto v : mid) rmad += std::fabs(v - mm);
    rmad /= mid.size();

    std::map<int, long double> hist;
    for (int l : levels) hist[l] += 1;
    long double ent = 0, uni = 0;
    for (auto& [l, c] : hist) {
        const long double p = c / levels.size();
        ent -= p * std::log2(p);
        uni += p * p;
    }
    std::map<std::string, double> f;
    f["Energy"] = s2;
    f["TotalEnergy"] = s2 * voxel_volume;
    f["Entropy"] = ent;
    f["Minimum"] = *std::min_element(x.begin(), x.end());
    f["Maximum"] = *std::max_element(x.begin(), x.end());
    f["10Percentile"] = p10;
    f["90Percentile"] = p90;
    f["Mean"] = mean;
    f["Median"] = pct(x, 50);
    f["InterquartileRange"] = pct(x, 75) - pct(x, 25);
    f["Range"] = f["Maximum"] - f["Minimum"];
    f["MeanAbsoluteDeviation"] = ad / n;
    f["RobustMeanAbsoluteDeviation"] = rmad;
    f["RootMeanSquared"] = std::sqrt(s2 / n);
    f["Variance"] = c2;
    f["Skewness"] = c2 == 0 ? 0.0L : c3 / std::pow(c2, 1.5L);
    f["Kurtosis"] = c2 == 0 ? 0.0L : c4 / (c2 * c2);
    f["Uniformity"] = uni;
    return f;
}

} // namespace oracle
