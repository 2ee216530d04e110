#pragma once

// Gray-level co-occurrence: symmetric pair counts at distance 1 along each of
// the 13 directions. Features are computed per direction on the normalized
// matrix and averaged over directions that contain at least one pair.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gbmos/core/error.hpp"
#include "gbmos/radiomics/discretize.hpp"
#include "gbmos/radiomics/features.hpp"

namespace gbmos {

/// Raw symmetric co-occurrence counts, one Ng x Ng row-major matrix per
/// direction (index (i-1) * Ng + (j-1)).
inline std::vector<std::vector<double>> glcm_matrices(const DiscretizedRoi& d) {
    const auto ng = static_cast<std::size_t>(d.ng);
    std::vector<std::vector<double>> out;
    for (const auto& dir : detail::directions13()) {
        std::vector<double> m(ng * ng, 0.0);
        for (std::int64_t z = 0; z < d.dims[2]; ++z)
            for (std::int64_t y = 0; y < d.dims[1]; ++y)
                for (std::int64_t x = 0; x < d.dims[0]; ++x) {
                    const int a = d.levels[d.linear(x, y, z)];
                    if (!a) continue;
                    const int b = d.at(x + dir[0], y + dir[1], z + dir[2]);
                    if (!b) continue;
                    m[(a - 1) * ng + (b - 1)] += 1;
                    m[(b - 1) * ng + (a - 1)] += 1;
                }
        out.push_back(std::move(m));
    }
    return out;
}

namespace detail {

/// Maximal correlation coefficient of a normalized symmetric matrix.
inline double glcm_mcc(const std::vector<double>& p, const std::vector<double>& px, std::size_t ng) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < ng; ++i)
        if (px[i] > 0) present.push_back(i);
    const auto m = present.size();
    if (m < 2) return 1.0;
    Eigen::MatrixXd a(m, m);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c)
            a(r, c) = p[present[r] * ng + present[c]] / std::sqrt(px[present[r]] * px[present[c]]);
    // Q = Dx^-1 P Dy^-1 P^T is similar to A A^T.
    const Eigen::MatrixXd q = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues(); // ascending
    return std::sqrt(std::max(0.0, ev(static_cast<Eigen::Index>(m) - 2)));
}

inline FeatureMap glcm_single(const std::vector<double>& counts, std::size_t ng) {
    double total = 0;
    for (double c : counts) total += c;
    std::vector<double> p(counts.size());
    for (std::size_t n = 0; n < p.size(); ++n) p[n] = counts[n] / total;

    std::vector<double> px(ng, 0.0), sum_dist(2 * ng + 1, 0.0), diff_dist(ng, 0.0);
    for (std::size_t i = 0; i < ng; ++i)
        for (std::size_t j = 0; j < ng; ++j) {
            const double v = p[i * ng + j];
            px[i] += v;
            sum_dist[i + j + 2] += v;
            diff_dist[i > j ? i - j : j - i] += v;
        }
    const auto& py = px; // symmetric
    double mu = 0, sigma2 = 0;
    for (std::size_t i = 0; i < ng; ++i) mu += static_cast<double>(i + 1) * px[i];
    for (std::size_t i = 0; i < ng; ++i) sigma2 += (static_cast<double>(i + 1) - mu) * (static_cast<double>(i + 1) - mu) * px[i];

    double autocorr = 0, prominence = 0, shade = 0, tendency = 0, contrast = 0, energy = 0, hxy = 0, hxy1 = 0, hxy2 = 0;
    double idm = 0, idmn = 0, id = 0, idn = 0, maxp = 0;
    const double g = static_cast<double>(ng);
    for (std::size_t i = 0; i < ng; ++i)
        for (std::size_t j = 0; j < ng; ++j) {
            const double v = p[i * ng + j];
            const double li = static_cast<double>(i + 1), lj = static_cast<double>(j + 1);
            const double s = li + lj - 2 * mu, dd = li - lj, ad = std::fabs(dd);
            const double pp = px[i] * py[j];
            if (pp > 0) hxy2 -= pp * std::log2(pp);
            if (v <= 0) continue;
            autocorr += v * li * lj;
            prominence += v * s * s * s * s;
            shade += v * s * s * s;
            tendency += v * s * s;
            contrast += v * dd * dd;
            energy += v * v;
            hxy -= v * std::log2(v);
            hxy1 -= v * std::log2(pp);
            idm += v / (1 + dd * dd);
            idmn += v / (1 + dd * dd / (g * g));
            id += v / (1 + ad);
            idn += v / (1 + ad / g);
            maxp = std::max(maxp, v);
        }
    double hx = 0;
    for (double v : px) hx += entropy_term(v);

    double diff_avg = 0, diff_ent = 0, inv_var = 0;
    for (std::size_t k = 0; k < ng; ++k) {
        diff_avg += static_cast<double>(k) * diff_dist[k];
        diff_ent += entropy_term(diff_dist[k]);
        if (k > 0) inv_var += diff_dist[k] / static_cast<double>(k * k);
    }
    double diff_var = 0;
    for (std::size_t k = 0; k < ng; ++k) diff_var += (static_cast<double>(k) - diff_avg) * (static_cast<double>(k) - diff_avg) * diff_dist[k];
    double sum_avg = 0, sum_ent = 0;
    for (std::size_t k = 2; k < sum_dist.size(); ++k) {
        sum_avg += static_cast<double>(k) * sum_dist[k];
        sum_ent += entropy_term(sum_dist[k]);
    }

    FeatureMap f;
    f["Autocorrelation"] = autocorr;
    f["ClusterProminence"] = prominence;
    f["ClusterShade"] = shade;
    f["ClusterTendency"] = tendency;
    f["Contrast"] = contrast;
    f["Correlation"] = sigma2 > 0 ? (autocorr - mu * mu) / sigma2 : 1.0;
    f["DifferenceAverage"] = diff_avg;
    f["DifferenceEntropy"] = diff_ent;
    f["DifferenceVariance"] = diff_var;
    f["Id"] = id;
    f["Idm"] = idm;
    f["Idmn"] = idmn;
    f["Idn"] = idn;
    f["Imc1"] = hx > 0 ? (hxy - hxy1) / hx : 0.0;
    f["Imc2"] = hxy > hxy2 ? 0.0 : std::sqrt(std::max(0.0, 1 - std::exp(-2 * (hxy2 - hxy))));
    f["InverseVariance"] = inv_var;
    f["JointAverage"] = mu;
    f["JointEnergy"] = energy;
    f["JointEntropy"] = hxy;
    f["MCC"] = glcm_mcc(p, px, ng);
    f["MaximumProbability"] = maxp;
    f["SumAverage"] = sum_avg;
    f["SumEntropy"] = sum_ent;
    f["SumSquares"] = sigma2;
    return f;
}

/// Arithmetic mean of per-direction feature maps.
inline FeatureMap average_maps(const std::vector<FeatureMap>& maps) {
    FeatureMap out = maps.front();
    for (auto& [name, v] : out) {
        v = 0;
        for (const auto& m : maps) v += m.at(name);
        v /= static_cast<double>(maps.size());
    }
    return out;
}

} // namespace detail

/// Features of each direction, in directions13() order; empty for
/// directions without pairs.
inline std::vector<std::optional<FeatureMap>> glcm_direction_features(const DiscretizedRoi& d) {
    if (d.count == 0) throw DataError("empty ROI");
    std::vector<std::optional<FeatureMap>> out;
    for (const auto& m : glcm_matrices(d)) {
        double total = 0;
        for (double c : m) total += c;
        if (total > 0) out.emplace_back(detail::glcm_single(m, static_cast<std::size_t>(d.ng)));
        else out.emplace_back();
    }
    return out;
}

inline FeatureMap glcm_features(const DiscretizedRoi& d) {
    std::vector<FeatureMap> per_dir;
    for (auto& f : glcm_direction_features(d))
        if (f) per_dir.push_back(std::move(*f));
    if (per_dir.empty()) throw DataError("no co-occurrences");
    return detail::average_maps(per_dir);
}

} // namespace gbmos
