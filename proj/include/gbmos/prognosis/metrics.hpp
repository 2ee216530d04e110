#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gbmos/core/error.hpp"
#include "gbmos/core/stats.hpp"
#include "gbmos/prognosis/survival.hpp"

namespace gbmos {

/// Pearson correlation of average ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ParameterError("spearman: vectors differ in length");
    if (x.size() < 2) throw DataError("spearman needs at least 2 observations");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DataError("spearman: non-finite value");
    const auto rx = stats::average_ranks(x), ry = stats::average_ranks(y);
    const double mx = stats::mean(rx), my = stats::mean(ry);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) throw DataError("undefined correlation");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct Metrics {
    double accuracy = 0;
    double mse = 0;       // days^2
    double median_se = 0; // days^2
    double std_se = 0;    // days^2, population
    double spearman_r = 0;
    std::size_t n = 0;
};

inline Metrics evaluate(std::span<const double> pred, std::span<const double> truth, const SurvivalThresholds& t = {}) {
    if (pred.size() != truth.size()) throw ParameterError("evaluate: prediction and truth differ in length");
    if (pred.size() < 2) throw DataError("evaluate needs at least 2 subjects");
    Metrics m;
    m.n = pred.size();
    std::vector<double> se(m.n);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < m.n; ++i) {
        se[i] = (pred[i] - truth[i]) * (pred[i] - truth[i]);
        if (bin_survival(pred[i], t) == bin_survival(truth[i], t)) ++correct;
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n);
    m.mse = stats::mean(se);
    m.median_se = stats::median(se);
    m.std_se = std::sqrt(stats::variance(se));
    m.spearman_r = spearman(pred, truth);
    return m;
}

} // namespace gbmos
