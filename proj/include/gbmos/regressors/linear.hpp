#pragma once

// Linear least squares with optional ridge (l2) or lasso (l1) penalty.
//
// Features are standardized internally (population mean and standard
// deviation); penalties act on the standardized coefficients and the
// intercept is never penalized. Objectives in standardized units:
//   none: ||r||^2
//   l2:   ||r||^2 + lambda ||b||^2             (closed form)
//   l1:   ||r||^2 / (2n) + lambda ||b||_1      (cyclic coordinate descent)
// Stored coefficients are converted back to original units, so that
// prediction = intercept + sum(coef * x).

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gbmos/core/error.hpp"
#include "gbmos/regressors/dataset.hpp"

namespace gbmos {

enum class Penalty { None, L1, L2 };

inline std::string to_string(Penalty p) {
    switch (p) {
    case Penalty::None: return "none";
    case Penalty::L1: return "l1";
    case Penalty::L2: return "l2";
    }
    return "none";
}

inline Penalty parse_penalty(const std::string& s) {
    if (s == "none") return Penalty::None;
    if (s == "l1") return Penalty::L1;
    if (s == "l2") return Penalty::L2;
    throw ParameterError("unknown penalty '" + s + "' (none, l1, l2)");
}

struct LinearParams {
    Penalty penalty = Penalty::None;
    double lambda = 1.0;
    int max_iter = 1000;
    double tol = 1e-8;
};

struct LinearModel {
    LinearParams params;
    std::vector<double> coef;
    double intercept = 0;
    std::vector<double> mean, scale;  // standardization
    std::vector<double> std_coef;     // coefficients on standardized features
    int iterations = 0;               // coordinate-descent sweeps (l1)

    double predict_row(std::span<const double> x) const {
        double s = intercept;
        for (std::size_t j = 0; j < coef.size(); ++j) s += coef[j] * x[j];
        return s;
    }

    std::vector<double> importance() const {
        std::vector<double> out(std_coef.size());
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::fabs(std_coef[j]);
        return out;
    }
};

inline LinearModel train_linear(const Matrix& x, std::span<const double> y, const LinearParams& params = {}) {
    check_training_data(x, y, 1);
    if (params.penalty != Penalty::None && !(params.lambda >= 0)) throw ParameterError("penalty strength must be non-negative");
    if (params.max_iter < 1) throw ParameterError("max_iter must be positive");
    const std::size_t n = x.rows, p = x.cols;
    LinearModel m;
    m.params = params;
    m.mean.assign(p, 0.0);
    m.scale.assign(p, 1.0);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0;
        for (std::size_t r = 0; r < n; ++r) s += x(r, j);
        m.mean[j] = s / static_cast<double>(n);
        double v = 0;
        for (std::size_t r = 0; r < n; ++r) v += (x(r, j) - m.mean[j]) * (x(r, j) - m.mean[j]);
        const double sd = std::sqrt(v / static_cast<double>(n));
        m.scale[j] = sd > 0 ? sd : 1.0;
    }
    Eigen::MatrixXd z(n, p);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < p; ++j) z(r, j) = (x(r, j) - m.mean[j]) / m.scale[j];
    double ymean = 0;
    for (double v : y) ymean += v;
    ymean /= static_cast<double>(n);
    Eigen::VectorXd yc(n);
    for (std::size_t r = 0; r < n; ++r) yc(r) = y[r] - ymean;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (params.penalty == Penalty::None) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(z);
        qr.setThreshold(1e-10);
        if (qr.rank() < static_cast<Eigen::Index>(p))
            throw DataError("singular design matrix for unpenalized least squares (rank " + std::to_string(qr.rank()) + " of " +
                            std::to_string(p) + "); use an l2 penalty");
        beta = qr.solve(yc);
    } else if (params.penalty == Penalty::L2) {
        Eigen::MatrixXd a = z.transpose() * z;
        a.diagonal().array() += params.lambda;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
        if (ldlt.info() != Eigen::Success) throw DataError("ridge system could not be factorized");
        beta = ldlt.solve(z.transpose() * yc);
    } else {
        const double dn = static_cast<double>(n);
        std::vector<double> col_sq(p);
        for (std::size_t j = 0; j < p; ++j) col_sq[j] = z.col(static_cast<Eigen::Index>(j)).squaredNorm() / dn;
        Eigen::VectorXd resid = yc;
        int it = 0;
        for (; it < params.max_iter; ++it) {
            double max_change = 0;
            for (std::size_t j = 0; j < p; ++j) {
                if (col_sq[j] == 0) continue;
                const auto jj = static_cast<Eigen::Index>(j);
                const double old = beta(jj);
                const double rho = z.col(jj).dot(resid) / dn + col_sq[j] * old;
                const double shrunk = std::copysign(std::max(std::fabs(rho) - params.lambda, 0.0), rho) / col_sq[j];
                if (shrunk != old) {
                    resid -= (shrunk - old) * z.col(jj);
                    beta(jj) = shrunk;
                    max_change = std::max(max_change, std::fabs(shrunk - old));
                }
            }
            if (max_change < params.tol) {
                ++it;
                break;
            }
        }
        m.iterations = it;
    }

    m.std_coef.assign(p, 0.0);
    m.coef.assign(p, 0.0);
    m.intercept = ymean;
    for (std::size_t j = 0; j < p; ++j) {
        m.std_coef[j] = beta(static_cast<Eigen::Index>(j));
        m.coef[j] = m.std_coef[j] / m.scale[j];
        m.intercept -= m.coef[j] * m.mean[j];
    }
    return m;
}

} // namespace gbmos
