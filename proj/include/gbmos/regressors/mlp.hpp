#pragma once

// Fully connected network: ReLU hidden layers, identity output, mean squared
// error. Inputs and targets are standardized internally (population moments)
// and predictions are mapped back to target units.
//
// Initialization is He-uniform, U(-sqrt(6/fan_in), sqrt(6/fan_in)), with zero
// biases, drawn from derive_seed(seed, 0); mini-batch order per epoch comes
// from derive_seed(seed, 1).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gbmos/core/error.hpp"
#include "gbmos/core/rng.hpp"
#include "gbmos/regressors/dataset.hpp"

namespace gbmos {

enum class Optimizer { Sgd, Adam };

inline std::string to_string(Optimizer o) { return o == Optimizer::Sgd ? "sgd" : "adam"; }

inline Optimizer parse_optimizer(const std::string& s) {
    if (s == "sgd") return Optimizer::Sgd;
    if (s == "adam") return Optimizer::Adam;
    throw ParameterError("unknown optimizer '" + s + "' (sgd, adam)");
}

struct MlpParams {
    std::vector<std::size_t> hidden{32, 32, 16, 16, 8};
    std::size_t epochs = 200;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::size_t batch_size = 32;
    double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
};

struct MlpModel {
    MlpParams params;
    std::uint64_t seed = 0;
    std::vector<std::size_t> sizes; // input, hidden..., 1
    std::vector<Eigen::MatrixXd> weights; // layer l: sizes[l+1] x sizes[l]
    std::vector<Eigen::VectorXd> biases;
    std::vector<double> x_mean, x_scale;
    double y_mean = 0, y_scale = 1;
    std::vector<double> loss_history; // training loss per epoch, standardized units

    std::size_t parameter_count() const {
        std::size_t c = 0;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) c += (sizes[l] + 1) * sizes[l + 1];
        return c;
    }

    /// Flat parameter vector: per layer, weights row by row, then biases.
    std::vector<double> get_parameters() const {
        std::vector<double> out;
        out.reserve(parameter_count());
        for (std::size_t l = 0; l < weights.size(); ++l) {
            for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
                for (Eigen::Index c = 0; c < weights[l].cols(); ++c) out.push_back(weights[l](r, c));
            for (Eigen::Index r = 0; r < biases[l].size(); ++r) out.push_back(biases[l](r));
        }
        return out;
    }

    void set_parameters(std::span<const double> flat) {
        if (flat.size() != parameter_count()) throw ParameterError("parameter vector has the wrong length");
        std::size_t k = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) {
            for (Eigen::Index r = 0; r < weights[l].rows(); ++r)
                for (Eigen::Index c = 0; c < weights[l].cols(); ++c) weights[l](r, c) = flat[k++];
            for (Eigen::Index r = 0; r < biases[l].size(); ++r) biases[l](r) = flat[k++];
        }
    }

    /// Forward pass on standardized inputs (one column per sample).
    Eigen::MatrixXd forward(const Eigen::MatrixXd& z, std::vector<Eigen::MatrixXd>* activations = nullptr) const {
        Eigen::MatrixXd a = z;
        if (activations) activations->assign(1, a);
        for (std::size_t l = 0; l < weights.size(); ++l) {
            Eigen::MatrixXd next = (weights[l] * a).colwise() + biases[l];
            if (l + 1 < weights.size()) next = next.cwiseMax(0.0);
            a = std::move(next);
            if (activations) activations->push_back(a);
        }
        return a;
    }

    Eigen::MatrixXd standardize(const Matrix& x) const {
        if (x.cols != x_mean.size()) throw ParameterError("feature count differs from the trained network");
        Eigen::MatrixXd z(static_cast<Eigen::Index>(x.cols), static_cast<Eigen::Index>(x.rows));
        for (std::size_t r = 0; r < x.rows; ++r)
            for (std::size_t c = 0; c < x.cols; ++c)
                z(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = (x(r, c) - x_mean[c]) / x_scale[c];
        return z;
    }

    /// Mean squared error over the columns of `z` against standardized
    /// targets `t`, and its gradient in get_parameters() order.
    double loss_and_gradient(const Eigen::MatrixXd& z, const Eigen::RowVectorXd& t, std::vector<double>* grad) const {
        std::vector<Eigen::MatrixXd> acts;
        const Eigen::MatrixXd out = forward(z, &acts);
        const double b = static_cast<double>(z.cols());
        const Eigen::RowVectorXd diff = out.row(0) - t;
        const double loss = diff.squaredNorm() / b;
        if (!grad) return loss;
        std::vector<Eigen::MatrixXd> gw(weights.size());
        std::vector<Eigen::VectorXd> gb(weights.size());
        Eigen::MatrixXd delta = (2.0 / b) * diff;
        for (std::size_t l = weights.size(); l-- > 0;) {
            gw[l] = delta * acts[l].transpose();
            gb[l] = delta.rowwise().sum();
            if (l > 0) {
                delta = weights[l].transpose() * delta;
                delta = delta.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
            }
        }
        grad->clear();
        grad->reserve(parameter_count());
        for (std::size_t l = 0; l < weights.size(); ++l) {
            for (Eigen::Index r = 0; r < gw[l].rows(); ++r)
                for (Eigen::Index c = 0; c < gw[l].cols(); ++c) grad->push_back(gw[l](r, c));
            for (Eigen::Index r = 0; r < gb[l].size(); ++r) grad->push_back(gb[l](r));
        }
        return loss;
    }

    double predict_row(std::span<const double> x) const {
        Matrix one(1, x.size());
        std::copy(x.begin(), x.end(), one.data.begin());
        return forward(standardize(one))(0, 0) * y_scale + y_mean;
    }

    std::vector<double> predict(const Matrix& x) const {
        const Eigen::MatrixXd out = forward(standardize(x));
        std::vector<double> y(x.rows);
        for (std::size_t r = 0; r < x.rows; ++r) y[r] = out(0, static_cast<Eigen::Index>(r)) * y_scale + y_mean;
        return y;
    }
};

inline void validate(const MlpParams& p) {
    if (p.hidden.empty()) throw ParameterError("mlp needs at least one hidden layer");
    for (auto w : p.hidden)
        if (w < 1) throw ParameterError("hidden layer widths must be at least 1");
    if (!(p.learning_rate > 0)) throw ParameterError("learning rate must be positive");
    if (p.batch_size < 1) throw ParameterError("batch_size must be at least 1");
}

/// Network with the initial weights and the standardization of (x, y).
inline MlpModel init_mlp(const Matrix& x, std::span<const double> y, const MlpParams& params, std::uint64_t seed) {
    validate(params);
    MlpModel m;
    m.params = params;
    m.seed = seed;
    m.sizes.push_back(x.cols);
    m.sizes.insert(m.sizes.end(), params.hidden.begin(), params.hidden.end());
    m.sizes.push_back(1);
    const double n = static_cast<double>(x.rows);
    m.x_mean.assign(x.cols, 0.0);
    m.x_scale.assign(x.cols, 1.0);
    for (std::size_t c = 0; c < x.cols; ++c) {
        double s = 0, ss = 0;
        for (std::size_t r = 0; r < x.rows; ++r) s += x(r, c);
        m.x_mean[c] = s / n;
        for (std::size_t r = 0; r < x.rows; ++r) ss += (x(r, c) - m.x_mean[c]) * (x(r, c) - m.x_mean[c]);
        const double sd = std::sqrt(ss / n);
        if (sd > 0) m.x_scale[c] = sd;
    }
    double s = 0, ss = 0;
    for (double v : y) s += v;
    m.y_mean = s / n;
    for (double v : y) ss += (v - m.y_mean) * (v - m.y_mean);
    const double sd = std::sqrt(ss / n);
    m.y_scale = sd > 0 ? sd : 1.0;

    Rng rng(derive_seed(seed, 0));
    for (std::size_t l = 0; l + 1 < m.sizes.size(); ++l) {
        const auto in = static_cast<Eigen::Index>(m.sizes[l]), out = static_cast<Eigen::Index>(m.sizes[l + 1]);
        const double bound = std::sqrt(6.0 / static_cast<double>(in));
        Eigen::MatrixXd w(out, in);
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c) w(r, c) = rng.uniform(-bound, bound);
        m.weights.push_back(std::move(w));
        m.biases.push_back(Eigen::VectorXd::Zero(out));
    }
    return m;
}

inline MlpModel train_mlp(const Matrix& x, std::span<const double> y, const MlpParams& params, std::uint64_t seed) {
    check_training_data(x, y, 1);
    MlpModel m = init_mlp(x, y, params, seed);
    const std::size_t n = x.rows;
    const Eigen::MatrixXd z = m.standardize(x);
    Eigen::RowVectorXd t(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) t(static_cast<Eigen::Index>(r)) = (y[r] - m.y_mean) / m.y_scale;

    std::vector<double> theta = m.get_parameters(), grad;
    std::vector<double> mom(theta.size(), 0.0), vel(theta.size(), 0.0);
    std::size_t step = 0;
    Rng order_rng(derive_seed(seed, 1));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        order_rng.shuffle(order);
        double epoch_loss = 0;
        for (std::size_t start = 0; start < n; start += params.batch_size) {
            const std::size_t end = std::min(n, start + params.batch_size);
            Eigen::MatrixXd zb(z.rows(), static_cast<Eigen::Index>(end - start));
            Eigen::RowVectorXd tb(static_cast<Eigen::Index>(end - start));
            for (std::size_t i = start; i < end; ++i) {
                zb.col(static_cast<Eigen::Index>(i - start)) = z.col(static_cast<Eigen::Index>(order[i]));
                tb(static_cast<Eigen::Index>(i - start)) = t(static_cast<Eigen::Index>(order[i]));
            }
            const double loss = m.loss_and_gradient(zb, tb, &grad);
            epoch_loss += loss * static_cast<double>(end - start);
            ++step;
            if (params.optimizer == Optimizer::Sgd) {
                for (std::size_t k = 0; k < theta.size(); ++k) theta[k] -= params.learning_rate * grad[k];
            } else {
                const double c1 = 1.0 - std::pow(params.beta1, static_cast<double>(step));
                const double c2 = 1.0 - std::pow(params.beta2, static_cast<double>(step));
                for (std::size_t k = 0; k < theta.size(); ++k) {
                    mom[k] = params.beta1 * mom[k] + (1 - params.beta1) * grad[k];
                    vel[k] = params.beta2 * vel[k] + (1 - params.beta2) * grad[k] * grad[k];
                    theta[k] -= params.learning_rate * (mom[k] / c1) / (std::sqrt(vel[k] / c2) + params.epsilon);
                }
            }
            m.set_parameters(theta);
        }
        epoch_loss /= static_cast<double>(n);
        bool finite = std::isfinite(epoch_loss);
        for (double v : theta) finite = finite && std::isfinite(v);
        if (!finite) throw DataError("mlp training diverged at epoch " + std::to_string(epoch + 1));
        m.loss_history.push_back(epoch_loss);
    }
    return m;
}

} // namespace gbmos
