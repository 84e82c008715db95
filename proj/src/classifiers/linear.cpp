// Logistic regression and one-vs-rest linear SVM, both trained by full-batch descent.

#include <algorithm>
#include <cmath>

#include "har/classifiers.hpp"

namespace har {

namespace {

void require_finite(double loss, const char* model, std::size_t epoch) {
    if (!std::isfinite(loss)) {
        throw Error(std::string(model) + ": non-finite loss at epoch " + std::to_string(epoch) +
                    " (learning rate too high?)");
    }
}

void descend(LinearWeights& w, const LinearWeights& grad, double lr) {
    auto& wd = w.w.data();
    const auto& gd = grad.w.data();
    for (std::size_t i = 0; i < wd.size(); ++i) wd[i] -= lr * gd[i];
    for (std::size_t c = 0; c < w.b.size(); ++c) w.b[c] -= lr * grad.b[c];
}

double half_sq_norm(const Matrix& w) {
    double acc = 0.0;
    for (double v : w.data()) acc += v * v;
    return 0.5 * acc;
}

}  // namespace

double logreg_objective(const LinearWeights& weights, const TrainingSet& ts, double l2, LinearWeights* grad) {
    const std::size_t m = ts.rows(), d = ts.dim(), C = weights.b.size();
    if (grad) *grad = LinearWeights(C, d);
    const double inv_m = 1.0 / static_cast<double>(m);
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto x = ts.x().row(i);
        auto z = weights.scores(x);
        const std::size_t y = ts.class_index()[i];
        const double top = *std::max_element(z.begin(), z.end());
        double sum = 0.0;
        for (double v : z) sum += std::exp(v - top);
        loss += top + std::log(sum) - z[y];
        if (!grad) continue;
        softmax_inplace(z);
        for (std::size_t c = 0; c < C; ++c) {
            const double delta = (z[c] - (c == y ? 1.0 : 0.0)) * inv_m;
            auto g = grad->w.row(c);
            for (std::size_t j = 0; j < d; ++j) g[j] += delta * x[j];
            grad->b[c] += delta;
        }
    }
    loss = loss * inv_m + l2 * half_sq_norm(weights.w);
    if (grad) {
        auto& gd = grad->w.data();
        const auto& wd = weights.w.data();
        for (std::size_t i = 0; i < gd.size(); ++i) gd[i] += l2 * wd[i];
    }
    return loss;
}

LogisticRegression::LogisticRegression(std::vector<int> classes, LinearWeights weights, LogRegParams params,
                                       std::vector<double> loss_history)
    : Classifier(std::move(classes)),
      weights_(std::move(weights)),
      params_(params),
      loss_history_(std::move(loss_history)) {}

std::vector<double> LogisticRegression::predict_proba(std::span<const double> x) const {
    auto z = weights_.scores(x);
    softmax_inplace(z);
    return z;
}

LogisticRegression train_logistic_regression(const TrainingSet& ts, const LogRegParams& params) {
    if (!(params.lr > 0.0) || params.epochs < 1 || !(params.l2 >= 0.0)) throw Error("logreg: invalid hyperparameters");
    LinearWeights w(ts.n_classes(), ts.dim());
    LinearWeights grad;
    std::vector<double> history;
    history.reserve(params.epochs + 1);
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        const double loss = logreg_objective(w, ts, params.l2, &grad);
        require_finite(loss, "logreg", epoch);
        history.push_back(loss);
        descend(w, grad, params.lr);
    }
    const double final_loss = logreg_objective(w, ts, params.l2);
    require_finite(final_loss, "logreg", params.epochs);
    history.push_back(final_loss);
    return LogisticRegression(ts.classes(), std::move(w), params, std::move(history));
}

double svm_objective(const LinearWeights& weights, const TrainingSet& ts, double l2, LinearWeights* grad) {
    const std::size_t m = ts.rows(), d = ts.dim(), C = weights.b.size();
    if (grad) *grad = LinearWeights(C, d);
    const double inv_m = 1.0 / static_cast<double>(m);
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto x = ts.x().row(i);
        const auto s = weights.scores(x);
        for (std::size_t c = 0; c < C; ++c) {
            const double y = ts.class_index()[i] == c ? 1.0 : -1.0;
            const double margin = y * s[c];
            if (margin >= 1.0) continue;
            loss += (1.0 - margin) * inv_m;
            if (!grad) continue;
            auto g = grad->w.row(c);
            for (std::size_t j = 0; j < d; ++j) g[j] -= y * x[j] * inv_m;
            grad->b[c] -= y * inv_m;
        }
    }
    loss += l2 * half_sq_norm(weights.w);
    if (grad) {
        auto& gd = grad->w.data();
        const auto& wd = weights.w.data();
        for (std::size_t i = 0; i < gd.size(); ++i) gd[i] += l2 * wd[i];
    }
    return loss;
}

LinearSvm::LinearSvm(std::vector<int> classes, LinearWeights weights, LinearSvmParams params)
    : Classifier(std::move(classes)), weights_(std::move(weights)), params_(params) {}

std::vector<double> LinearSvm::predict_proba(std::span<const double> x) const {
    auto z = weights_.scores(x);
    softmax_inplace(z);
    return z;
}

LinearSvm train_linear_svm_ovr(const TrainingSet& ts, const LinearSvmParams& params) {
    if (!(params.lr > 0.0) || params.epochs < 1 || !(params.l2 >= 0.0)) throw Error("linsvm: invalid hyperparameters");
    LinearWeights w(ts.n_classes(), ts.dim());
    LinearWeights grad;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        const double loss = svm_objective(w, ts, params.l2, &grad);
        require_finite(loss, "linsvm", epoch);
        descend(w, grad, params.lr);
    }
    require_finite(svm_objective(w, ts, params.l2), "linsvm", params.epochs);
    return LinearSvm(ts.classes(), std::move(w), params);
}

}  // namespace har
