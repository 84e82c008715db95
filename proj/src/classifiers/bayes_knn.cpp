#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "har/classifiers.hpp"

namespace har {

GaussianNaiveBayes::GaussianNaiveBayes(std::vector<int> classes, std::vector<double> priors, Matrix means,
                                       Matrix variances, GaussianNbParams params)
    : Classifier(std::move(classes)),
      priors_(std::move(priors)),
      means_(std::move(means)),
      variances_(std::move(variances)),
      params_(params) {}

std::vector<double> GaussianNaiveBayes::predict_proba(std::span<const double> x) const {
    if (x.size() != means_.cols()) throw Error("gnb: input dimension mismatch");
    const std::size_t C = priors_.size();
    std::vector<double> logp(C);
    for (std::size_t c = 0; c < C; ++c) {
        double acc = std::log(priors_[c]);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double var = variances_(c, j);
            const double d = x[j] - means_(c, j);
            acc -= 0.5 * std::log(2.0 * std::numbers::pi * var) + d * d / (2.0 * var);
        }
        logp[c] = acc;
    }
    softmax_inplace(logp);  // log-sum-exp normalisation
    return logp;
}

GaussianNaiveBayes train_gaussian_nb(const TrainingSet& ts, const GaussianNbParams& params) {
    if (!(params.var_floor > 0.0)) throw Error("gnb: var_floor must be > 0");
    const std::size_t C = ts.n_classes(), d = ts.dim(), m = ts.rows();
    std::vector<double> counts(C, 0.0);
    Matrix means(C, d), vars(C, d);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t c = ts.class_index()[i];
        counts[c] += 1.0;
        const auto x = ts.x().row(i);
        for (std::size_t j = 0; j < d; ++j) means(c, j) += x[j];
    }
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t j = 0; j < d; ++j) means(c, j) /= counts[c];
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t c = ts.class_index()[i];
        const auto x = ts.x().row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = x[j] - means(c, j);
            vars(c, j) += dv * dv;
        }
    }
    std::vector<double> priors(C);
    for (std::size_t c = 0; c < C; ++c) {
        priors[c] = counts[c] / static_cast<double>(m);
        for (std::size_t j = 0; j < d; ++j) vars(c, j) = std::max(vars(c, j) / counts[c], params.var_floor);
    }
    return GaussianNaiveBayes(ts.classes(), std::move(priors), std::move(means), std::move(vars), params);
}

std::vector<double> knn_predict(const TrainingSet& ts, std::span<const double> x, std::size_t k, bool weighted) {
    const std::size_t m = ts.rows();
    if (k < 1 || k > m) {
        throw Error("knn: k=" + std::to_string(k) + " must lie in [1, " + std::to_string(m) + "]");
    }
    if (x.size() != ts.dim()) throw Error("knn: input dimension mismatch");
    std::vector<std::pair<double, std::size_t>> dist(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto row = ts.x().row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double dv = row[j] - x[j];
            acc += dv * dv;
        }
        dist[i] = {std::sqrt(acc), i};
    }
    // (distance, index) ordering keeps training order among equal distances.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    std::vector<double> scores(ts.n_classes(), 0.0);
    for (std::size_t n = 0; n < k; ++n) {
        const double w = weighted ? 1.0 / (dist[n].first + 1e-9) : 1.0;
        scores[ts.class_index()[dist[n].second]] += w;
    }
    const double total = std::accumulate(scores.begin(), scores.end(), 0.0);
    for (auto& s : scores) s /= total;
    return scores;
}

KNearestNeighbors::KNearestNeighbors(TrainingSet ts, KnnParams params)
    : Classifier(ts.classes()), ts_(std::move(ts)), params_(params) {}

std::vector<double> KNearestNeighbors::predict_proba(std::span<const double> x) const {
    return knn_predict(ts_, x, std::min(params_.k, ts_.rows()), params_.weighted);
}

KNearestNeighbors train_knn(const TrainingSet& ts, const KnnParams& params) {
    if (params.k < 1) throw Error("knn: k must be >= 1");
    return KNearestNeighbors(ts, params);
}

}  // namespace har
