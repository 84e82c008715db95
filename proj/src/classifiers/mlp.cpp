#include <algorithm>
#include <cmath>
#include <numeric>

#include "har/classifiers.hpp"
#include "har/rng.hpp"

namespace har {

namespace {

struct Activations {
    std::vector<double> pre;     // hidden pre-activations
    std::vector<double> hidden;  // ReLU outputs
    std::vector<double> logits;
};

Activations run_forward(const MlpWeights& w, std::span<const double> x) {
    const std::size_t H = w.w1.rows(), C = w.w2.rows();
    if (x.size() != w.w1.cols()) throw Error("mlp: input dimension mismatch");
    Activations a;
    a.pre.assign(w.b1.begin(), w.b1.end());
    for (std::size_t h = 0; h < H; ++h) {
        const auto row = w.w1.row(h);
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) acc += row[j] * x[j];
        a.pre[h] += acc;
    }
    a.hidden.resize(H);
    for (std::size_t h = 0; h < H; ++h) a.hidden[h] = a.pre[h] > 0.0 ? a.pre[h] : 0.0;
    a.logits.assign(w.b2.begin(), w.b2.end());
    for (std::size_t c = 0; c < C; ++c) {
        const auto row = w.w2.row(c);
        double acc = 0.0;
        for (std::size_t h = 0; h < H; ++h) acc += row[h] * a.hidden[h];
        a.logits[c] += acc;
    }
    return a;
}

void init_uniform(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (auto& v : m.data()) v = uniform(rng, -limit, limit);
}

void axpy(std::vector<double>& y, const std::vector<double>& x, double a) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

}  // namespace

std::vector<double> MlpWeights::forward(std::span<const double> x) const {
    auto a = run_forward(*this, x);
    softmax_inplace(a.logits);
    return a.logits;
}

double mlp_objective(const MlpWeights& w, const TrainingSet& ts, std::span<const std::size_t> rows,
                     MlpWeights* grad) {
    if (rows.empty()) throw Error("mlp: empty batch");
    const std::size_t d = w.w1.cols(), H = w.w1.rows(), C = w.w2.rows();
    if (grad) *grad = MlpWeights(d, H, C);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    std::vector<double> dhidden(H);
    double loss = 0.0;
    for (std::size_t r : rows) {
        const auto x = ts.x().row(r);
        const std::size_t y = ts.class_index()[r];
        auto a = run_forward(w, x);
        const double top = *std::max_element(a.logits.begin(), a.logits.end());
        double sum = 0.0;
        for (double v : a.logits) sum += std::exp(v - top);
        loss += top + std::log(sum) - a.logits[y];
        if (!grad) continue;

        softmax_inplace(a.logits);
        std::fill(dhidden.begin(), dhidden.end(), 0.0);
        for (std::size_t c = 0; c < C; ++c) {
            const double dz = (a.logits[c] - (c == y ? 1.0 : 0.0)) * inv_n;
            grad->b2[c] += dz;
            auto g2 = grad->w2.row(c);
            const auto w2 = w.w2.row(c);
            for (std::size_t h = 0; h < H; ++h) {
                g2[h] += dz * a.hidden[h];
                dhidden[h] += dz * w2[h];
            }
        }
        for (std::size_t h = 0; h < H; ++h) {
            if (a.pre[h] <= 0.0) continue;
            grad->b1[h] += dhidden[h];
            auto g1 = grad->w1.row(h);
            for (std::size_t j = 0; j < d; ++j) g1[j] += dhidden[h] * x[j];
        }
    }
    return loss * inv_n;
}

MultilayerPerceptron::MultilayerPerceptron(std::vector<int> classes, MlpWeights weights, MlpParams params,
                                           std::vector<double> loss_history)
    : Classifier(std::move(classes)),
      weights_(std::move(weights)),
      params_(params),
      loss_history_(std::move(loss_history)) {}

std::vector<double> MultilayerPerceptron::predict_proba(std::span<const double> x) const {
    return weights_.forward(x);
}

MultilayerPerceptron train_mlp(const TrainingSet& ts, const MlpParams& params) {
    if (params.hidden < 1 || !(params.lr > 0.0) || params.epochs < 1 || params.batch < 1) {
        throw Error("mlp: invalid hyperparameters");
    }
    const std::size_t d = ts.dim(), H = params.hidden, C = ts.n_classes(), m = ts.rows();
    Rng rng(params.seed);
    MlpWeights w(d, H, C);
    init_uniform(w.w1, d, H, rng);
    init_uniform(w.w2, H, C, rng);

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    auto full_loss = [&](std::size_t epoch) {
        const double loss = mlp_objective(w, ts, order);
        if (!std::isfinite(loss)) {
            throw Error("mlp: non-finite loss at epoch " + std::to_string(epoch) + " (learning rate too high?)");
        }
        return loss;
    };
    std::vector<double> history{full_loss(0)};

    MlpWeights grad;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        shuffle(std::span<std::size_t>(order), rng);
        for (std::size_t start = 0; start < m; start += params.batch) {
            const std::size_t end = std::min(m, start + params.batch);
            mlp_objective(w, ts, std::span<const std::size_t>(order).subspan(start, end - start), &grad);
            axpy(w.w1.data(), grad.w1.data(), -params.lr);
            axpy(w.b1, grad.b1, -params.lr);
            axpy(w.w2.data(), grad.w2.data(), -params.lr);
            axpy(w.b2, grad.b2, -params.lr);
        }
        history.push_back(full_loss(epoch + 1));
    }
    return MultilayerPerceptron(ts.classes(), std::move(w), params, std::move(history));
}

}  // namespace har
