#include "har/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "har/common.hpp"

namespace har {

ConfusionCounts confusion_counts(std::span<const int> y_true, std::span<const int> y_pred, std::vector<int> classes) {
    if (y_true.size() != y_pred.size()) {
        throw Error("confusion_counts: " + std::to_string(y_true.size()) + " true labels vs " +
                    std::to_string(y_pred.size()) + " predictions");
    }
    if (classes.empty()) {
        std::set<int> all(y_true.begin(), y_true.end());
        all.insert(y_pred.begin(), y_pred.end());
        all.erase(kAbstain);
        classes.assign(all.begin(), all.end());
    }
    ConfusionCounts out;
    out.classes = std::move(classes);
    const std::size_t C = out.classes.size();
    out.tp.assign(C, 0);
    out.fp.assign(C, 0);
    out.tn.assign(C, 0);
    out.fn.assign(C, 0);
    out.total = static_cast<long>(y_true.size());
    for (std::size_t c = 0; c < C; ++c) {
        const int k = out.classes[c];
        for (std::size_t i = 0; i < y_true.size(); ++i) {
            const bool t = y_true[i] == k, p = y_pred[i] == k;
            if (t && p) ++out.tp[c];
            else if (!t && p) ++out.fp[c];
            else if (t && !p) ++out.fn[c];
            else ++out.tn[c];
        }
    }
    return out;
}

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
    if (y_true.size() != y_pred.size()) throw Error("accuracy: length mismatch");
    if (y_true.empty()) throw Error("accuracy of an empty prediction set");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i] && y_true[i] != kAbstain;
    return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double accuracy(const ConfusionCounts& counts) {
    if (counts.total == 0) throw Error("accuracy of an empty prediction set");
    long hits = 0;
    for (long v : counts.tp) hits += v;
    return static_cast<double>(hits) / static_cast<double>(counts.total);
}

namespace {

double ratio(long num, long den) { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }

double per_class_f(const ConfusionCounts& c, std::size_t k) {
    const double p = ratio(c.tp[k], c.tp[k] + c.fp[k]);
    const double r = ratio(c.tp[k], c.tp[k] + c.fn[k]);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

template <class F>
double macro(const ConfusionCounts& c, F per_class) {
    if (c.size() == 0) throw Error("macro average over zero classes");
    double acc = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) acc += per_class(k);
    return acc / static_cast<double>(c.size());
}

}  // namespace

double macro_precision(const ConfusionCounts& c) {
    return macro(c, [&](std::size_t k) { return ratio(c.tp[k], c.tp[k] + c.fp[k]); });
}

double macro_recall(const ConfusionCounts& c) {
    return macro(c, [&](std::size_t k) { return ratio(c.tp[k], c.tp[k] + c.fn[k]); });
}

double macro_fscore(const ConfusionCounts& c) {
    return macro(c, [&](std::size_t k) { return per_class_f(c, k); });
}

std::vector<int> undefined_recall_classes(const ConfusionCounts& c) {
    std::vector<int> out;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c.tp[k] + c.fn[k] == 0) out.push_back(c.classes[k]);
    }
    return out;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw Error("mean of no values");
    // identical folds return their value exactly so the interval collapses onto it
    if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); }))
        return values.front();
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
    if (values.size() < 2) throw Error("sample standard deviation needs at least 2 values");
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

std::pair<double, double> confidence_interval(std::span<const double> values, double level) {
    if (values.size() < 2) throw Error("confidence interval needs at least 2 fold values");
    if (!(level > 0.0 && level < 1.0)) throw Error("confidence level must lie in (0, 1)");
    const double n = static_cast<double>(values.size());
    const double m = mean(values);
    const double s = sample_std(values);
    if (s == 0.0) return {m, m};
    boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(dist, (1.0 + level) / 2.0);
    const double half = t * s / std::sqrt(n);
    return {m - half, m + half};
}

}  // namespace har
