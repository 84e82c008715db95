#include <algorithm>
#include <cmath>
#include <map>

#include "har/classifiers.hpp"

namespace har {

TrainingSet::TrainingSet(Matrix x, std::vector<int> labels) : x_(std::move(x)), labels_(std::move(labels)) {
    if (labels_.size() != x_.rows()) {
        throw Error("training set has " + std::to_string(x_.rows()) + " rows but " + std::to_string(labels_.size()) +
                    " labels");
    }
    if (labels_.empty()) throw Error("training set is empty");
    for (double v : x_.data()) {
        if (!std::isfinite(v)) throw Error("training set contains a non-finite feature");
    }
    classes_ = labels_;
    std::sort(classes_.begin(), classes_.end());
    classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    class_index_.reserve(labels_.size());
    for (int l : labels_) {
        class_index_.push_back(
            static_cast<std::size_t>(std::lower_bound(classes_.begin(), classes_.end(), l) - classes_.begin()));
    }
}

std::string to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::LogReg: return "logreg";
        case ClassifierKind::GaussianNb: return "gnb";
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::LinearSvm: return "linsvm";
        case ClassifierKind::Mlp: return "mlp";
        case ClassifierKind::Cart: return "cart";
        case ClassifierKind::RandomForest: return "rforest";
    }
    return "?";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
    static const std::map<std::string, ClassifierKind> kinds{
        {"logreg", ClassifierKind::LogReg}, {"gnb", ClassifierKind::GaussianNb},
        {"knn", ClassifierKind::Knn},       {"linsvm", ClassifierKind::LinearSvm},
        {"mlp", ClassifierKind::Mlp},       {"cart", ClassifierKind::Cart},
        {"rforest", ClassifierKind::RandomForest}};
    auto it = kinds.find(name);
    if (it == kinds.end()) {
        throw Error("unknown classifier kind '" + name + "' (expected logreg, gnb, knn, linsvm, mlp, cart, rforest)");
    }
    return it->second;
}

ClassifierKind ClassifierSpec::kind() const {
    return static_cast<ClassifierKind>(params.index());
}

ClassifierSpec ClassifierSpec::defaults(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::LogReg: return {LogRegParams{}};
        case ClassifierKind::GaussianNb: return {GaussianNbParams{}};
        case ClassifierKind::Knn: return {KnnParams{}};
        case ClassifierKind::LinearSvm: return {LinearSvmParams{}};
        case ClassifierKind::Mlp: return {MlpParams{}};
        case ClassifierKind::Cart: return {CartParams{}};
        case ClassifierKind::RandomForest: return {RandomForestParams{}};
    }
    throw Error("invalid classifier kind");
}

void ClassifierSpec::set_seed(std::uint64_t seed) {
    if (auto* p = std::get_if<MlpParams>(&params)) p->seed = seed;
    if (auto* p = std::get_if<RandomForestParams>(&params)) p->seed = seed;
}

void ClassifierSpec::validate() const {
    const std::string name = to_string(kind());
    auto fail = [&](const std::string& what) { throw Error(name + ": " + what); };
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LogRegParams> || std::is_same_v<P, LinearSvmParams>) {
                if (!(p.lr > 0.0)) fail("lr must be > 0");
                if (p.epochs < 1) fail("epochs must be >= 1");
                if (!(p.l2 >= 0.0)) fail("l2 must be >= 0");
            } else if constexpr (std::is_same_v<P, GaussianNbParams>) {
                if (!(p.var_floor > 0.0)) fail("var_floor must be > 0");
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                if (p.k < 1) fail("k must be >= 1");
            } else if constexpr (std::is_same_v<P, MlpParams>) {
                if (p.hidden < 1) fail("hidden must be >= 1");
                if (!(p.lr > 0.0)) fail("lr must be > 0");
                if (p.epochs < 1) fail("epochs must be >= 1");
                if (p.batch < 1) fail("batch must be >= 1");
            } else if constexpr (std::is_same_v<P, CartParams>) {
                if (p.max_depth < 1) fail("max_depth must be >= 1");
                if (p.min_leaf < 1) fail("min_leaf must be >= 1");
            } else if constexpr (std::is_same_v<P, RandomForestParams>) {
                if (p.n_trees < 1) fail("n_trees must be >= 1");
                if (p.max_depth < 1) fail("max_depth must be >= 1");
                if (p.min_leaf < 1) fail("min_leaf must be >= 1");
            }
        },
        params);
}

std::size_t argmax(std::span<const double> v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) best = i;
    }
    return best;
}

int Classifier::predict(std::span<const double> x) const {
    const auto p = predict_proba(x);
    return classes_[argmax(p)];
}

void softmax_inplace(std::span<double> z) {
    const double top = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (auto& v : z) {
        v = std::exp(v - top);
        sum += v;
    }
    for (auto& v : z) v /= sum;
}

std::vector<double> LinearWeights::scores(std::span<const double> x) const {
    if (x.size() != w.cols()) throw Error("input dimension " + std::to_string(x.size()) + " != model dimension " +
                                          std::to_string(w.cols()));
    std::vector<double> out(b);
    for (std::size_t c = 0; c < w.rows(); ++c) {
        const auto row = w.row(c);
        double acc = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) acc += row[j] * x[j];
        out[c] += acc;
    }
    return out;
}

std::unique_ptr<Classifier> train(const ClassifierSpec& spec, const TrainingSet& ts) {
    spec.validate();
    return std::visit(
        [&](const auto& p) -> std::unique_ptr<Classifier> {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LogRegParams>) {
                return std::make_unique<LogisticRegression>(train_logistic_regression(ts, p));
            } else if constexpr (std::is_same_v<P, GaussianNbParams>) {
                return std::make_unique<GaussianNaiveBayes>(train_gaussian_nb(ts, p));
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                return std::make_unique<KNearestNeighbors>(train_knn(ts, p));
            } else if constexpr (std::is_same_v<P, LinearSvmParams>) {
                return std::make_unique<LinearSvm>(train_linear_svm_ovr(ts, p));
            } else if constexpr (std::is_same_v<P, MlpParams>) {
                return std::make_unique<MultilayerPerceptron>(train_mlp(ts, p));
            } else if constexpr (std::is_same_v<P, CartParams>) {
                return std::make_unique<DecisionTree>(train_cart(ts, p));
            } else {
                return std::make_unique<RandomForest>(train_random_forest(ts, p));
            }
        },
        spec.params);
}

}  // namespace har
