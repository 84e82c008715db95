#include <istream>
#include <ostream>

#include "har/classifiers.hpp"
#include "har/config.hpp"

namespace har {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;

json matrix_json(const Matrix& m) { return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}}; }

Matrix matrix_from(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    auto data = j.at("data").get<std::vector<double>>();
    if (data.size() != m.rows() * m.cols()) throw Error("model file: matrix data has the wrong size");
    m.data() = std::move(data);
    return m;
}

json linear_json(const LinearWeights& w) { return json{{"w", matrix_json(w.w)}, {"b", w.b}}; }

LinearWeights linear_from(const json& j) {
    LinearWeights w;
    w.w = matrix_from(j.at("w"));
    w.b = j.at("b").get<std::vector<double>>();
    if (w.b.size() != w.w.rows()) throw Error("model file: bias length mismatch");
    return w;
}

json tree_json(const DecisionTree& t) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         proba = json::array();
    for (const auto& n : t.nodes()) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        for (double p : n.proba) proba.push_back(p);
    }
    return json{{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"proba", proba}};
}

std::vector<TreeNode> tree_from(const json& j, std::size_t n_classes) {
    const auto feature = j.at("feature").get<std::vector<int>>();
    const auto threshold = j.at("threshold").get<std::vector<double>>();
    const auto left = j.at("left").get<std::vector<int>>();
    const auto right = j.at("right").get<std::vector<int>>();
    const auto proba = j.at("proba").get<std::vector<double>>();
    const std::size_t n = feature.size();
    if (threshold.size() != n || left.size() != n || right.size() != n || proba.size() != n * n_classes) {
        throw Error("model file: inconsistent tree arrays");
    }
    std::vector<TreeNode> nodes(n);
    for (std::size_t i = 0; i < n; ++i) {
        nodes[i].feature = feature[i];
        nodes[i].threshold = threshold[i];
        nodes[i].left = left[i];
        nodes[i].right = right[i];
        nodes[i].proba.assign(proba.begin() + static_cast<std::ptrdiff_t>(i * n_classes),
                              proba.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_classes));
        if (feature[i] >= 0) {
            const auto ok = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(n); };
            if (!ok(left[i]) || !ok(right[i])) throw Error("model file: tree child index out of range");
        }
    }
    return nodes;
}

}  // namespace

void save_model(const Classifier& model, std::ostream& out) {
    json j;
    j["format"] = "har-model";
    j["version"] = kModelFormatVersion;
    j["kind"] = to_string(model.kind());
    j["classes"] = model.classes();
    json arrays;
    ClassifierSpec spec = ClassifierSpec::defaults(model.kind());

    if (const auto* m = dynamic_cast<const LogisticRegression*>(&model)) {
        spec.params = m->params();
        arrays = linear_json(m->weights());
    } else if (const auto* m = dynamic_cast<const LinearSvm*>(&model)) {
        spec.params = m->params();
        arrays = linear_json(m->weights());
    } else if (const auto* m = dynamic_cast<const GaussianNaiveBayes*>(&model)) {
        spec.params = m->params();
        arrays = json{{"priors", m->priors()}, {"means", matrix_json(m->means())}, {"variances", matrix_json(m->variances())}};
    } else if (const auto* m = dynamic_cast<const KNearestNeighbors*>(&model)) {
        spec.params = m->params();
        arrays = json{{"x", matrix_json(m->training_set().x())}, {"labels", m->training_set().labels()}};
    } else if (const auto* m = dynamic_cast<const MultilayerPerceptron*>(&model)) {
        spec.params = m->params();
        const auto& w = m->weights();
        arrays = json{{"w1", matrix_json(w.w1)}, {"b1", w.b1}, {"w2", matrix_json(w.w2)}, {"b2", w.b2}};
    } else if (const auto* m = dynamic_cast<const DecisionTree*>(&model)) {
        spec.params = m->params();
        arrays = tree_json(*m);
    } else if (const auto* m = dynamic_cast<const RandomForest*>(&model)) {
        spec.params = m->params();
        arrays["trees"] = json::array();
        for (const auto& t : m->trees()) arrays["trees"].push_back(tree_json(t));
    } else {
        throw Error("save_model: unsupported model type");
    }
    auto hyper = to_json(spec);
    hyper.erase("kind");
    j["hyperparameters"] = hyper;
    j["arrays"] = arrays;
    out << j.dump() << '\n';
    if (!out) throw Error("save_model: write failed");
}

std::unique_ptr<Classifier> load_model(std::istream& in) {
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(std::string("load_model: ") + e.what());
    }
    if (j.value("format", "") != "har-model") throw Error("load_model: not a har-model file");
    if (j.value("version", 0) != kModelFormatVersion) {
        throw Error("load_model: unsupported format version " + std::to_string(j.value("version", 0)));
    }
    try {
        const auto kind = classifier_kind_from_string(j.at("kind").get<std::string>());
        auto classes = j.at("classes").get<std::vector<int>>();
        const auto spec = classifier_spec_from_json(j.at("hyperparameters"), ClassifierSpec::defaults(kind));
        const auto& a = j.at("arrays");

        switch (kind) {
            case ClassifierKind::LogReg:
                return std::make_unique<LogisticRegression>(std::move(classes), linear_from(a),
                                                            std::get<LogRegParams>(spec.params));
            case ClassifierKind::LinearSvm:
                return std::make_unique<LinearSvm>(std::move(classes), linear_from(a),
                                                   std::get<LinearSvmParams>(spec.params));
            case ClassifierKind::GaussianNb:
                return std::make_unique<GaussianNaiveBayes>(std::move(classes), a.at("priors").get<std::vector<double>>(),
                                                            matrix_from(a.at("means")), matrix_from(a.at("variances")),
                                                            std::get<GaussianNbParams>(spec.params));
            case ClassifierKind::Knn: {
                TrainingSet ts(matrix_from(a.at("x")), a.at("labels").get<std::vector<int>>());
                if (ts.classes() != classes) throw Error("load_model: knn class list mismatch");
                return std::make_unique<KNearestNeighbors>(std::move(ts), std::get<KnnParams>(spec.params));
            }
            case ClassifierKind::Mlp: {
                MlpWeights w;
                w.w1 = matrix_from(a.at("w1"));
                w.b1 = a.at("b1").get<std::vector<double>>();
                w.w2 = matrix_from(a.at("w2"));
                w.b2 = a.at("b2").get<std::vector<double>>();
                return std::make_unique<MultilayerPerceptron>(std::move(classes), std::move(w),
                                                              std::get<MlpParams>(spec.params));
            }
            case ClassifierKind::Cart: {
                auto nodes = tree_from(a, classes.size());
                return std::make_unique<DecisionTree>(std::move(classes), std::move(nodes),
                                                      std::get<CartParams>(spec.params));
            }
            case ClassifierKind::RandomForest: {
                const auto& p = std::get<RandomForestParams>(spec.params);
                std::vector<DecisionTree> trees;
                for (const auto& t : a.at("trees")) {
                    trees.emplace_back(classes, tree_from(t, classes.size()), CartParams{p.max_depth, p.min_leaf});
                }
                return std::make_unique<RandomForest>(std::move(classes), std::move(trees), p);
            }
        }
    } catch (const json::exception& e) {
        throw Error(std::string("load_model: ") + e.what());
    }
    throw Error("load_model: unreachable");
}

}  // namespace har
