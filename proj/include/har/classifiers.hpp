#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "har/common.hpp"

namespace har {

/// Standardised feature matrix with integer class codes. Classes are the sorted
/// distinct codes; every class is present at least once by construction.
class TrainingSet {
public:
    TrainingSet(Matrix x, std::vector<int> labels);

    const Matrix& x() const noexcept { return x_; }
    const std::vector<int>& labels() const noexcept { return labels_; }
    const std::vector<int>& classes() const noexcept { return classes_; }
    /// Position of each row's label in classes().
    const std::vector<std::size_t>& class_index() const noexcept { return class_index_; }

    std::size_t rows() const noexcept { return x_.rows(); }
    std::size_t dim() const noexcept { return x_.cols(); }
    std::size_t n_classes() const noexcept { return classes_.size(); }

private:
    Matrix x_;
    std::vector<int> labels_;
    std::vector<int> classes_;
    std::vector<std::size_t> class_index_;
};

// --- hyperparameters -----------------------------------------------------------------

struct LogRegParams {
    double lr = 0.1;
    std::size_t epochs = 500;
    double l2 = 1e-4;
};

struct GaussianNbParams {
    double var_floor = 1e-6;
};

struct KnnParams {
    std::size_t k = 5;
    bool weighted = true;
};

struct LinearSvmParams {
    double lr = 0.01;
    std::size_t epochs = 500;
    double l2 = 1e-3;
};

struct MlpParams {
    std::size_t hidden = 64;
    double lr = 0.01;
    std::size_t epochs = 200;
    std::size_t batch = 32;
    std::uint64_t seed = 0;
};

struct CartParams {
    std::size_t max_depth = 12;
    std::size_t min_leaf = 2;
};

struct RandomForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 12;
    std::size_t min_leaf = 2;
    std::size_t max_features = 0;  // 0: round(sqrt(d))
    bool bootstrap = true;         // false only for tests
    std::uint64_t seed = 0;
};

enum class ClassifierKind { LogReg, GaussianNb, Knn, LinearSvm, Mlp, Cart, RandomForest };

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& name);

using ClassifierParams = std::variant<LogRegParams, GaussianNbParams, KnnParams, LinearSvmParams, MlpParams,
                                      CartParams, RandomForestParams>;

struct ClassifierSpec {
    ClassifierParams params;

    ClassifierKind kind() const;
    /// Spec with default hyperparameters for `kind`.
    static ClassifierSpec defaults(ClassifierKind kind);
    /// Overrides the RNG seed of seeded learners (MLP, forest); no-op otherwise.
    void set_seed(std::uint64_t seed);
    void validate() const;
};

// --- models --------------------------------------------------------------------------

class Classifier {
public:
    virtual ~Classifier() = default;

    virtual ClassifierKind kind() const = 0;
    virtual std::vector<double> predict_proba(std::span<const double> x) const = 0;

    /// Argmax of predict_proba; ties go to the lowest class code.
    int predict(std::span<const double> x) const;

    const std::vector<int>& classes() const noexcept { return classes_; }
    std::size_t n_classes() const noexcept { return classes_.size(); }

protected:
    explicit Classifier(std::vector<int> classes) : classes_(std::move(classes)) {}
    std::vector<int> classes_;
};

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> v);

/// Row-per-class weights plus biases; shared by logistic regression and the linear SVM.
struct LinearWeights {
    Matrix w;  // n_classes x dim
    std::vector<double> b;

    LinearWeights() = default;
    LinearWeights(std::size_t n_classes, std::size_t dim) : w(n_classes, dim), b(n_classes, 0.0) {}
    std::vector<double> scores(std::span<const double> x) const;
};

void softmax_inplace(std::span<double> z);

class LogisticRegression final : public Classifier {
public:
    LogisticRegression(std::vector<int> classes, LinearWeights weights, LogRegParams params,
                       std::vector<double> loss_history = {});

    ClassifierKind kind() const override { return ClassifierKind::LogReg; }
    std::vector<double> predict_proba(std::span<const double> x) const override;

    const LinearWeights& weights() const noexcept { return weights_; }
    const LogRegParams& params() const noexcept { return params_; }
    /// Objective before each epoch's update, then after the last one.
    const std::vector<double>& loss_history() const noexcept { return loss_history_; }

private:
    LinearWeights weights_;
    LogRegParams params_;
    std::vector<double> loss_history_;
};

/// Mean cross-entropy of softmax(Wx+b) plus (l2/2)||W||^2; fills `grad` when given.
double logreg_objective(const LinearWeights& weights, const TrainingSet& ts, double l2,
                        LinearWeights* grad = nullptr);

LogisticRegression train_logistic_regression(const TrainingSet& ts, const LogRegParams& params = {});

class GaussianNaiveBayes final : public Classifier {
public:
    GaussianNaiveBayes(std::vector<int> classes, std::vector<double> priors, Matrix means, Matrix variances,
                       GaussianNbParams params);

    ClassifierKind kind() const override { return ClassifierKind::GaussianNb; }
    std::vector<double> predict_proba(std::span<const double> x) const override;

    const std::vector<double>& priors() const noexcept { return priors_; }
    const Matrix& means() const noexcept { return means_; }
    const Matrix& variances() const noexcept { return variances_; }
    const GaussianNbParams& params() const noexcept { return params_; }

private:
    std::vector<double> priors_;
    Matrix means_;
    Matrix variances_;
    GaussianNbParams params_;
};

GaussianNaiveBayes train_gaussian_nb(const TrainingSet& ts, const GaussianNbParams& params = {});

/// Class distribution among the k Euclidean-nearest training rows; weights 1/(d+1e-9)
/// when `weighted`, else 1. Equal distances keep training-set order.
std::vector<double> knn_predict(const TrainingSet& ts, std::span<const double> x, std::size_t k, bool weighted);

class KNearestNeighbors final : public Classifier {
public:
    KNearestNeighbors(TrainingSet ts, KnnParams params);

    ClassifierKind kind() const override { return ClassifierKind::Knn; }
    std::vector<double> predict_proba(std::span<const double> x) const override;

    const TrainingSet& training_set() const noexcept { return ts_; }
    const KnnParams& params() const noexcept { return params_; }

private:
    TrainingSet ts_;
    KnnParams params_;
};

KNearestNeighbors train_knn(const TrainingSet& ts, const KnnParams& params = {});

/// One-vs-rest linear SVM. predict_proba is a softmax over the per-class margins, a
/// pseudo-probability for soft voting rather than a calibrated estimate.
class LinearSvm final : public Classifier {
public:
    LinearSvm(std::vector<int> classes, LinearWeights weights, LinearSvmParams params);

    ClassifierKind kind() const override { return ClassifierKind::LinearSvm; }
    std::vector<double> predict_proba(std::span<const double> x) const override;
    std::vector<double> margins(std::span<const double> x) const { return weights_.scores(x); }

    const LinearWeights& weights() const noexcept { return weights_; }
    const LinearSvmParams& params() const noexcept { return params_; }

private:
    LinearWeights weights_;
    LinearSvmParams params_;
};

/// Sum over classes of mean hinge loss (labels +1 for the class, -1 otherwise) plus
/// (l2/2)||w_c||^2. `grad` receives a subgradient.
double svm_objective(const LinearWeights& weights, const TrainingSet& ts, double l2,
                     LinearWeights* grad = nullptr);

LinearSvm train_linear_svm_ovr(const TrainingSet& ts, const LinearSvmParams& params = {});

/// One ReLU hidden layer and a softmax output.
struct MlpWeights {
    Matrix w1;  // hidden x dim
    std::vector<double> b1;
    Matrix w2;  // n_classes x hidden
    std::vector<double> b2;

    MlpWeights() = default;
    MlpWeights(std::size_t dim, std::size_t hidden, std::size_t n_classes)
        : w1(hidden, dim), b1(hidden, 0.0), w2(n_classes, hidden), b2(n_classes, 0.0) {}

    std::vector<double> forward(std::span<const double> x) const;
};

/// Mean cross-entropy over `rows` of `ts`; fills `grad` via backpropagation when given.
double mlp_objective(const MlpWeights& weights, const TrainingSet& ts, std::span<const std::size_t> rows,
                     MlpWeights* grad = nullptr);

class MultilayerPerceptron final : public Classifier {
public:
    MultilayerPerceptron(std::vector<int> classes, MlpWeights weights, MlpParams params,
                         std::vector<double> loss_history = {});

    ClassifierKind kind() const override { return ClassifierKind::Mlp; }
    std::vector<double> predict_proba(std::span<const double> x) const override;

    const MlpWeights& weights() const noexcept { return weights_; }
    MlpWeights& mutable_weights() noexcept { return weights_; }
    const MlpParams& params() const noexcept { return params_; }
    /// Full-data loss at initialisation, then after every epoch.
    const std::vector<double>& loss_history() const noexcept { return loss_history_; }

private:
    MlpWeights weights_;
    MlpParams params_;
    std::vector<double> loss_history_;
};

MultilayerPerceptron train_mlp(const TrainingSet& ts, const MlpParams& params = {});

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;  // x[feature] <= threshold
    int right = -1;
    std::vector<double> proba;  // class frequencies of the training rows reaching the node
};

class DecisionTree final : public Classifier {
public:
    DecisionTree(std::vector<int> classes, std::vector<TreeNode> nodes, CartParams params);

    ClassifierKind kind() const override { return ClassifierKind::Cart; }
    std::vector<double> predict_proba(std::span<const double> x) const override;
    const std::vector<double>& leaf_proba(std::span<const double> x) const;

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    const CartParams& params() const noexcept { return params_; }
    std::size_t depth() const;

private:
    std::vector<TreeNode> nodes_;
    CartParams params_;
};

/// Weighted Gini impurity sum_c (n_c/n)(1 - sum_k p_k^2) of a binary partition.
double weighted_gini(std::span<const double> left_counts, std::span<const double> right_counts);

DecisionTree train_cart(const TrainingSet& ts, const CartParams& params = {});

class RandomForest final : public Classifier {
public:
    RandomForest(std::vector<int> classes, std::vector<DecisionTree> trees, RandomForestParams params);

    ClassifierKind kind() const override { return ClassifierKind::RandomForest; }
    std::vector<double> predict_proba(std::span<const double> x) const override;

    const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
    const RandomForestParams& params() const noexcept { return params_; }

private:
    std::vector<DecisionTree> trees_;
    RandomForestParams params_;
};

RandomForest train_random_forest(const TrainingSet& ts, const RandomForestParams& params = {});

/// Trains the learner described by `spec`.
std::unique_ptr<Classifier> train(const ClassifierSpec& spec, const TrainingSet& ts);

// --- persistence ---------------------------------------------------------------------

/// Versioned JSON: {"format": "har-model", "version": 1, "kind", "classes",
/// "hyperparameters", "arrays"}. Doubles round-trip exactly.
void save_model(const Classifier& model, std::ostream& out);
std::unique_ptr<Classifier> load_model(std::istream& in);

}  // namespace har
