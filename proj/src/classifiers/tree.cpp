// CART with Gini impurity, and the bagged random forest built from it.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "har/classifiers.hpp"
#include "har/rng.hpp"

namespace har {

namespace {

double gini(std::span<const double> counts, double n) {
    if (n <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += (c / n) * (c / n);
    return 1.0 - sq;
}

struct Split {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;
};

class TreeGrower {
public:
    TreeGrower(const TrainingSet& ts, std::size_t max_depth, std::size_t min_leaf, std::size_t max_features, Rng* rng)
        : ts_(ts), max_depth_(max_depth), min_leaf_(min_leaf), max_features_(max_features), rng_(rng) {}

    std::vector<TreeNode> grow(std::vector<std::size_t> rows) {
        nodes_.clear();
        build(rows, 0);
        return std::move(nodes_);
    }

private:
    int build(const std::vector<std::size_t>& rows, std::size_t depth) {
        const std::size_t C = ts_.n_classes();
        std::vector<double> counts(C, 0.0);
        for (std::size_t r : rows) counts[ts_.class_index()[r]] += 1.0;
        const double n = static_cast<double>(rows.size());

        const int index = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        nodes_[index].proba.resize(C);
        for (std::size_t c = 0; c < C; ++c) nodes_[index].proba[c] = counts[c] / n;

        const bool pure = std::any_of(counts.begin(), counts.end(), [&](double c) { return c == n; });
        if (pure || depth >= max_depth_ || rows.size() < 2 * min_leaf_) return index;

        const Split split = best_split(rows);
        if (split.feature < 0) return index;

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows) {
            (ts_.x()(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
        }
        const int l = build(left, depth + 1);
        const int rt = build(right, depth + 1);
        nodes_[index].feature = split.feature;
        nodes_[index].threshold = split.threshold;
        nodes_[index].left = l;
        nodes_[index].right = rt;
        return index;
    }

    std::vector<std::size_t> candidate_features() {
        const std::size_t d = ts_.dim();
        std::vector<std::size_t> all(d);
        std::iota(all.begin(), all.end(), 0);
        if (rng_ == nullptr || max_features_ >= d) return all;
        for (std::size_t i = 0; i < max_features_; ++i) {
            std::swap(all[i], all[i + uniform_index(*rng_, d - i)]);
        }
        all.resize(max_features_);
        std::sort(all.begin(), all.end());
        return all;
    }

    Split best_split(const std::vector<std::size_t>& rows) {
        const std::size_t C = ts_.n_classes();
        const double n = static_cast<double>(rows.size());
        Split best;
        double best_impurity = INFINITY;
        std::vector<std::pair<double, std::size_t>> column(rows.size());
        std::vector<double> left(C), right(C);
        for (std::size_t f : candidate_features()) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                column[i] = {ts_.x()(rows[i], f), ts_.class_index()[rows[i]]};
            }
            std::sort(column.begin(), column.end());
            std::fill(left.begin(), left.end(), 0.0);
            std::fill(right.begin(), right.end(), 0.0);
            for (const auto& [v, c] : column) right[c] += 1.0;
            for (std::size_t i = 0; i + 1 < column.size(); ++i) {
                left[column[i].second] += 1.0;
                right[column[i].second] -= 1.0;
                const double a = column[i].first, b = column[i + 1].first;
                if (a == b) continue;
                const std::size_t n_left = i + 1, n_right = column.size() - n_left;
                if (n_left < min_leaf_ || n_right < min_leaf_) continue;
                const double impurity = (static_cast<double>(n_left) * gini(left, static_cast<double>(n_left)) +
                                         static_cast<double>(n_right) * gini(right, static_cast<double>(n_right))) /
                                        n;
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    double mid = a + (b - a) / 2.0;
                    if (!(mid < b)) mid = a;
                    best = {static_cast<int>(f), mid, impurity};
                }
            }
        }
        return best;
    }

    const TrainingSet& ts_;
    std::size_t max_depth_;
    std::size_t min_leaf_;
    std::size_t max_features_;
    Rng* rng_;
    std::vector<TreeNode> nodes_;
};

}  // namespace

double weighted_gini(std::span<const double> left_counts, std::span<const double> right_counts) {
    const double nl = std::accumulate(left_counts.begin(), left_counts.end(), 0.0);
    const double nr = std::accumulate(right_counts.begin(), right_counts.end(), 0.0);
    const double n = nl + nr;
    if (n <= 0.0) return 0.0;
    return (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / n;
}

DecisionTree::DecisionTree(std::vector<int> classes, std::vector<TreeNode> nodes, CartParams params)
    : Classifier(std::move(classes)), nodes_(std::move(nodes)), params_(params) {
    if (nodes_.empty()) throw Error("decision tree without nodes");
}

const std::vector<double>& DecisionTree::leaf_proba(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const auto f = static_cast<std::size_t>(nodes_[i].feature);
        if (f >= x.size()) throw Error("cart: input dimension mismatch");
        i = static_cast<std::size_t>(x[f] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right);
    }
    return nodes_[i].proba;
}

std::vector<double> DecisionTree::predict_proba(std::span<const double> x) const { return leaf_proba(x); }

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> depth(nodes_.size(), 0);
    std::size_t deepest = 0;
    // Children always follow their parent in node order.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (nodes_[i].feature < 0) continue;
        depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
        depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
    }
    return deepest;
}

DecisionTree train_cart(const TrainingSet& ts, const CartParams& params) {
    if (params.max_depth < 1 || params.min_leaf < 1) throw Error("cart: invalid hyperparameters");
    std::vector<std::size_t> rows(ts.rows());
    std::iota(rows.begin(), rows.end(), 0);
    TreeGrower grower(ts, params.max_depth, params.min_leaf, ts.dim(), nullptr);
    return DecisionTree(ts.classes(), grower.grow(std::move(rows)), params);
}

RandomForest::RandomForest(std::vector<int> classes, std::vector<DecisionTree> trees, RandomForestParams params)
    : Classifier(std::move(classes)), trees_(std::move(trees)), params_(params) {
    if (trees_.empty()) throw Error("random forest without trees");
}

std::vector<double> RandomForest::predict_proba(std::span<const double> x) const {
    std::vector<double> out(n_classes(), 0.0);
    for (const auto& t : trees_) {
        const auto& p = t.leaf_proba(x);
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += p[c];
    }
    for (auto& v : out) v /= static_cast<double>(trees_.size());
    return out;
}

RandomForest train_random_forest(const TrainingSet& ts, const RandomForestParams& params) {
    if (params.n_trees < 1 || params.max_depth < 1 || params.min_leaf < 1) {
        throw Error("rforest: invalid hyperparameters");
    }
    const std::size_t m = ts.rows(), d = ts.dim();
    std::size_t max_features = params.max_features;
    if (max_features == 0) max_features = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(d))));
    max_features = std::clamp<std::size_t>(max_features, 1, d);

    const CartParams tree_params{params.max_depth, params.min_leaf};
    std::vector<DecisionTree> trees;
    trees.reserve(params.n_trees);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_seed(params.seed, t));
        std::vector<std::size_t> rows(m);
        if (params.bootstrap) {
            for (auto& r : rows) r = uniform_index(rng, m);
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        TreeGrower grower(ts, params.max_depth, params.min_leaf, max_features, &rng);
        trees.emplace_back(ts.classes(), grower.grow(std::move(rows)), tree_params);
    }
    return RandomForest(ts.classes(), std::move(trees), params);
}

}  // namespace har
