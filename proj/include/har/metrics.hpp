#pragma once

#include <climits>
#include <span>
#include <utility>
#include <vector>

#include "har/common.hpp"

namespace har {

/// Prediction code for an abstaining ensemble in strict mode; never a class.
inline constexpr int kAbstain = INT_MIN;

/// One-vs-rest counts per class.
struct ConfusionCounts {
    std::vector<int> classes;
    std::vector<long> tp, fp, tn, fn;
    long total = 0;

    std::size_t size() const noexcept { return classes.size(); }
};

/// Counts over `classes`; when empty, the sorted union of labels in both vectors
/// (kAbstain excluded).
ConfusionCounts confusion_counts(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::vector<int> classes = {});

/// Overall match rate.
double accuracy(std::span<const int> y_true, std::span<const int> y_pred);
/// Sum of TP over the total; equals the match rate when `classes` covers every true label.
double accuracy(const ConfusionCounts& counts);

// Macro averages. A class with TP+FN = 0 contributes recall 0 (see undefined_recall_classes);
// precision is 0 when TP+FP = 0; F is 0 when precision and recall are both 0.
double macro_precision(const ConfusionCounts& counts);
double macro_recall(const ConfusionCounts& counts);
double macro_fscore(const ConfusionCounts& counts);

/// Classes whose recall is undefined (no true samples) and was scored 0.
std::vector<int> undefined_recall_classes(const ConfusionCounts& counts);

/// Student-t interval mean +/- t_{(1+level)/2, n-1} s/sqrt(n); not clipped.
std::pair<double, double> confidence_interval(std::span<const double> values, double level = 0.90);

double mean(std::span<const double> values);
double sample_std(std::span<const double> values);

}  // namespace har
