#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "har/config.hpp"
#include "har/dataio.hpp"
#include "har/metrics.hpp"

namespace har {

struct FoldResult {
    std::size_t fold = 0;
    std::size_t train_trials = 0, test_trials = 0;
    std::size_t train_windows = 0, test_windows = 0;
    double accuracy = 0.0, precision = 0.0, recall = 0.0, fscore = 0.0;
    std::vector<double> member_accuracy;  // parallel to the ensemble members
    std::size_t abstentions = 0;
    std::vector<int> undefined_recall_classes;
};

struct MetricSummary {
    std::vector<double> per_fold;
    double mean = 0.0;
    double lo = 0.0, hi = 0.0;  // confidence interval at the configured level
};

MetricSummary summarize(std::vector<double> per_fold, double level);

struct EvaluationReport {
    PipelineConfig config;
    std::size_t window_samples = 0;
    std::size_t fft_length = 0;
    std::size_t feature_dimension = 0;
    std::size_t n_trials = 0, n_windows = 0;
    std::vector<int> classes;
    std::vector<std::string> members;  // member kinds, in ensemble order

    std::vector<FoldResult> folds;
    MetricSummary accuracy, precision, recall, fscore;
    std::vector<MetricSummary> member_accuracy;

    nlohmann::json to_json() const;
    static EvaluationReport from_json(const nlohmann::json& j);

    /// Fixed-width Accuracy / Recall / F-score table for this run alone.
    std::string render_table() const;
};

/// Throws when any trial id appears on both sides of a fold.
void assert_no_leakage(std::size_t fold, const std::vector<std::string>& train_trial_ids,
                       const std::vector<std::string>& test_trial_ids);

/// LOTO cross-validation: per fold, standardise on the training windows only, fit the
/// ensemble, score the held-out trials. Deterministic given the config seed.
EvaluationReport cross_validate(const std::vector<LabeledRecording>& dataset, const PipelineConfig& config);

/// Trials as the pipeline sees them: channel selection, segmentation and exclusion applied.
std::vector<SensorTrial> prepare_trials(const std::vector<LabeledRecording>& dataset, const PipelineConfig& config);

struct ComparisonRow {
    std::string metric;
    MetricSummary a, b;
    double delta = 0.0;  // a.mean - b.mean
};

struct Comparison {
    std::string dataset_id;
    std::string method_a, method_b;
    std::vector<ComparisonRow> rows;  // Accuracy, Recall, F-score

    std::string render() const;
    nlohmann::json to_json() const;
};

Comparison compare(const EvaluationReport& a, const EvaluationReport& b);

void save_report(const EvaluationReport& report, const std::filesystem::path& path);
EvaluationReport load_report(const std::filesystem::path& path);

// --- synthetic benchmark -------------------------------------------------------------

struct SyntheticOptions {
    std::size_t classes = 3;
    std::size_t trials_per_class = 20;
    double trial_seconds = 10.0;
    double rate_hz = 50.0;
    double noise_sigma = 1.5;
};

/// One recording per "subject", each holding one trial of every class in a rotated
/// order; class c is a sinusoid of class-specific frequency and amplitude on a 3-axis
/// group `synth_acc`, with random phase and Gaussian noise.
std::vector<LabeledRecording> make_synthetic_dataset(std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace har
