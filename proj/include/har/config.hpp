#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "har/ensemble.hpp"
#include "har/features.hpp"
#include "har/windowing.hpp"

namespace har {

/// Everything that determines one cross-validated run.
struct PipelineConfig {
    std::string dataset_id = "dataset";
    std::string method = "proposed";  // label used in reports and tables

    double window_seconds = 5.0;
    double overlap = 0.5;
    WindowScheme scheme = WindowScheme::Snow;
    std::size_t folds = 10;
    std::uint64_t seed = 0;
    double confidence_level = 0.90;

    std::vector<std::string> channel_groups;  // empty: every channel
    std::set<int> exclude_labels;
    std::size_t min_trial_len = 0;  // 0: one window length
    bool strict = false;            // surface ensemble abstentions as errors in the metrics

    FeatureConfig features;
    EnsembleSpec ensemble = EnsembleSpec::proposed();

    void validate() const;
};

// JSON forms. Parsing rejects unknown keys so a misspelt hyperparameter fails loudly.

nlohmann::json to_json(const ClassifierSpec& spec);
/// Keys other than "kind" override the hyperparameters of `base`.
ClassifierSpec classifier_spec_from_json(const nlohmann::json& j, const ClassifierSpec& base);
ClassifierSpec classifier_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FeatureConfig& config);
FeatureConfig feature_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EnsembleSpec& spec);
/// {"preset": ..., "members": [...], "rule": ..., "tiebreak": ...}; `hyperparameters`
/// holds per-kind overrides ({"mlp": {"hidden": 32}}) applied beneath member entries.
EnsembleSpec ensemble_spec_from_json(const nlohmann::json& j, const nlohmann::json& hyperparameters = {});

nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const nlohmann::json& j);

/// Reads a JSON run configuration; // and /* */ comments are allowed.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

}  // namespace har
