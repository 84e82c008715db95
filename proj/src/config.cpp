#include "har/config.hpp"

#include <fstream>

namespace har {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
    if (!j.is_object()) throw Error(where + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw Error(where + ": unknown key '" + key + "'");
        }
    }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(where + "." + key + ": " + e.what());
    }
}

}  // namespace

json to_json(const ClassifierSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind());
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LogRegParams> || std::is_same_v<P, LinearSvmParams>) {
                j["lr"] = p.lr;
                j["epochs"] = p.epochs;
                j["l2"] = p.l2;
            } else if constexpr (std::is_same_v<P, GaussianNbParams>) {
                j["var_floor"] = p.var_floor;
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                j["k"] = p.k;
                j["weighted"] = p.weighted;
            } else if constexpr (std::is_same_v<P, MlpParams>) {
                j["hidden"] = p.hidden;
                j["lr"] = p.lr;
                j["epochs"] = p.epochs;
                j["batch"] = p.batch;
                j["seed"] = p.seed;
            } else if constexpr (std::is_same_v<P, CartParams>) {
                j["max_depth"] = p.max_depth;
                j["min_leaf"] = p.min_leaf;
            } else {
                j["n_trees"] = p.n_trees;
                j["max_depth"] = p.max_depth;
                j["min_leaf"] = p.min_leaf;
                j["max_features"] = p.max_features;
                j["bootstrap"] = p.bootstrap;
                j["seed"] = p.seed;
            }
        },
        spec.params);
    return j;
}

ClassifierSpec classifier_spec_from_json(const json& j, const ClassifierSpec& base) {
    ClassifierSpec spec = base;
    const std::string where = "classifier " + to_string(base.kind());
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LogRegParams> || std::is_same_v<P, LinearSvmParams>) {
                reject_unknown(j, {"kind", "lr", "epochs", "l2"}, where);
                read(j, "lr", p.lr, where);
                read(j, "epochs", p.epochs, where);
                read(j, "l2", p.l2, where);
            } else if constexpr (std::is_same_v<P, GaussianNbParams>) {
                reject_unknown(j, {"kind", "var_floor"}, where);
                read(j, "var_floor", p.var_floor, where);
            } else if constexpr (std::is_same_v<P, KnnParams>) {
                reject_unknown(j, {"kind", "k", "weighted"}, where);
                read(j, "k", p.k, where);
                read(j, "weighted", p.weighted, where);
            } else if constexpr (std::is_same_v<P, MlpParams>) {
                reject_unknown(j, {"kind", "hidden", "lr", "epochs", "batch", "seed"}, where);
                read(j, "hidden", p.hidden, where);
                read(j, "lr", p.lr, where);
                read(j, "epochs", p.epochs, where);
                read(j, "batch", p.batch, where);
                read(j, "seed", p.seed, where);
            } else if constexpr (std::is_same_v<P, CartParams>) {
                reject_unknown(j, {"kind", "max_depth", "min_leaf"}, where);
                read(j, "max_depth", p.max_depth, where);
                read(j, "min_leaf", p.min_leaf, where);
            } else {
                reject_unknown(j, {"kind", "n_trees", "max_depth", "min_leaf", "max_features", "bootstrap", "seed"},
                               where);
                read(j, "n_trees", p.n_trees, where);
                read(j, "max_depth", p.max_depth, where);
                read(j, "min_leaf", p.min_leaf, where);
                read(j, "max_features", p.max_features, where);
                read(j, "bootstrap", p.bootstrap, where);
                read(j, "seed", p.seed, where);
            }
        },
        spec.params);
    spec.validate();
    return spec;
}

ClassifierSpec classifier_spec_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw Error("classifier spec needs a string 'kind'");
    }
    const auto kind = classifier_kind_from_string(j["kind"].get<std::string>());
    return classifier_spec_from_json(j, ClassifierSpec::defaults(kind));
}

json to_json(const FeatureConfig& c) {
    return json{{"percentiles", c.percentiles}, {"entropy_bins", c.entropy_bins},
                {"n_coeffs", c.n_coeffs},       {"time", c.time},
                {"frequency", c.frequency},     {"correlations", c.correlations},
                {"variance", c.variance}};
}

FeatureConfig feature_config_from_json(const json& j) {
    const std::string where = "features";
    reject_unknown(j, {"percentiles", "entropy_bins", "n_coeffs", "time", "frequency", "correlations", "variance"},
                   where);
    FeatureConfig c;
    read(j, "percentiles", c.percentiles, where);
    read(j, "entropy_bins", c.entropy_bins, where);
    read(j, "n_coeffs", c.n_coeffs, where);
    read(j, "time", c.time, where);
    read(j, "frequency", c.frequency, where);
    read(j, "correlations", c.correlations, where);
    read(j, "variance", c.variance, where);
    c.validate();
    return c;
}

json to_json(const EnsembleSpec& spec) {
    json members = json::array();
    for (const auto& m : spec.members) members.push_back(to_json(m));
    return json{{"members", members}, {"rule", to_string(spec.rule)}, {"tiebreak", to_string(spec.tiebreak)}};
}

EnsembleSpec ensemble_spec_from_json(const json& j, const json& hyperparameters) {
    reject_unknown(j, {"preset", "members", "rule", "tiebreak"}, "ensemble");
    if (!hyperparameters.is_null() && !hyperparameters.is_object()) throw Error("hyperparameters: expected an object");

    auto base_for = [&](ClassifierKind kind) {
        ClassifierSpec base = ClassifierSpec::defaults(kind);
        const std::string name = to_string(kind);
        if (hyperparameters.is_object() && hyperparameters.contains(name)) {
            base = classifier_spec_from_json(hyperparameters[name], base);
        }
        return base;
    };

    EnsembleSpec spec;
    if (j.contains("members")) {
        if (j.contains("preset")) throw Error("ensemble: give either 'preset' or 'members', not both");
        for (const auto& m : j["members"]) {
            if (!m.is_object() || !m.contains("kind")) throw Error("ensemble member needs a 'kind'");
            spec.members.push_back(
                classifier_spec_from_json(m, base_for(classifier_kind_from_string(m["kind"].get<std::string>()))));
        }
    } else {
        const std::string preset = j.value("preset", "proposed");
        for (const auto& m : EnsembleSpec::preset(preset).members) spec.members.push_back(base_for(m.kind()));
    }
    if (j.contains("rule")) spec.rule = combine_rule_from_string(j["rule"].get<std::string>());
    if (j.contains("tiebreak")) spec.tiebreak = tiebreak_from_string(j["tiebreak"].get<std::string>());
    if (hyperparameters.is_object()) {
        for (const auto& [kind, value] : hyperparameters.items()) classifier_kind_from_string(kind);
    }
    return spec;
}

void PipelineConfig::validate() const {
    if (!(window_seconds > 0.0)) throw Error("window_seconds must be > 0");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw Error("overlap must lie in [0, 1)");
    if (folds < 2) throw Error("folds must be >= 2");
    if (!(confidence_level > 0.0 && confidence_level < 1.0)) throw Error("confidence_level must lie in (0, 1)");
    features.validate();
    ensemble.validate();
}

json to_json(const PipelineConfig& c) {
    return json{{"dataset_id", c.dataset_id},
                {"method", c.method},
                {"window_seconds", c.window_seconds},
                {"overlap", c.overlap},
                {"windowing", to_string(c.scheme)},
                {"folds", c.folds},
                {"seed", c.seed},
                {"confidence_level", c.confidence_level},
                {"channel_groups", c.channel_groups},
                {"exclude_labels", c.exclude_labels},
                {"min_trial_len", c.min_trial_len},
                {"strict", c.strict},
                {"features", to_json(c.features)},
                {"ensemble", to_json(c.ensemble)}};
}

PipelineConfig pipeline_config_from_json(const json& j) {
    const std::string where = "config";
    reject_unknown(j,
                   {"dataset_id", "method", "window_seconds", "overlap", "windowing", "folds", "seed",
                    "confidence_level", "channel_groups", "exclude_labels", "min_trial_len", "strict", "features",
                    "ensemble", "hyperparameters"},
                   where);
    PipelineConfig c;
    read(j, "dataset_id", c.dataset_id, where);
    read(j, "window_seconds", c.window_seconds, where);
    read(j, "overlap", c.overlap, where);
    if (j.contains("windowing")) c.scheme = window_scheme_from_string(j["windowing"].get<std::string>());
    read(j, "folds", c.folds, where);
    read(j, "seed", c.seed, where);
    read(j, "confidence_level", c.confidence_level, where);
    read(j, "channel_groups", c.channel_groups, where);
    read(j, "exclude_labels", c.exclude_labels, where);
    read(j, "min_trial_len", c.min_trial_len, where);
    read(j, "strict", c.strict, where);
    if (j.contains("features")) c.features = feature_config_from_json(j["features"]);
    const json hyper = j.value("hyperparameters", json::object());
    c.ensemble = ensemble_spec_from_json(j.value("ensemble", json::object()), hyper);
    c.method = j.value("ensemble", json::object()).value("preset", std::string("custom"));
    if (!j.value("ensemble", json::object()).contains("members") && !j.value("ensemble", json::object()).contains("preset")) {
        c.method = "proposed";
    }
    read(j, "method", c.method, where);
    if (c.strict) c.ensemble.tiebreak = TieBreak::Abstain;
    c.validate();
    return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error(path.string() + ": " + e.what());
    }
    return pipeline_config_from_json(j);
}

}  // namespace har
