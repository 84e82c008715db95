#include "har/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "har/rng.hpp"

namespace har {

using nlohmann::json;

MetricSummary summarize(std::vector<double> per_fold, double level) {
    MetricSummary s;
    s.per_fold = std::move(per_fold);
    s.mean = mean(s.per_fold);
    std::tie(s.lo, s.hi) = confidence_interval(s.per_fold, level);
    return s;
}

void assert_no_leakage(std::size_t fold, const std::vector<std::string>& train_trial_ids,
                       const std::vector<std::string>& test_trial_ids) {
    const std::set<std::string> train(train_trial_ids.begin(), train_trial_ids.end());
    for (const auto& id : test_trial_ids) {
        if (train.contains(id)) {
            throw Error("fold " + std::to_string(fold) + ": trial " + id + " appears in both train and test");
        }
    }
}

std::vector<SensorTrial> prepare_trials(const std::vector<LabeledRecording>& dataset, const PipelineConfig& config) {
    if (dataset.empty()) throw Error("dataset holds no recordings");
    const double rate = dataset.front().sampling_rate_hz;
    const std::size_t w = window_length_samples(config.window_seconds, rate);
    const std::size_t min_len = config.min_trial_len > 0 ? config.min_trial_len : w;

    std::set<std::string> subjects;
    std::vector<SensorTrial> trials;
    for (const auto& rec : dataset) {
        rec.validate();
        if (rec.sampling_rate_hz != rate) {
            throw Error("recording '" + rec.subject_id + "' is sampled at " + std::to_string(rec.sampling_rate_hz) +
                        " Hz, expected " + std::to_string(rate) + " Hz");
        }
        if (!subjects.insert(rec.subject_id).second) throw Error("duplicate subject id '" + rec.subject_id + "'");
        auto segs = config.channel_groups.empty()
                         ? segment_trials(rec, min_len, config.exclude_labels)
                         : segment_trials(select_channels(rec, config.channel_groups), min_len, config.exclude_labels);
        std::move(segs.begin(), segs.end(), std::back_inserter(trials));
    }
    return trials;
}

EvaluationReport cross_validate(const std::vector<LabeledRecording>& dataset, const PipelineConfig& config) {
    config.validate();
    EvaluationReport report;
    report.config = config;

    const auto trials = prepare_trials(dataset, config);
    if (trials.size() < config.folds) {
        throw Error("dataset yields " + std::to_string(trials.size()) + " trials, fewer than " +
                    std::to_string(config.folds) + " folds");
    }
    const FoldAssignment folds = loto_folds(trials, config.folds, config.seed);

    const auto windows = make_windows(trials, config.scheme, config.window_seconds, config.overlap);
    FeatureTable table;
    try {
        table = extract_features(windows, config.features);
    } catch (const std::exception& e) {
        throw Error(std::string("feature extraction: ") + e.what());
    }

    report.window_samples = window_length_samples(config.window_seconds, trials.front().sampling_rate_hz);
    report.fft_length = next_pow2(report.window_samples);
    report.feature_dimension = table.dimension();
    report.n_trials = trials.size();
    report.n_windows = table.size();
    {
        std::set<int> classes(table.labels.begin(), table.labels.end());
        report.classes.assign(classes.begin(), classes.end());
    }
    for (const auto& m : config.ensemble.members) report.members.push_back(to_string(m.kind()));

    std::vector<std::size_t> window_fold(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) window_fold[i] = folds.fold(table.trial_ids[i]);

    const std::size_t n_members = config.ensemble.members.size();
    for (std::size_t f = 0; f < config.folds; ++f) {
        const std::string stage = "fold " + std::to_string(f) + ": ";
        std::vector<std::size_t> train_rows, test_rows;
        std::vector<std::string> train_ids, test_ids;
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (window_fold[i] == f) {
                test_rows.push_back(i);
                test_ids.push_back(table.trial_ids[i]);
            } else {
                train_rows.push_back(i);
                train_ids.push_back(table.trial_ids[i]);
            }
        }
        assert_no_leakage(f, train_ids, test_ids);
        if (test_rows.empty()) throw Error(stage + "no test windows");
        if (train_rows.size() < 2) throw Error(stage + "fewer than 2 training windows");

        FoldResult fr;
        fr.fold = f;
        fr.train_windows = train_rows.size();
        fr.test_windows = test_rows.size();
        fr.train_trials = std::set<std::string>(train_ids.begin(), train_ids.end()).size();
        fr.test_trials = std::set<std::string>(test_ids.begin(), test_ids.end()).size();

        const Matrix train_raw = table.values.select_rows(train_rows);
        const Standardizer standardizer = fit_standardizer(train_raw);
        std::vector<int> train_labels;
        for (auto r : train_rows) train_labels.push_back(table.labels[r]);
        const TrainingSet ts(standardizer.apply(train_raw), std::move(train_labels));

        EnsembleSpec spec = config.ensemble;
        for (std::size_t m = 0; m < spec.members.size(); ++m) {
            spec.members[m].set_seed(derive_seed(config.seed, 1 + f * 64 + m));
        }
        std::optional<EnsembleModel> model;
        try {
            model.emplace(fit_ensemble(spec, ts));
        } catch (const std::exception& e) {
            throw Error(stage + "training: " + e.what());
        }

        std::vector<int> y_true, y_pred;
        std::vector<std::vector<int>> member_pred(n_members);
        std::vector<int> member_labels;
        for (auto r : test_rows) {
            const auto x = standardizer.apply(table.values.row(r));
            const auto label = model->predict(x, member_labels);
            y_true.push_back(table.labels[r]);
            y_pred.push_back(label.value_or(kAbstain));
            if (!label) ++fr.abstentions;
            for (std::size_t m = 0; m < n_members; ++m) member_pred[m].push_back(member_labels[m]);
        }
        const auto counts = confusion_counts(y_true, y_pred);
        fr.accuracy = accuracy(y_true, y_pred);
        fr.precision = macro_precision(counts);
        fr.recall = macro_recall(counts);
        fr.fscore = macro_fscore(counts);
        fr.undefined_recall_classes = undefined_recall_classes(counts);
        for (std::size_t m = 0; m < n_members; ++m) fr.member_accuracy.push_back(accuracy(y_true, member_pred[m]));
        report.folds.push_back(std::move(fr));
    }

    auto collect = [&](auto field) {
        std::vector<double> v;
        for (const auto& fr : report.folds) v.push_back(field(fr));
        return summarize(std::move(v), config.confidence_level);
    };
    report.accuracy = collect([](const FoldResult& r) { return r.accuracy; });
    report.precision = collect([](const FoldResult& r) { return r.precision; });
    report.recall = collect([](const FoldResult& r) { return r.recall; });
    report.fscore = collect([](const FoldResult& r) { return r.fscore; });
    for (std::size_t m = 0; m < n_members; ++m) {
        report.member_accuracy.push_back(collect([m](const FoldResult& r) { return r.member_accuracy[m]; }));
    }
    return report;
}

// --- report serialisation ------------------------------------------------------------

namespace {

json summary_json(const MetricSummary& s) {
    return json{{"per_fold", s.per_fold}, {"mean", s.mean}, {"ci", {s.lo, s.hi}}};
}

MetricSummary summary_from(const json& j) {
    MetricSummary s;
    s.per_fold = j.at("per_fold").get<std::vector<double>>();
    s.mean = j.at("mean").get<double>();
    s.lo = j.at("ci").at(0).get<double>();
    s.hi = j.at("ci").at(1).get<double>();
    return s;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string signed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.4f", v);
    return buf;
}

std::string ci_text(const MetricSummary& s) { return "(" + fixed4(s.lo) + ", " + fixed4(s.hi) + ")"; }

std::string cell(const std::string& text, std::size_t width) {
    std::string out = " " + text;
    if (out.size() < width) out.append(width - out.size(), ' ');
    return out + "|";
}

// Accuracy / Recall / F-score groups, one sub-column per method, mirroring the
// published comparison table.
std::string render_grid(const std::string& dataset, const std::vector<std::string>& methods,
                        const std::vector<std::vector<const MetricSummary*>>& by_metric,
                        const std::vector<std::string>& delta_row) {
    constexpr std::size_t kCol = 19;
    const std::size_t per_group = methods.size();
    const std::size_t group_width = per_group * (kCol + 1) - 1;
    const std::size_t total = 3 * (group_width + 1);
    const std::string rule = "+" + std::string(total - 1, '-') + "+\n";

    std::ostringstream out;
    out << rule << "|";
    for (const char* name : {"Accuracy", "Recall", "F-score"}) out << cell(name, group_width);
    out << "\n|";
    for (int g = 0; g < 3; ++g) {
        for (const auto& m : methods) out << cell(m, kCol);
    }
    out << "\n" << rule << "|" << cell(dataset, total - 1) << "\n" << rule << "|";
    for (int g = 0; g < 3; ++g) {
        for (std::size_t m = 0; m < per_group; ++m) out << cell(fixed4(by_metric[g][m]->mean), kCol);
    }
    out << "\n|";
    for (int g = 0; g < 3; ++g) {
        for (std::size_t m = 0; m < per_group; ++m) out << cell(ci_text(*by_metric[g][m]), kCol);
    }
    out << "\n";
    if (!delta_row.empty()) {
        out << "|";
        for (int g = 0; g < 3; ++g) {
            for (std::size_t m = 0; m < per_group; ++m) out << cell(m == 0 ? delta_row[g] : "", kCol);
        }
        out << "\n";
    }
    out << rule;
    return out.str();
}

}  // namespace

json EvaluationReport::to_json() const {
    json folds_json = json::array();
    for (const auto& f : folds) {
        folds_json.push_back(json{{"fold", f.fold},
                                  {"train_trials", f.train_trials},
                                  {"test_trials", f.test_trials},
                                  {"train_windows", f.train_windows},
                                  {"test_windows", f.test_windows},
                                  {"accuracy", f.accuracy},
                                  {"precision", f.precision},
                                  {"recall", f.recall},
                                  {"fscore", f.fscore},
                                  {"member_accuracy", f.member_accuracy},
                                  {"abstentions", f.abstentions},
                                  {"undefined_recall_classes", f.undefined_recall_classes}});
    }
    json members_json = json::array();
    for (std::size_t m = 0; m < members.size(); ++m) {
        members_json.push_back(json{{"kind", members[m]}, {"accuracy", summary_json(member_accuracy[m])}});
    }
    return json{{"format", "har-report"},
                {"version", 1},
                {"metadata",
                 {{"config", har::to_json(config)},
                  {"window_samples", window_samples},
                  {"fft_length", fft_length},
                  {"feature_dimension", feature_dimension},
                  {"n_trials", n_trials},
                  {"n_windows", n_windows},
                  {"classes", classes},
                  {"accuracy_definition", "overall match rate"},
                  {"recall_fscore_averaging", "macro (unweighted over classes present in truth or prediction)"},
                  {"ci_method", "student-t over fold values"}}},
                {"folds", folds_json},
                {"aggregate",
                 {{"accuracy", summary_json(accuracy)},
                  {"precision", summary_json(precision)},
                  {"recall", summary_json(recall)},
                  {"fscore", summary_json(fscore)}}},
                {"members", members_json},
                {"table", render_table()}};
}

EvaluationReport EvaluationReport::from_json(const json& j) {
    if (j.value("format", "") != "har-report") throw Error("not a har-report document");
    EvaluationReport r;
    try {
        const auto& meta = j.at("metadata");
        r.config = pipeline_config_from_json(meta.at("config"));
        r.window_samples = meta.at("window_samples").get<std::size_t>();
        r.fft_length = meta.at("fft_length").get<std::size_t>();
        r.feature_dimension = meta.at("feature_dimension").get<std::size_t>();
        r.n_trials = meta.at("n_trials").get<std::size_t>();
        r.n_windows = meta.at("n_windows").get<std::size_t>();
        r.classes = meta.at("classes").get<std::vector<int>>();
        for (const auto& f : j.at("folds")) {
            FoldResult fr;
            fr.fold = f.at("fold").get<std::size_t>();
            fr.train_trials = f.at("train_trials").get<std::size_t>();
            fr.test_trials = f.at("test_trials").get<std::size_t>();
            fr.train_windows = f.at("train_windows").get<std::size_t>();
            fr.test_windows = f.at("test_windows").get<std::size_t>();
            fr.accuracy = f.at("accuracy").get<double>();
            fr.precision = f.at("precision").get<double>();
            fr.recall = f.at("recall").get<double>();
            fr.fscore = f.at("fscore").get<double>();
            fr.member_accuracy = f.at("member_accuracy").get<std::vector<double>>();
            fr.abstentions = f.at("abstentions").get<std::size_t>();
            fr.undefined_recall_classes = f.at("undefined_recall_classes").get<std::vector<int>>();
            r.folds.push_back(std::move(fr));
        }
        const auto& agg = j.at("aggregate");
        r.accuracy = summary_from(agg.at("accuracy"));
        r.precision = summary_from(agg.at("precision"));
        r.recall = summary_from(agg.at("recall"));
        r.fscore = summary_from(agg.at("fscore"));
        for (const auto& m : j.at("members")) {
            r.members.push_back(m.at("kind").get<std::string>());
            r.member_accuracy.push_back(summary_from(m.at("accuracy")));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
    return r;
}

std::string EvaluationReport::render_table() const {
    return render_grid(config.dataset_id, {config.method}, {{&accuracy}, {&recall}, {&fscore}}, {});
}

void save_report(const EvaluationReport& report, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << report.to_json().dump(2) << '\n';
    if (!out) throw Error("write failed: " + path.string());
}

EvaluationReport load_report(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return EvaluationReport::from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

// --- comparison ----------------------------------------------------------------------

Comparison compare(const EvaluationReport& a, const EvaluationReport& b) {
    Comparison c;
    c.dataset_id = a.config.dataset_id == b.config.dataset_id ? a.config.dataset_id
                                                               : a.config.dataset_id + " / " + b.config.dataset_id;
    c.method_a = a.config.method;
    c.method_b = b.config.method;
    if (c.method_a == c.method_b) {
        c.method_a += " (A)";
        c.method_b += " (B)";
    }
    c.rows.push_back({"Accuracy", a.accuracy, b.accuracy, a.accuracy.mean - b.accuracy.mean});
    c.rows.push_back({"Recall", a.recall, b.recall, a.recall.mean - b.recall.mean});
    c.rows.push_back({"F-score", a.fscore, b.fscore, a.fscore.mean - b.fscore.mean});
    return c;
}

std::string Comparison::render() const {
    std::vector<std::vector<const MetricSummary*>> by_metric;
    std::vector<std::string> deltas;
    for (const auto& r : rows) {
        by_metric.push_back({&r.a, &r.b});
        deltas.push_back("delta " + signed4(r.delta));
    }
    return render_grid(dataset_id, {method_a, method_b}, by_metric, deltas);
}

json Comparison::to_json() const {
    json rows_json = json::array();
    for (const auto& r : rows) {
        rows_json.push_back(json{{"metric", r.metric},
                                 {"a", {{"mean", r.a.mean}, {"ci", {r.a.lo, r.a.hi}}}},
                                 {"b", {{"mean", r.b.mean}, {"ci", {r.b.lo, r.b.hi}}}},
                                 {"delta", r.delta}});
    }
    return json{{"dataset_id", dataset_id}, {"method_a", method_a}, {"method_b", method_b}, {"rows", rows_json}};
}

// --- synthetic benchmark -------------------------------------------------------------

std::vector<LabeledRecording> make_synthetic_dataset(std::uint64_t seed, const SyntheticOptions& options) {
    if (options.classes < 2) throw Error("synthetic dataset needs at least 2 classes");
    if (options.trials_per_class < 1) throw Error("synthetic dataset needs at least 1 trial per class");
    const auto trial_len = static_cast<std::size_t>(std::lround(options.trial_seconds * options.rate_hz));
    if (trial_len < 2) throw Error("synthetic trials must be at least 2 samples long");

    Rng rng(seed);
    const std::vector<double> axis_gain{1.0, 0.6, 0.3};
    const std::vector<double> axis_offset{0.0, 0.0, 1.0};
    std::vector<LabeledRecording> out;
    for (std::size_t s = 0; s < options.trials_per_class; ++s) {
        LabeledRecording rec;
        rec.subject_id = "synth" + std::to_string(s + 1);
        rec.sampling_rate_hz = options.rate_hz;
        for (const char* n : {"synth_acc_x", "synth_acc_y", "synth_acc_z"}) rec.channels.push_back(channel_from_name(n));
        if (options.classes == 3) {
            rec.label_map = synthetic_label_map();
            rec.label_set = "synthetic";
        } else {
            for (std::size_t c = 0; c < options.classes; ++c) {
                rec.label_map.emplace(static_cast<int>(c + 1), "class_" + std::to_string(c + 1));
            }
        }
        rec.samples = Matrix(0, 3);
        for (std::size_t k = 0; k < options.classes; ++k) {
            const std::size_t c = (k + s) % options.classes;
            const double freq = 1.0 + 1.5 * static_cast<double>(c);
            const double amp = 0.7 + 0.4 * static_cast<double>((c + 1) % 3);
            double phase[3], gain[3];
            for (int a = 0; a < 3; ++a) {
                phase[a] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
                gain[a] = amp * axis_gain[a] * uniform(rng, 0.9, 1.1);
            }
            double row[3];
            for (std::size_t t = 0; t < trial_len; ++t) {
                const double time = static_cast<double>(t) / options.rate_hz;
                for (int a = 0; a < 3; ++a) {
                    row[a] = axis_offset[a] + gain[a] * std::sin(2.0 * std::numbers::pi * freq * time + phase[a]) +
                             options.noise_sigma * standard_normal(rng);
                }
                rec.samples.append_row(row);
                rec.labels.push_back(static_cast<int>(c + 1));
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace har
