#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "har/config.hpp"
#include "har/harness.hpp"
#include "har/metrics.hpp"

namespace py = pybind11;
using namespace har;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    if (a.ndim() != 2) throw Error("expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.data().begin());
    return m;
}

Array to_array(const Matrix& m) {
    Array out({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const Array& a) {
    if (a.ndim() != 1) throw Error("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

std::vector<std::string> channel_names(const std::vector<ChannelSpec>& channels) {
    std::vector<std::string> out;
    for (const auto& c : channels) out.push_back(c.name);
    return out;
}

std::vector<ChannelSpec> channels_from_names(const std::vector<std::string>& names) {
    std::vector<ChannelSpec> out;
    for (const auto& n : names) out.push_back(channel_from_name(n));
    return out;
}

nlohmann::json parse_json(const std::string& text) {
    return text.empty() ? nlohmann::json::object() : nlohmann::json::parse(text);
}

VoteRule vote_rule(const std::string& name) {
    switch (combine_rule_from_string(name)) {
        case CombineRule::Plurality: return VoteRule::Plurality;
        case CombineRule::Majority: return VoteRule::Majority;
        case CombineRule::Unanimous: return VoteRule::Unanimous;
        default: throw Error("not a hard-vote rule: " + name);
    }
}

SoftRule soft_rule(const std::string& name) {
    switch (combine_rule_from_string(name)) {
        case CombineRule::Sum: return SoftRule::Sum;
        case CombineRule::Product: return SoftRule::Product;
        case CombineRule::Min: return SoftRule::Min;
        case CombineRule::Max: return SoftRule::Max;
        case CombineRule::Median: return SoftRule::Median;
        default: throw Error("not a soft-vote rule: " + name);
    }
}

ConfusionCounts counts_of(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
    return confusion_counts(y_true, y_pred);
}

// Trained model plus the class list, so Python never sees a raw Classifier pointer.
struct Model {
    std::shared_ptr<const Classifier> impl;

    Array predict_proba(const Array& x) const {
        const auto m = to_matrix(x);
        Array out({m.rows(), impl->n_classes()});
        auto* dst = out.mutable_data();
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const auto p = impl->predict_proba(m.row(i));
            std::copy(p.begin(), p.end(), dst + i * p.size());
        }
        return out;
    }
    std::vector<int> predict(const Array& x) const {
        const auto m = to_matrix(x);
        std::vector<int> out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) out[i] = impl->predict(m.row(i));
        return out;
    }
    std::string save() const {
        std::ostringstream out;
        save_model(*impl, out);
        return out.str();
    }
};

}  // namespace

PYBIND11_MODULE(_har, m) {
    m.doc() = "Wearable-sensor activity recognition: data loading, windowing, features, learners, ensembles.";

    // translators run newest first, so the subclass is registered last
    auto base = py::register_exception<Error>(m, "HarError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::class_<LabeledRecording>(m, "Recording")
        .def(py::init([](std::string subject, double rate, const std::vector<std::string>& channels,
                         const Array& samples, std::vector<int> labels) {
                 LabeledRecording rec;
                 rec.subject_id = std::move(subject);
                 rec.sampling_rate_hz = rate;
                 rec.channels = channels_from_names(channels);
                 rec.samples = to_matrix(samples);
                 rec.labels = std::move(labels);
                 rec.validate();
                 return rec;
             }),
             py::arg("subject_id"), py::arg("sampling_rate_hz"), py::arg("channels"), py::arg("samples"),
             py::arg("labels"))
        .def_readonly("subject_id", &LabeledRecording::subject_id)
        .def_readonly("sampling_rate_hz", &LabeledRecording::sampling_rate_hz)
        .def_property_readonly("channels", [](const LabeledRecording& r) { return channel_names(r.channels); })
        .def_property_readonly("samples", [](const LabeledRecording& r) { return to_array(r.samples); })
        .def_readonly("labels", &LabeledRecording::labels)
        .def_readonly("label_map", &LabeledRecording::label_map)
        .def("groups", &LabeledRecording::groups)
        .def("__len__", &LabeledRecording::n_samples);

    py::class_<SensorTrial>(m, "Trial")
        .def_readonly("trial_id", &SensorTrial::trial_id)
        .def_readonly("subject_id", &SensorTrial::subject_id)
        .def_readonly("label", &SensorTrial::label)
        .def_readonly("sampling_rate_hz", &SensorTrial::sampling_rate_hz)
        .def_property_readonly("channels", [](const SensorTrial& t) { return channel_names(t.channels); })
        .def_property_readonly("samples", [](const SensorTrial& t) { return to_array(t.samples); })
        .def("__len__", &SensorTrial::length);

    py::class_<Window>(m, "Window")
        .def_readonly("trial_id", &Window::trial_id)
        .def_readonly("label", &Window::label)
        .def_readonly("start_index", &Window::start_index)
        .def_property_readonly("samples", [](const Window& w) { return to_array(w.samples); });

    // data
    m.def("load_dataset",
          [](const std::filesystem::path& path, const std::string& label_set) {
              return label_set.empty() ? load_canonical_dataset(path)
                                       : load_canonical_dataset(path, label_map_by_name(label_set));
          },
          py::arg("path"), py::arg("label_set") = "");
    m.def("write_dataset", &write_canonical_dataset, py::arg("path"), py::arg("recordings"));
    m.def("read_mhealth_file", &read_mhealth_file, py::arg("path"), py::arg("subject_id"),
          py::arg("sampling_rate_hz") = kMhealthRateHz);
    m.def("read_mhealth_dir", &read_mhealth_dir, py::arg("dir"), py::arg("sampling_rate_hz") = kMhealthRateHz);
    m.def("select_channels", &select_channels, py::arg("recording"), py::arg("groups"));
    m.def("segment_trials", &segment_trials, py::arg("recording"), py::arg("min_trial_len") = 1,
          py::arg("exclude_labels") = std::set<int>{});
    m.def("synthetic_dataset",
          [](std::uint64_t seed, std::size_t trials_per_class, double trial_seconds, double rate_hz) {
              SyntheticOptions opt;
              opt.trials_per_class = trials_per_class;
              opt.trial_seconds = trial_seconds;
              opt.rate_hz = rate_hz;
              return make_synthetic_dataset(seed, opt);
          },
          py::arg("seed"), py::arg("trials_per_class") = 20, py::arg("trial_seconds") = 10.0,
          py::arg("rate_hz") = 50.0);

    // windowing
    m.def("make_windows",
          [](const std::vector<SensorTrial>& trials, const std::string& scheme, double seconds, double overlap) {
              return make_windows(trials, window_scheme_from_string(scheme), seconds, overlap);
          },
          py::arg("trials"), py::arg("scheme") = "snow", py::arg("window_seconds") = 5.0, py::arg("overlap") = 0.5);
    m.def("window_length_samples", &window_length_samples, py::arg("window_seconds"), py::arg("sampling_rate_hz"));
    m.def("loto_folds",
          [](const std::vector<SensorTrial>& trials, std::size_t k, std::uint64_t seed) {
              return loto_folds(trials, k, seed).fold_of;
          },
          py::arg("trials"), py::arg("k"), py::arg("seed"));

    // features
    m.def("time_features",
          [](const Array& series) {
              const auto v = to_vector(series);
              const auto nv = time_features(v, FeatureConfig{.variance = true});
              std::map<std::string, double> out;
              for (std::size_t i = 0; i < nv.names.size(); ++i) out[nv.names[i]] = nv.values[i];
              return out;
          },
          py::arg("series"));
    m.def("dft", [](const Array& series) { return dft(to_vector(series)); }, py::arg("series"));
    m.def("dct2", [](const Array& series, std::size_t c) { return dct2(to_vector(series), c); }, py::arg("series"),
          py::arg("n_coeffs"));
    m.def("extract_features",
          [](const std::vector<Window>& windows, const std::string& config_json) {
              const auto t = extract_features(windows, feature_config_from_json(parse_json(config_json)));
              return py::make_tuple(t.names, to_array(t.values), t.labels, t.trial_ids);
          },
          py::arg("windows"), py::arg("config_json") = "");

    // learners
    py::class_<Model>(m, "Model")
        .def_property_readonly("kind", [](const Model& md) { return to_string(md.impl->kind()); })
        .def_property_readonly("classes", [](const Model& md) { return md.impl->classes(); })
        .def("predict_proba", &Model::predict_proba, py::arg("x"))
        .def("predict", &Model::predict, py::arg("x"))
        .def("save", &Model::save);
    m.def("train",
          [](const std::string& spec_json, const Array& x, std::vector<int> y) {
              const auto spec = classifier_spec_from_json(parse_json(spec_json));
              return Model{train(spec, TrainingSet(to_matrix(x), std::move(y)))};
          },
          py::arg("spec_json"), py::arg("x"), py::arg("y"));
    m.def("load_model",
          [](const std::string& text) {
              std::istringstream in(text);
              return Model{load_model(in)};
          },
          py::arg("text"));

    // voting
    m.def("hard_vote",
          [](const std::vector<int>& labels, const std::string& rule, const std::string& tiebreak) {
              return hard_vote(labels, vote_rule(rule), tiebreak_from_string(tiebreak));
          },
          py::arg("labels"), py::arg("rule") = "plurality", py::arg("tiebreak") = "lowest_code");
    m.def("soft_vote",
          [](const std::vector<std::vector<double>>& dists, const std::string& rule) {
              const auto r = soft_vote(dists, soft_rule(rule));
              return py::make_tuple(r.label, r.scores);
          },
          py::arg("distributions"), py::arg("rule") = "sum");

    // metrics
    m.def("accuracy", [](const std::vector<int>& t, const std::vector<int>& p) { return accuracy(t, p); },
          py::arg("y_true"), py::arg("y_pred"));
    m.def("macro_precision", [](const std::vector<int>& t, const std::vector<int>& p) {
        return macro_precision(counts_of(t, p));
    });
    m.def("macro_recall", [](const std::vector<int>& t, const std::vector<int>& p) {
        return macro_recall(counts_of(t, p));
    });
    m.def("macro_fscore", [](const std::vector<int>& t, const std::vector<int>& p) {
        return macro_fscore(counts_of(t, p));
    });
    m.def("confidence_interval",
          [](const std::vector<double>& v, double level) { return confidence_interval(v, level); },
          py::arg("values"), py::arg("level") = 0.90);
    m.attr("ABSTAIN") = kAbstain;

    // evaluation
    m.def("cross_validate",
          [](const std::vector<LabeledRecording>& data, const std::string& config_json) {
              const auto cfg = pipeline_config_from_json(parse_json(config_json));
              EvaluationReport report;
              {
                  py::gil_scoped_release release;
                  report = cross_validate(data, cfg);
              }
              return report.to_json().dump();
          },
          py::arg("recordings"), py::arg("config_json") = "");
    m.def("render_report", [](const std::string& report_json) {
        return EvaluationReport::from_json(nlohmann::json::parse(report_json)).render_table();
    });
}
