// har: command-line front end for the activity recognition pipeline.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "har/config.hpp"
#include "har/harness.hpp"

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw har::Error("cannot write " + path);
    return out;
}

har::PipelineConfig config_or_default(const std::string& path) {
    return path.empty() ? har::PipelineConfig{} : har::load_pipeline_config(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wearable-sensor activity recognition: ingest, features, ensemble evaluation"};
    app.require_subcommand(1);

    // convert
    std::string conv_format = "mhealth", conv_in, conv_out;
    double conv_rate = 0.0;
    bool keep_ecg = false;
    auto* convert = app.add_subcommand("convert", "Convert a raw dataset into canonical CSV");
    convert->add_option("--format", conv_format, "Input format")->check(CLI::IsMember({"mhealth"}));
    convert->add_option("--in", conv_in, "Directory of mHealth_subject<N>.log files")->required();
    convert->add_option("--out", conv_out, "Canonical CSV to write")->required();
    convert->add_option("--rate", conv_rate, "Sampling rate in Hz (default: dataset's own)");
    convert->add_flag("--keep-ecg", keep_ecg, "Keep the two ECG leads");

    // features
    std::string feat_config, feat_in, feat_out;
    auto* features = app.add_subcommand("features", "Window a dataset and dump per-window features");
    features->add_option("--config", feat_config, "Run configuration (JSON)");
    features->add_option("--in", feat_in, "Canonical CSV")->required();
    features->add_option("--out", feat_out, "Feature CSV to write")->required();

    // windows
    std::string win_config, win_in, win_out;
    auto* windows = app.add_subcommand("windows", "Dump the windows of a dataset as canonical CSV");
    windows->add_option("--config", win_config, "Run configuration (JSON)");
    windows->add_option("--in", win_in, "Canonical CSV")->required();
    windows->add_option("--out", win_out, "Window CSV to write")->required();

    // eval
    std::string eval_config, eval_data, eval_preset, eval_out;
    std::optional<std::uint64_t> eval_seed;
    auto* eval = app.add_subcommand("eval", "Cross-validate an ensemble with leave-one-trial-out folds");
    eval->add_option("--config", eval_config, "Run configuration (JSON)");
    eval->add_option("--data", eval_data, "Canonical CSV")->required();
    eval->add_option("--preset", eval_preset, "Ensemble preset, overriding the config")
        ->check(CLI::IsMember({"proposed", "catal"}));
    eval->add_option("--seed", eval_seed, "RNG seed, overriding the config");
    eval->add_option("--out", eval_out, "Report file (JSON)")->required();

    // compare
    std::string cmp_a, cmp_b, cmp_out;
    auto* compare = app.add_subcommand("compare", "Side-by-side table of two reports");
    compare->add_option("report_a", cmp_a)->required();
    compare->add_option("report_b", cmp_b)->required();
    compare->add_option("--out", cmp_out, "Table file (stdout when omitted)");

    // synth
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "Write the seeded 3-class synthetic benchmark");
    synth->add_option("--seed", synth_seed, "RNG seed");
    synth->add_option("--out", synth_out, "Canonical CSV to write")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*convert) {
            const double rate = conv_rate > 0.0 ? conv_rate : har::kMhealthRateHz;
            auto recs = har::read_mhealth_dir(conv_in, rate);
            if (!keep_ecg) {
                for (auto& r : recs) {
                    auto groups = r.groups();
                    std::erase(groups, "ecg");
                    r = har::select_channels(r, groups);
                }
            }
            har::write_canonical_dataset(conv_out, recs);
            std::cerr << "wrote " << recs.size() << " recordings to " << conv_out << '\n';
        } else if (*features || *windows) {
            const bool dump_features = static_cast<bool>(*features);
            const auto cfg = config_or_default(dump_features ? feat_config : win_config);
            const auto data = har::load_canonical_dataset(dump_features ? feat_in : win_in);
            const auto trials = har::prepare_trials(data, cfg);
            const auto ws = har::make_windows(trials, cfg.scheme, cfg.window_seconds, cfg.overlap);
            auto out = open_out(dump_features ? feat_out : win_out);
            if (dump_features) {
                har::write_feature_dump(out, har::extract_features(ws, cfg.features));
            } else {
                har::write_window_dump(out, ws);
            }
            std::cerr << trials.size() << " trials, " << ws.size() << " windows\n";
        } else if (*eval) {
            auto cfg = config_or_default(eval_config);
            if (!eval_preset.empty()) {
                const auto tiebreak = cfg.ensemble.tiebreak;
                const auto rule = cfg.ensemble.rule;
                nlohmann::json hyper;
                if (!eval_config.empty()) {
                    std::ifstream in(eval_config);
                    hyper = nlohmann::json::parse(in, nullptr, true, true).value("hyperparameters", nlohmann::json{});
                }
                cfg.ensemble = har::ensemble_spec_from_json({{"preset", eval_preset}}, hyper);
                cfg.ensemble.rule = rule;
                cfg.ensemble.tiebreak = tiebreak;
                cfg.method = eval_preset;
            }
            if (eval_seed) cfg.seed = *eval_seed;
            const auto data = har::load_canonical_dataset(eval_data);
            const auto report = har::cross_validate(data, cfg);
            har::save_report(report, eval_out);
            std::cout << report.render_table();
        } else if (*compare) {
            const auto table = har::compare(har::load_report(cmp_a), har::load_report(cmp_b)).render();
            if (cmp_out.empty()) {
                std::cout << table;
            } else {
                open_out(cmp_out) << table;
            }
        } else if (*synth) {
            const auto recs = har::make_synthetic_dataset(synth_seed);
            har::write_canonical_dataset(synth_out, recs);
            std::cerr << "wrote " << recs.size() << " synthetic recordings to " << synth_out << '\n';
        }
    } catch (const std::exception& e) {
        std::cerr << "har: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
