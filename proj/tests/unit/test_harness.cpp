#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "har/harness.hpp"
#include "test_support.hpp"

using namespace har;
using doctest::Approx;

namespace {

PipelineConfig light_config(std::size_t folds = 4) {
    PipelineConfig cfg;
    cfg.dataset_id = "synthetic-small";
    cfg.method = "light";
    cfg.window_seconds = 2.0;
    cfg.folds = folds;
    cfg.seed = 5;
    cfg.ensemble = ensemble_spec_from_json(
        {{"members", {{{"kind", "gnb"}}, {{"kind", "knn"}, {"k", 3}}, {{"kind", "cart"}, {"max_depth", 4}}}}});
    return cfg;
}

std::vector<LabeledRecording> small_dataset(std::uint64_t seed = 3) {
    SyntheticOptions opt;
    opt.trials_per_class = 4;
    opt.trial_seconds = 6.0;
    opt.rate_hz = 20.0;
    return make_synthetic_dataset(seed, opt);
}

MetricSummary summary_of(std::vector<double> v) { return summarize(std::move(v), 0.9); }

}  // namespace

TEST_CASE("synthetic benchmark layout") {
    const auto data = make_synthetic_dataset(1);
    REQUIRE(data.size() == 20);
    const auto trials = prepare_trials(data, PipelineConfig{});
    CHECK(trials.size() == 60);
    std::map<int, int> per_class;
    std::set<std::string> ids;
    for (const auto& t : trials) {
        ++per_class[t.label];
        ids.insert(t.trial_id);
        CHECK(t.length() == 500);
        CHECK(t.channels.size() == 3);
    }
    CHECK(ids.size() == 60);
    CHECK(per_class == std::map<int, int>{{1, 20}, {2, 20}, {3, 20}});
    CHECK(make_synthetic_dataset(1)[7].samples == data[7].samples);
    CHECK(make_synthetic_dataset(2)[7].samples != data[7].samples);
}

TEST_CASE("cross_validate") {
    const auto data = small_dataset();
    const auto cfg = light_config();
    const auto report = cross_validate(data, cfg);

    SUBCASE("report shape") {
        CHECK(report.folds.size() == 4);
        CHECK(report.n_trials == 12);
        CHECK(report.window_samples == 40);
        CHECK(report.fft_length == 64);
        CHECK(report.feature_dimension == 75);
        CHECK(report.classes == std::vector<int>{1, 2, 3});
        CHECK(report.members == std::vector<std::string>{"gnb", "knn", "cart"});
        CHECK(report.member_accuracy.size() == 3);
        std::size_t test_windows = 0;
        for (const auto& f : report.folds) {
            test_windows += f.test_windows;
            CHECK(f.test_trials == 3);
            CHECK(f.train_trials == 9);
            for (double m : {f.accuracy, f.precision, f.recall, f.fscore}) {
                CHECK(m >= 0.0);
                CHECK(m <= 1.0);
            }
        }
        CHECK(test_windows == report.n_windows);
    }
    SUBCASE("means lie inside their intervals") {
        for (const auto* s : {&report.accuracy, &report.precision, &report.recall, &report.fscore}) {
            CHECK(s->lo <= s->mean);
            CHECK(s->mean <= s->hi);
            CHECK(s->per_fold.size() == 4);
        }
    }
    SUBCASE("same seed, identical report") {
        CHECK(cross_validate(data, cfg).to_json().dump() == report.to_json().dump());
    }
    SUBCASE("report JSON round-trips") {
        CHECK(EvaluationReport::from_json(report.to_json()).to_json() == report.to_json());
        const auto path = std::filesystem::temp_directory_path() / "har_test_report.json";
        save_report(report, path);
        CHECK(load_report(path).to_json() == report.to_json());
        std::filesystem::remove(path);
    }
    SUBCASE("more folds than trials") {
        CHECK_THROWS_AS(cross_validate(data, light_config(13)), Error);
    }
    SUBCASE("rendered table") {
        const auto table = report.render_table();
        CHECK(table.find("Accuracy") != std::string::npos);
        CHECK(table.find("F-score") != std::string::npos);
        CHECK(table.find("synthetic-small") != std::string::npos);
    }
}

TEST_CASE("strict mode counts abstentions") {
    auto cfg = light_config();
    cfg.strict = true;
    cfg.ensemble.tiebreak = TieBreak::Abstain;
    cfg.ensemble.rule = CombineRule::Unanimous;
    const auto report = cross_validate(small_dataset(9), cfg);
    std::size_t abstained = 0;
    for (const auto& f : report.folds) abstained += f.abstentions;
    const auto relaxed = [&] {
        auto c = cfg;
        c.strict = false;
        c.ensemble.tiebreak = TieBreak::SoftSum;
        return cross_validate(small_dataset(9), c);
    }();
    MESSAGE("abstentions: " << abstained);
    CHECK(report.accuracy.mean <= relaxed.accuracy.mean);
}

TEST_CASE("leakage assertion") {
    CHECK_NOTHROW(assert_no_leakage(0, {"a", "b"}, {"c"}));
    CHECK_THROWS_WITH_AS(assert_no_leakage(3, {"a", "b"}, {"c", "b"}), doctest::Contains("fold 3: trial b"), Error);
}

TEST_CASE("compare") {
    const auto report = cross_validate(small_dataset(), light_config());
    SUBCASE("a report against itself has zero deltas") {
        const auto c = compare(report, report);
        REQUIRE(c.rows.size() == 3);
        for (const auto& r : c.rows) CHECK(r.delta == 0.0);
        CHECK(c.render().find("+0.0000") != std::string::npos);
    }
    SUBCASE("deltas are differences of means") {
        Rng rng(8);
        for (int iter = 0; iter < 20; ++iter) {
            EvaluationReport a = report, b = report;
            const auto rand_summary = [&] {
                std::vector<double> v(5);
                for (auto& x : v) x = uniform01(rng);
                return summary_of(v);
            };
            a.accuracy = rand_summary(), a.recall = rand_summary(), a.fscore = rand_summary();
            b.accuracy = rand_summary(), b.recall = rand_summary(), b.fscore = rand_summary();
            a.config.method = "A";
            b.config.method = "B";
            const auto c = compare(a, b);
            CHECK(c.method_a == "A");
            CHECK(c.rows[0].metric == "Accuracy");
            CHECK(c.rows[0].delta == a.accuracy.mean - b.accuracy.mean);
            CHECK(c.rows[1].delta == a.recall.mean - b.recall.mean);
            CHECK(c.rows[2].delta == a.fscore.mean - b.fscore.mean);
        }
    }
}

TEST_CASE("pipeline configuration JSON") {
    SUBCASE("defaults") {
        const auto cfg = pipeline_config_from_json(nlohmann::json::object());
        CHECK(cfg.window_seconds == 5.0);
        CHECK(cfg.overlap == 0.5);
        CHECK(cfg.folds == 10);
        CHECK(cfg.scheme == WindowScheme::Snow);
        CHECK(cfg.method == "proposed");
        CHECK(cfg.ensemble.members.size() == 5);
    }
    SUBCASE("preset, hyperparameters and member overrides") {
        const auto cfg = pipeline_config_from_json(nlohmann::json::parse(R"({
            "windowing": "fnow", "folds": 5, "seed": 42,
            "ensemble": {"preset": "catal", "rule": "majority"},
            "hyperparameters": {"mlp": {"hidden": 16}, "cart": {"max_depth": 6}}
        })"));
        CHECK(cfg.scheme == WindowScheme::Fnow);
        CHECK(cfg.method == "catal");
        CHECK(cfg.ensemble.rule == CombineRule::Majority);
        CHECK(std::get<MlpParams>(cfg.ensemble.members[2].params).hidden == 16);
        CHECK(std::get<CartParams>(cfg.ensemble.members[0].params).max_depth == 6);

        const auto custom = pipeline_config_from_json(nlohmann::json::parse(R"({
            "ensemble": {"members": [{"kind": "knn", "k": 7}, {"kind": "knn"}]},
            "hyperparameters": {"knn": {"k": 2}}
        })"));
        CHECK(custom.method == "custom");
        CHECK(std::get<KnnParams>(custom.ensemble.members[0].params).k == 7);
        CHECK(std::get<KnnParams>(custom.ensemble.members[1].params).k == 2);
    }
    SUBCASE("strict implies abstention") {
        CHECK(pipeline_config_from_json({{"strict", true}}).ensemble.tiebreak == TieBreak::Abstain);
    }
    SUBCASE("misspelt keys fail") {
        CHECK_THROWS_AS(pipeline_config_from_json({{"window_second", 5}}), Error);
        CHECK_THROWS_AS(pipeline_config_from_json({{"hyperparameters", {{"mlp", {{"hiden", 3}}}}}}), Error);
        CHECK_THROWS_AS(pipeline_config_from_json({{"hyperparameters", {{"perceptron", nlohmann::json::object()}}}}),
                        Error);
        CHECK_THROWS_AS(pipeline_config_from_json({{"folds", 1}}), Error);
    }
    SUBCASE("to_json round-trips") {
        const auto cfg = light_config();
        const auto back = pipeline_config_from_json(to_json(cfg));
        CHECK(to_json(back) == to_json(cfg));
    }
    SUBCASE("files may carry comments") {
        const auto path = std::filesystem::temp_directory_path() / "har_test_config.json";
        {
            std::ofstream out(path);
            out << "{\n  // five-second windows\n  \"window_seconds\": 5,\n  /* stratified */ \"folds\": 10\n}\n";
        }
        CHECK(load_pipeline_config(path).folds == 10);
        std::filesystem::remove(path);
    }
}
