#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "har/windowing.hpp"
#include "test_support.hpp"

using namespace har;

namespace {

// 1 Hz rate so window seconds equal window samples.
SensorTrial trial_of_length(std::size_t n, int label = 1, std::string id = "t", std::uint64_t seed = 3) {
    Rng rng(seed);
    SensorTrial t;
    t.trial_id = std::move(id);
    t.subject_id = "s";
    t.label = label;
    t.sampling_rate_hz = 1.0;
    t.channels = {channel_from_name("a_x"), channel_from_name("a_y")};
    t.samples = Matrix(n, 2);
    for (auto& v : t.samples.data()) v = standard_normal(rng);
    return t;
}

std::vector<SensorTrial> trials_with_labels(const std::vector<int>& labels) {
    std::vector<SensorTrial> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.push_back(trial_of_length(4, labels[i], "trial" + std::to_string(i), i));
    }
    return out;
}

std::vector<std::size_t> offsets(const std::vector<Window>& ws) {
    std::vector<std::size_t> out;
    for (const auto& w : ws) out.push_back(w.start_index);
    return out;
}

}  // namespace

TEST_CASE("window length is seconds times rate, rounded") {
    CHECK(window_length_samples(5.0, 50.0) == 250);
    CHECK(window_length_samples(5.0, 100.0) == 500);
    CHECK(window_length_samples(0.5, 3.0) == 2);  // 1.5 rounds away from zero
    CHECK(window_length_samples(1.0, 50.4) == 50);
    CHECK_THROWS_AS(window_length_samples(0.001, 50.0), Error);
    CHECK_THROWS_AS(window_length_samples(-1.0, 50.0), Error);
}

TEST_CASE("snow_windows") {
    SUBCASE("L=1000, w=250, overlap 0.5 gives 7 windows") {
        const auto ws = snow_windows(trial_of_length(1000), 250.0, 0.5);
        CHECK(offsets(ws) == std::vector<std::size_t>{0, 125, 250, 375, 500, 625, 750});
        for (const auto& w : ws) CHECK(w.samples.rows() == 250);
    }
    SUBCASE("overlap 0 equals fnow") {
        for (std::size_t n : {1u, 249u, 250u, 499u, 500u, 1000u, 1234u}) {
            const auto t = trial_of_length(n);
            const auto a = snow_windows(t, 250.0, 0.0);
            const auto b = fnow_windows(t, 250.0);
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(a[i].start_index == b[i].start_index);
                CHECK(a[i].samples == b[i].samples);
            }
        }
    }
    SUBCASE("trial shorter than a window yields nothing") {
        CHECK(snow_windows(trial_of_length(249), 250.0, 0.5).empty());
    }
    SUBCASE("stride never drops below one sample") {
        const auto ws = snow_windows(trial_of_length(12), 10.0, 0.99);
        CHECK(offsets(ws) == std::vector<std::size_t>{0, 1, 2});
    }
    SUBCASE("overlap outside [0, 1)") {
        CHECK_THROWS_AS(snow_windows(trial_of_length(10), 5.0, 1.0), Error);
        CHECK_THROWS_AS(snow_windows(trial_of_length(10), 5.0, -0.1), Error);
    }
}

TEST_CASE("fnow_windows") {
    CHECK(fnow_windows(trial_of_length(1000), 250.0).size() == 4);
    CHECK(fnow_windows(trial_of_length(499), 250.0).size() == 1);
    CHECK(fnow_windows(trial_of_length(100), 250.0).empty());
}

TEST_CASE("window counts and contents (property)") {
    Rng rng(11);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t w = 1 + uniform_index(rng, 40);
        const std::size_t n = 1 + uniform_index(rng, 200);
        const auto t = trial_of_length(n, 2, "p", rng());
        const auto snow = snow_windows(t, static_cast<double>(w), 0.5);
        const auto fnow = fnow_windows(t, static_cast<double>(w));

        const std::size_t s = std::max<std::size_t>(1, static_cast<std::size_t>(std::round(w * 0.5)));
        CHECK(snow.size() == (n < w ? 0 : (n - w) / s + 1));
        CHECK(fnow.size() == n / w);
        CHECK(snow.size() >= fnow.size());
        // strict for even w; an odd w rounds the stride up and can tie
        if (w % 2 == 0 && 2 * n >= 3 * w) CHECK(snow.size() > fnow.size());

        for (const auto* ws : {&snow, &fnow}) {
            for (const auto& win : *ws) {
                CHECK(win.start_index + w <= n);
                CHECK(win.label == t.label);
                CHECK(win.trial_id == t.trial_id);
                CHECK(win.samples == t.samples.slice_rows(win.start_index, w));
            }
        }
    }
}

TEST_CASE("make_windows rejects mixed sampling rates") {
    auto a = trial_of_length(20, 1, "a");
    auto b = trial_of_length(20, 2, "b");
    CHECK(make_windows({a, b}, WindowScheme::Fnow, 5.0, 0.5).size() == 8);
    b.sampling_rate_hz = 2.0;
    CHECK_THROWS_AS(make_windows({a, b}, WindowScheme::Snow, 5.0, 0.5), Error);
}

TEST_CASE("window scheme names") {
    CHECK(window_scheme_from_string("snow") == WindowScheme::Snow);
    CHECK(window_scheme_from_string("fnow") == WindowScheme::Fnow);
    CHECK(to_string(WindowScheme::Fnow) == "fnow");
    CHECK_THROWS_AS(window_scheme_from_string("sliding"), Error);
}

TEST_CASE("loto_folds") {
    SUBCASE("30 trials into 10 folds of 3") {
        std::vector<int> labels;
        for (int i = 0; i < 30; ++i) labels.push_back(1 + i % 3);
        const auto folds = loto_folds(trials_with_labels(labels), 10, 5);
        CHECK(folds.fold_count == 10);
        for (std::size_t f = 0; f < 10; ++f) CHECK(folds.trials_in(f).size() == 3);
    }
    SUBCASE("same seed gives the same assignment") {
        const auto trials = trials_with_labels(std::vector<int>(23, 1));
        CHECK(loto_folds(trials, 4, 99).fold_of == loto_folds(trials, 4, 99).fold_of);
        bool any_differs = false;
        for (std::uint64_t s = 0; s < 10 && !any_differs; ++s) {
            any_differs = loto_folds(trials, 4, s).fold_of != loto_folds(trials, 4, 99).fold_of;
        }
        CHECK(any_differs);
    }
    SUBCASE("two labels of 10 into 5 folds: 2 per label per fold") {
        std::vector<int> labels(10, 1);
        labels.resize(20, 2);
        const auto trials = trials_with_labels(labels);
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto folds = loto_folds(trials, 5, seed);
            for (std::size_t f = 0; f < 5; ++f) {
                std::map<int, int> per_label;
                for (const auto& t : trials) per_label[t.label] += folds.fold(t.trial_id) == f;
                CHECK(per_label[1] == 2);
                CHECK(per_label[2] == 2);
            }
        }
    }
    SUBCASE("errors") {
        const auto trials = trials_with_labels({1, 2, 3});
        CHECK_THROWS_AS(loto_folds(trials, 4, 0), Error);
        CHECK_THROWS_AS(loto_folds(trials, 1, 0), Error);
        auto dup = trials;
        dup[1].trial_id = dup[0].trial_id;
        CHECK_THROWS_AS(loto_folds(dup, 2, 0), Error);
    }
}

TEST_CASE("LOTO train and test partition the trials (property)") {
    Rng rng(17);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t k = 2 + uniform_index(rng, 9);
        const std::size_t n = k + uniform_index(rng, 40);
        std::vector<int> labels;
        for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<int>(1 + uniform_index(rng, 4)));
        const auto trials = trials_with_labels(labels);
        const auto folds = loto_folds(trials, k, rng());

        CHECK(folds.fold_of.size() == n);
        std::size_t smallest = n, largest = 0;
        for (std::size_t f = 0; f < k; ++f) {
            const auto test = folds.trials_in(f);
            std::set<std::string> test_set(test.begin(), test.end());
            std::set<std::string> train_set;
            for (const auto& t : trials) {
                if (folds.fold(t.trial_id) != f) train_set.insert(t.trial_id);
            }
            for (const auto& id : test_set) CHECK(train_set.count(id) == 0);
            CHECK(test_set.size() + train_set.size() == n);
            smallest = std::min(smallest, test.size());
            largest = std::max(largest, test.size());
        }
        CHECK(smallest >= 1);
        CHECK(largest - smallest <= 1);
    }
}

TEST_CASE("window dump keeps a window_id column") {
    const auto ws = fnow_windows(trial_of_length(6, 3, "s-0"), 3.0);
    std::ostringstream out;
    write_window_dump(out, ws);
    const std::string text = out.str();
    CHECK(text.rfind("#meta subject=s rate_hz=1\nwindow_id,label,a_x,a_y\n", 0) == 0);
    CHECK(text.find("\ns-0@3,3,") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2 + 6);
}
