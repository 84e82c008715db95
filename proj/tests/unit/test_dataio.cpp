#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "har/dataio.hpp"
#include "test_support.hpp"

using namespace har;

namespace {

std::string mhealth_row(int label, double fill = 0.0, std::size_t columns = 23) {
    std::ostringstream out;
    for (std::size_t c = 0; c < columns; ++c) out << fill + static_cast<double>(c) * 0.5 << '\t';
    out << label << '\n';
    return out.str();
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("har_test_" + name);
}

}  // namespace

TEST_CASE("channel names split into group and axis") {
    CHECK(channel_from_name("chest_acc_x") == ChannelSpec{"chest_acc_x", "chest_acc", Axis::X});
    CHECK(channel_from_name("wrist_gyro_Z").axis == Axis::Z);
    CHECK(channel_from_name("ecg_lead1") == ChannelSpec{"ecg_lead1", "ecg", Axis::Scalar});
    CHECK(channel_from_name("temperature") == ChannelSpec{"temperature", "temperature", Axis::Scalar});
}

TEST_CASE("MHEALTH layout has 23 channels in documented groups") {
    const auto ch = mhealth_channels();
    REQUIRE(ch.size() == 23);
    CHECK(ch[0].name == "chest_acc_x");
    CHECK(ch[3].sensor_group == "ecg");
    CHECK(ch[4].sensor_group == "ecg");
    CHECK(ch[5].name == "ankle_acc_x");
    CHECK(ch[11].sensor_group == "ankle_mag");
    CHECK(ch[17].sensor_group == "wrist_gyro");
    CHECK(ch[22].name == "wrist_mag_z");
}

TEST_CASE("parse_mhealth_log") {
    SUBCASE("two zero rows with the null label") {
        std::string text;
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 23; ++c) text += "0 ";
            text += "0\n";
        }
        std::istringstream zeros(text);
        const auto rec = parse_mhealth_log(zeros, "subject1");
        CHECK(rec.n_samples() == 2);
        CHECK(rec.n_channels() == 23);
        CHECK(rec.sampling_rate_hz == 50.0);
        for (double v : rec.samples.data()) CHECK(v == 0.0);
        CHECK(rec.labels == std::vector<int>{0, 0});
    }
    SUBCASE("labels survive in order") {
        std::string text;
        for (int l : {1, 1, 2, 2, 2}) text += mhealth_row(l, l * 10.0);
        std::istringstream in(text);
        const auto rec = parse_mhealth_log(in, "s", 50.0);
        CHECK(rec.labels == std::vector<int>{1, 1, 2, 2, 2});
        CHECK(rec.samples(2, 0) == 20.0);
        CHECK(rec.samples(4, 22) == 20.0 + 22 * 0.5);
    }
    SUBCASE("wrong arity names the line") {
        std::istringstream in(mhealth_row(1) + mhealth_row(1, 0.0, 22));
        try {
            parse_mhealth_log(in, "s");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
    }
    SUBCASE("non-numeric field") {
        std::string row = mhealth_row(3);
        row.replace(0, 1, "abc");
        std::istringstream in(mhealth_row(3) + mhealth_row(3) + row);
        try {
            parse_mhealth_log(in, "s");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("empty stream") {
        std::istringstream in("\n\n");
        CHECK_THROWS_AS(parse_mhealth_log(in, "s"), Error);
    }
    SUBCASE("configurable rate") {
        std::istringstream in(mhealth_row(4));
        CHECK(parse_mhealth_log(in, "s", 64.0).sampling_rate_hz == 64.0);
    }
}

TEST_CASE("canonical CSV reading") {
    SUBCASE("minimal one-channel file") {
        std::istringstream in("#meta subject=a rate_hz=100\nlabel,temp\n1,0.5\n1,0.25\n2,-1\n");
        const auto recs = read_canonical_dataset(in);
        REQUIRE(recs.size() == 1);
        CHECK(recs[0].n_samples() == 3);
        CHECK(recs[0].sampling_rate_hz == 100.0);
        CHECK(recs[0].labels == std::vector<int>{1, 1, 2});
        CHECK(recs[0].samples(2, 0) == -1.0);
    }
    SUBCASE("several recordings in one file") {
        std::istringstream in(
            "#meta subject=a rate_hz=50\nlabel,g_x,g_y,g_z\n1,1,2,3\n"
            "#meta subject=b rate_hz=50\nlabel,g_x,g_y,g_z\n2,4,5,6\n2,7,8,9\n");
        const auto recs = read_canonical_dataset(in);
        REQUIRE(recs.size() == 2);
        CHECK(recs[1].subject_id == "b");
        CHECK(recs[1].n_samples() == 2);
    }
    SUBCASE("missing meta fields") {
        std::istringstream no_rate("#meta subject=a\nlabel,x\n1,0\n");
        CHECK_THROWS_AS(read_canonical_dataset(no_rate), ParseError);
        std::istringstream no_meta("label,x\n1,0\n");
        CHECK_THROWS_AS(read_canonical_dataset(no_meta), ParseError);
        std::istringstream bad_header("#meta subject=a rate_hz=5\ntime,x\n1,0\n");
        CHECK_THROWS_AS(read_canonical_dataset(bad_header), ParseError);
    }
    SUBCASE("ragged row") {
        std::istringstream in("#meta subject=a rate_hz=50\nlabel,x,y\n1,0,0\n1,0\n");
        try {
            read_canonical_dataset(in);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("unknown label code under a declared label set") {
        std::istringstream in("#meta subject=a rate_hz=100 labelset=uschad\nlabel,x\n12,0\n13,0\n");
        CHECK_THROWS_WITH_AS(read_canonical_dataset(in), doctest::Contains("unknown label code 13"), ParseError);
        std::istringstream explicit_map("#meta subject=a rate_hz=100\nlabel,x\n1,0\n5,0\n");
        CHECK_THROWS_AS(read_canonical_dataset(explicit_map, LabelMap{{1, "one"}}), ParseError);
    }
    SUBCASE("incomplete triad is rejected") {
        std::istringstream in("#meta subject=a rate_hz=50\nlabel,g_x,g_y\n1,0,0\n");
        CHECK_THROWS_AS(read_canonical_dataset(in), Error);
    }
    SUBCASE("single-recording loader refuses multi-block files") {
        const auto path = temp_file("multi.csv");
        {
            std::ofstream out(path);
            out << "#meta subject=a rate_hz=50\nlabel,x\n1,0\n#meta subject=b rate_hz=50\nlabel,x\n1,0\n";
        }
        CHECK_THROWS_AS(load_canonical_csv(path), Error);
        CHECK(load_canonical_dataset(path).size() == 2);
        std::filesystem::remove(path);
    }
}

TEST_CASE("canonical CSV write then read is the identity up to 9 significant digits") {
    Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> labels;
        const std::size_t n = 1 + uniform_index(rng, 40);
        for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<int>(1 + uniform_index(rng, 4)));
        auto rec = testing::recording_with_labels(labels, 25.0 + static_cast<double>(trial), rng());
        for (auto& v : rec.samples.data()) v *= std::pow(10.0, uniform(rng, -6.0, 6.0));

        std::stringstream buf;
        write_canonical_csv(buf, rec);
        const auto back = read_canonical_dataset(buf);
        REQUIRE(back.size() == 1);
        CHECK(back[0].subject_id == rec.subject_id);
        CHECK(back[0].sampling_rate_hz == rec.sampling_rate_hz);
        CHECK(back[0].channels == rec.channels);
        CHECK(back[0].labels == rec.labels);
        REQUIRE(back[0].samples.rows() == rec.samples.rows());
        for (std::size_t i = 0; i < rec.samples.data().size(); ++i) {
            const double a = rec.samples.data()[i], b = back[0].samples.data()[i];
            CHECK(std::abs(a - b) <= 5e-9 * std::abs(a));
        }
    }
}

TEST_CASE("select_channels") {
    std::string text;
    for (int l : {1, 2, 3}) text += mhealth_row(l);
    std::istringstream in(text);
    const auto rec = parse_mhealth_log(in, "s");

    SUBCASE("all groups is the identity") {
        const auto all = select_channels(rec, rec.groups());
        CHECK(all.channels == rec.channels);
        CHECK(all.samples == rec.samples);
        CHECK(all.labels == rec.labels);
    }
    SUBCASE("chest accelerometer keeps 3 channels") {
        const auto chest = select_channels(rec, {"chest_acc"});
        CHECK(chest.n_channels() == 3);
        CHECK(chest.n_samples() == rec.n_samples());
        CHECK(chest.labels == rec.labels);
        CHECK(chest.samples(1, 2) == rec.samples(1, 2));
    }
    SUBCASE("dropping ECG leaves 21 channels") {
        auto groups = rec.groups();
        std::erase(groups, "ecg");
        const auto no_ecg = select_channels(rec, groups);
        CHECK(no_ecg.n_channels() == 21);
        CHECK(no_ecg.samples(0, 3) == rec.samples(0, 5));
    }
    SUBCASE("unknown group lists the available ones") {
        CHECK_THROWS_WITH_AS(select_channels(rec, {"hip_acc"}), doctest::Contains("available: chest_acc, ecg"), Error);
    }
}

TEST_CASE("segment_trials") {
    SUBCASE("two runs") {
        const auto trials = segment_trials(testing::recording_with_labels({1, 1, 2, 2, 2}), 1);
        REQUIRE(trials.size() == 2);
        CHECK(trials[0].length() == 2);
        CHECK(trials[1].length() == 3);
        CHECK(trials[0].label == 1);
        CHECK(trials[1].label == 2);
        CHECK(trials[0].trial_id != trials[1].trial_id);
    }
    SUBCASE("constant labels form one trial") {
        CHECK(segment_trials(testing::recording_with_labels(std::vector<int>(17, 4)), 1).size() == 1);
    }
    SUBCASE("runs shorter than the minimum are dropped") {
        CHECK(segment_trials(testing::recording_with_labels({1, 2, 1}), 2).empty());
    }
    SUBCASE("excluded labels drop their runs without merging neighbours") {
        const auto trials = segment_trials(testing::recording_with_labels({1, 1, 0, 0, 1, 1}), 1, {0});
        REQUIRE(trials.size() == 2);
        CHECK(trials[0].source_offset == 0);
        CHECK(trials[1].source_offset == 4);
    }
    SUBCASE("min_trial_len must be positive") {
        CHECK_THROWS_AS(segment_trials(testing::recording_with_labels({1}), 0), Error);
    }
}

TEST_CASE("segment_trials partitions surviving runs (property)") {
    Rng rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<int> labels;
        const std::size_t n = 1 + uniform_index(rng, 60);
        int current = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (uniform01(rng) < 0.2) current = static_cast<int>(1 + uniform_index(rng, 3));
            labels.push_back(current);
        }
        const auto rec = testing::recording_with_labels(labels, 50.0, rng());
        const std::size_t min_len = 1 + uniform_index(rng, 4);
        const auto trials = segment_trials(rec, min_len);

        std::size_t total = 0, last_end = 0;
        for (const auto& t : trials) {
            CHECK(t.length() >= min_len);
            CHECK(t.source_offset >= last_end);
            for (std::size_t r = 0; r < t.length(); ++r) {
                CHECK(rec.labels[t.source_offset + r] == t.label);
                for (std::size_t c = 0; c < 3; ++c) CHECK(t.samples(r, c) == rec.samples(t.source_offset + r, c));
            }
            // maximal: neighbours carry a different label
            if (t.source_offset > 0) CHECK(rec.labels[t.source_offset - 1] != t.label);
            if (t.source_offset + t.length() < n) CHECK(rec.labels[t.source_offset + t.length()] != t.label);
            last_end = t.source_offset + t.length();
            total += t.length();
        }
        CHECK(total <= n);
        if (min_len == 1) CHECK(total == n);
    }
}
