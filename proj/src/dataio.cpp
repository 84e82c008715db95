#include "har/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

namespace har {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::optional<int> to_int(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return v;
    // MHEALTH labels are occasionally written as "1.0".
    auto d = to_double(s);
    if (d && std::isfinite(*d) && *d == std::floor(*d) && std::abs(*d) < 1e9) return static_cast<int>(*d);
    return std::nullopt;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

}  // namespace

ChannelSpec channel_from_name(const std::string& name) {
    ChannelSpec spec{name, name, Axis::Scalar};
    const auto pos = name.rfind('_');
    if (pos == std::string::npos || pos == 0 || pos + 1 == name.size()) return spec;
    spec.sensor_group = name.substr(0, pos);
    const std::string suffix = lower(std::string_view(name).substr(pos + 1));
    if (suffix == "x") spec.axis = Axis::X;
    else if (suffix == "y") spec.axis = Axis::Y;
    else if (suffix == "z") spec.axis = Axis::Z;
    return spec;
}

LabelMap mhealth_label_map() {
    return {{0, "null"},
            {1, "standing still"},
            {2, "sitting and relaxing"},
            {3, "lying down"},
            {4, "walking"},
            {5, "climbing stairs"},
            {6, "waist bends forward"},
            {7, "frontal elevation of arms"},
            {8, "knees bending"},
            {9, "cycling"},
            {10, "jogging"},
            {11, "running"},
            {12, "jump front and back"}};
}

LabelMap uschad_label_map() {
    return {{1, "walking forward"},  {2, "walking left"},   {3, "walking right"},
            {4, "walking upstairs"}, {5, "walking downstairs"}, {6, "running forward"},
            {7, "jumping up"},       {8, "sitting"},        {9, "standing"},
            {10, "sleeping"},        {11, "elevator up"},   {12, "elevator down"}};
}

LabelMap synthetic_label_map() { return {{1, "slow"}, {2, "medium"}, {3, "fast"}}; }

LabelMap label_map_by_name(const std::string& name) {
    if (name == "mhealth") return mhealth_label_map();
    if (name == "uschad") return uschad_label_map();
    if (name == "synthetic") return synthetic_label_map();
    throw Error("unknown label set '" + name + "' (expected mhealth, uschad or synthetic)");
}

std::vector<std::string> LabeledRecording::groups() const {
    std::vector<std::string> out;
    for (const auto& ch : channels) {
        if (std::find(out.begin(), out.end(), ch.sensor_group) == out.end()) out.push_back(ch.sensor_group);
    }
    return out;
}

void LabeledRecording::validate() const {
    if (!(sampling_rate_hz > 0.0) || !std::isfinite(sampling_rate_hz)) {
        throw Error("recording '" + subject_id + "': sampling rate must be positive");
    }
    if (samples.rows() == 0) throw Error("recording '" + subject_id + "': no samples");
    if (samples.cols() != channels.size()) {
        throw Error("recording '" + subject_id + "': sample width does not match channel count");
    }
    if (labels.size() != samples.rows()) {
        throw Error("recording '" + subject_id + "': label count does not match sample count");
    }
    std::set<std::string> names;
    for (const auto& ch : channels) {
        if (!names.insert(ch.name).second) throw Error("duplicate channel name '" + ch.name + "'");
    }
    for (const auto& g : groups()) {
        int x = 0, y = 0, z = 0, scalar = 0;
        for (const auto& ch : channels) {
            if (ch.sensor_group != g) continue;
            switch (ch.axis) {
                case Axis::X: ++x; break;
                case Axis::Y: ++y; break;
                case Axis::Z: ++z; break;
                case Axis::Scalar: ++scalar; break;
            }
        }
        if (x + y + z > 0 && (x != 1 || y != 1 || z != 1 || scalar != 0)) {
            throw Error("sensor group '" + g + "' must hold exactly one X, Y and Z channel");
        }
    }
    if (!label_map.empty()) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (!label_map.contains(labels[i])) {
                throw Error("recording '" + subject_id + "': label code " + std::to_string(labels[i]) +
                            " at sample " + std::to_string(i) + " is not in the label map");
            }
        }
    }
}

std::vector<ChannelSpec> mhealth_channels() {
    static const char* names[] = {
        "chest_acc_x",  "chest_acc_y",  "chest_acc_z",  "ecg_lead1",    "ecg_lead2",    "ankle_acc_x",
        "ankle_acc_y",  "ankle_acc_z",  "ankle_gyro_x", "ankle_gyro_y", "ankle_gyro_z", "ankle_mag_x",
        "ankle_mag_y",  "ankle_mag_z",  "wrist_acc_x",  "wrist_acc_y",  "wrist_acc_z",  "wrist_gyro_x",
        "wrist_gyro_y", "wrist_gyro_z", "wrist_mag_x",  "wrist_mag_y",  "wrist_mag_z"};
    std::vector<ChannelSpec> out;
    for (const char* n : names) out.push_back(channel_from_name(n));
    return out;
}

LabeledRecording parse_mhealth_log(std::istream& in, const std::string& subject_id, double sampling_rate_hz) {
    LabeledRecording rec;
    rec.subject_id = subject_id;
    rec.sampling_rate_hz = sampling_rate_hz;
    rec.channels = mhealth_channels();
    rec.label_map = mhealth_label_map();
    rec.label_set = "mhealth";

    std::vector<double> row(kMhealthColumns - 1);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_ws(line);
        if (fields.empty()) continue;
        if (fields.size() != kMhealthColumns) {
            throw ParseError("expected " + std::to_string(kMhealthColumns) + " columns, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        for (std::size_t c = 0; c + 1 < kMhealthColumns; ++c) {
            auto v = to_double(fields[c]);
            if (!v) throw ParseError("non-numeric value '" + std::string(fields[c]) + "' in column " +
                                         std::to_string(c + 1), line_no);
            row[c] = *v;
        }
        auto label = to_int(fields.back());
        if (!label) throw ParseError("non-integer label '" + std::string(fields.back()) + "'", line_no);
        if (!rec.label_map.contains(*label)) {
            throw ParseError("unknown MHEALTH label " + std::to_string(*label), line_no);
        }
        rec.samples.append_row(row);
        rec.labels.push_back(*label);
    }
    if (rec.labels.empty()) throw Error("MHEALTH log for subject '" + subject_id + "' is empty");
    return rec;
}

LabeledRecording read_mhealth_file(const std::filesystem::path& path, const std::string& subject_id,
                                   double sampling_rate_hz) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return parse_mhealth_log(in, subject_id, sampling_rate_hz);
    } catch (const ParseError& e) {
        throw e.in_source(path.filename().string());
    }
}

std::vector<LabeledRecording> read_mhealth_dir(const std::filesystem::path& dir, double sampling_rate_hz) {
    if (!std::filesystem::is_directory(dir)) throw Error(dir.string() + " is not a directory");
    static const std::regex pattern(R"(mHealth_subject(\d+)\.log)");
    std::vector<std::pair<int, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::smatch m;
        const std::string name = entry.path().filename().string();
        if (std::regex_match(name, m, pattern)) files.emplace_back(std::stoi(m[1]), entry.path());
    }
    if (files.empty()) throw Error("no mHealth_subject<N>.log files in " + dir.string());
    std::sort(files.begin(), files.end());
    std::vector<LabeledRecording> out;
    for (const auto& [n, path] : files) {
        out.push_back(read_mhealth_file(path, "subject" + std::to_string(n), sampling_rate_hz));
    }
    return out;
}

std::vector<LabeledRecording> read_canonical_dataset(std::istream& in, const std::optional<LabelMap>& labels) {
    std::vector<LabeledRecording> out;
    LabeledRecording* current = nullptr;
    bool expect_header = false;
    std::string line;
    std::size_t line_no = 0;
    std::vector<double> row;

    auto finish = [&](std::size_t at_line) {
        if (!current) return;
        if (expect_header) throw ParseError("#meta block without a header line", at_line);
        if (current->labels.empty()) throw ParseError("recording '" + current->subject_id + "' has no rows", at_line);
        current->validate();
    };

    while (std::getline(in, line)) {
        ++line_no;
        const auto text = trim(line);
        if (text.empty()) continue;

        if (text.starts_with("#meta")) {
            finish(line_no);
            out.emplace_back();
            current = &out.back();
            expect_header = true;
            bool have_subject = false, have_rate = false;
            for (auto tok : split_ws(text.substr(5))) {
                const auto eq = tok.find('=');
                if (eq == std::string_view::npos) throw ParseError("malformed meta field '" + std::string(tok) + "'", line_no);
                const auto key = tok.substr(0, eq);
                const auto value = tok.substr(eq + 1);
                if (key == "subject") {
                    current->subject_id = std::string(value);
                    have_subject = !value.empty();
                } else if (key == "rate_hz") {
                    auto r = to_double(value);
                    if (!r || !(*r > 0.0)) throw ParseError("rate_hz must be a positive number", line_no);
                    current->sampling_rate_hz = *r;
                    have_rate = true;
                } else if (key == "labelset") {
                    current->label_set = std::string(value);
                    try {
                        current->label_map = label_map_by_name(current->label_set);
                    } catch (const Error& e) {
                        throw ParseError(e.what(), line_no);
                    }
                }
            }
            if (!have_subject) throw ParseError("#meta line is missing subject=<id>", line_no);
            if (!have_rate) throw ParseError("#meta line is missing rate_hz=<r>", line_no);
            if (labels) current->label_map = *labels;
            continue;
        }
        if (text.starts_with('#')) continue;
        if (!current) throw ParseError("expected '#meta subject=<id> rate_hz=<r>' as the first line", line_no);

        const auto fields = split(text, ',');
        if (expect_header) {
            if (trim(fields[0]) != "label") throw ParseError("header must start with 'label'", line_no);
            if (fields.size() < 2) throw ParseError("header declares no channels", line_no);
            for (std::size_t i = 1; i < fields.size(); ++i) {
                const auto name = trim(fields[i]);
                if (name.empty()) throw ParseError("empty channel name in header", line_no);
                current->channels.push_back(channel_from_name(std::string(name)));
            }
            current->samples = Matrix(0, current->channels.size());
            row.assign(current->channels.size(), 0.0);
            expect_header = false;
            continue;
        }

        if (fields.size() != current->channels.size() + 1) {
            throw ParseError("expected " + std::to_string(current->channels.size() + 1) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        auto label = to_int(fields[0]);
        if (!label) throw ParseError("non-integer label '" + std::string(fields[0]) + "'", line_no);
        if (!current->label_map.empty() && !current->label_map.contains(*label)) {
            throw ParseError("unknown label code " + std::to_string(*label), line_no);
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            auto v = to_double(fields[c + 1]);
            if (!v) throw ParseError("non-numeric value '" + std::string(trim(fields[c + 1])) + "'", line_no);
            row[c] = *v;
        }
        current->samples.append_row(row);
        current->labels.push_back(*label);
    }
    if (out.empty()) throw Error("canonical CSV is empty");
    finish(line_no);

    // Undeclared label sets get a placeholder name per observed code.
    for (auto& rec : out) {
        if (rec.label_map.empty()) {
            for (int l : rec.labels) rec.label_map.emplace(l, "class_" + std::to_string(l));
        }
    }
    return out;
}

std::vector<LabeledRecording> load_canonical_dataset(const std::filesystem::path& path,
                                                     const std::optional<LabelMap>& labels) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return read_canonical_dataset(in, labels);
    } catch (const ParseError& e) {
        throw e.in_source(path.filename().string());
    }
}

LabeledRecording load_canonical_csv(const std::filesystem::path& path, const std::optional<LabelMap>& labels) {
    auto recs = load_canonical_dataset(path, labels);
    if (recs.size() != 1) {
        throw Error(path.string() + " holds " + std::to_string(recs.size()) +
                    " recordings; use load_canonical_dataset");
    }
    return std::move(recs.front());
}

void write_canonical_csv(std::ostream& out, const LabeledRecording& rec) {
    rec.validate();
    if (rec.subject_id.empty() || rec.subject_id.find_first_of(" \t\r\n,") != std::string::npos) {
        throw Error("subject id '" + rec.subject_id + "' must be non-empty without whitespace or commas");
    }
    out << "#meta subject=" << rec.subject_id << " rate_hz=" << format_value(rec.sampling_rate_hz);
    if (!rec.label_set.empty()) out << " labelset=" << rec.label_set;
    out << "\nlabel";
    for (const auto& ch : rec.channels) out << ',' << ch.name;
    out << '\n';
    for (std::size_t r = 0; r < rec.n_samples(); ++r) {
        out << rec.labels[r];
        for (double v : rec.samples.row(r)) out << ',' << format_value(v);
        out << '\n';
    }
}

void write_canonical_dataset(const std::filesystem::path& path, const std::vector<LabeledRecording>& recordings) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& rec : recordings) write_canonical_csv(out, rec);
    if (!out) throw Error("write failed: " + path.string());
}

LabeledRecording select_channels(const LabeledRecording& rec, const std::vector<std::string>& group_names) {
    const auto available = rec.groups();
    if (group_names.empty()) throw Error("select_channels: no groups requested");
    for (const auto& g : group_names) {
        if (std::find(available.begin(), available.end(), g) == available.end()) {
            std::string list;
            for (const auto& a : available) list += (list.empty() ? "" : ", ") + a;
            throw Error("unknown sensor group '" + g + "'; available: " + list);
        }
    }
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
        if (std::find(group_names.begin(), group_names.end(), rec.channels[c].sensor_group) != group_names.end()) {
            keep.push_back(c);
        }
    }
    LabeledRecording out;
    out.subject_id = rec.subject_id;
    out.sampling_rate_hz = rec.sampling_rate_hz;
    out.labels = rec.labels;
    out.label_map = rec.label_map;
    out.label_set = rec.label_set;
    out.samples = Matrix(rec.n_samples(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) out.channels.push_back(rec.channels[keep[j]]);
    for (std::size_t r = 0; r < rec.n_samples(); ++r) {
        for (std::size_t j = 0; j < keep.size(); ++j) out.samples(r, j) = rec.samples(r, keep[j]);
    }
    return out;
}

std::vector<SensorTrial> segment_trials(const LabeledRecording& rec, std::size_t min_trial_len,
                                        const std::set<int>& excluded_labels) {
    if (min_trial_len < 1) throw Error("segment_trials: min_trial_len must be >= 1");
    std::vector<SensorTrial> out;
    const std::size_t n = rec.labels.size();
    std::size_t run = 0;  // index of the run within the recording, counting every run
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && rec.labels[end] == rec.labels[start]) ++end;
        const std::size_t len = end - start;
        if (len >= min_trial_len && !excluded_labels.contains(rec.labels[start])) {
            SensorTrial t;
            t.trial_id = rec.subject_id + "-" + std::to_string(run);
            t.subject_id = rec.subject_id;
            t.label = rec.labels[start];
            t.sampling_rate_hz = rec.sampling_rate_hz;
            t.channels = rec.channels;
            t.samples = rec.samples.slice_rows(start, len);
            t.source_offset = start;
            out.push_back(std::move(t));
        }
        ++run;
        start = end;
    }
    return out;
}

}  // namespace har
