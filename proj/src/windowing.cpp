#include "har/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "har/rng.hpp"

namespace har {

namespace {

std::vector<Window> windows_with_stride(const SensorTrial& trial, std::size_t w, std::size_t stride) {
    std::vector<Window> out;
    const std::size_t len = trial.length();
    for (std::size_t offset = 0; offset + w <= len; offset += stride) {
        Window win;
        win.trial_id = trial.trial_id;
        win.subject_id = trial.subject_id;
        win.label = trial.label;
        win.sampling_rate_hz = trial.sampling_rate_hz;
        win.channels = trial.channels;
        win.samples = trial.samples.slice_rows(offset, w);
        win.start_index = offset;
        out.push_back(std::move(win));
    }
    return out;
}

}  // namespace

WindowScheme window_scheme_from_string(const std::string& name) {
    if (name == "snow") return WindowScheme::Snow;
    if (name == "fnow") return WindowScheme::Fnow;
    throw Error("unknown window scheme '" + name + "' (expected snow or fnow)");
}

std::string to_string(WindowScheme scheme) { return scheme == WindowScheme::Snow ? "snow" : "fnow"; }

std::size_t window_length_samples(double window_seconds, double sampling_rate_hz) {
    if (!(window_seconds > 0.0) || !(sampling_rate_hz > 0.0)) {
        throw Error("window length needs positive seconds and sampling rate");
    }
    const double w = std::round(window_seconds * sampling_rate_hz);
    if (w < 1.0) throw Error("window shorter than one sample");
    return static_cast<std::size_t>(w);
}

std::vector<Window> snow_windows(const SensorTrial& trial, double window_seconds, double overlap_fraction) {
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
        throw Error("overlap fraction must lie in [0, 1)");
    }
    const std::size_t w = window_length_samples(window_seconds, trial.sampling_rate_hz);
    const double s = std::round(static_cast<double>(w) * (1.0 - overlap_fraction));
    const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(s));
    return windows_with_stride(trial, w, stride);
}

std::vector<Window> fnow_windows(const SensorTrial& trial, double window_seconds) {
    const std::size_t w = window_length_samples(window_seconds, trial.sampling_rate_hz);
    return windows_with_stride(trial, w, w);
}

std::vector<Window> make_windows(const std::vector<SensorTrial>& trials, WindowScheme scheme,
                                 double window_seconds, double overlap_fraction) {
    std::vector<Window> out;
    for (const auto& t : trials) {
        if (t.sampling_rate_hz != trials.front().sampling_rate_hz) {
            throw Error("trial " + t.trial_id + " has sampling rate " + std::to_string(t.sampling_rate_hz) +
                        " Hz, expected " + std::to_string(trials.front().sampling_rate_hz) + " Hz");
        }
        auto ws = scheme == WindowScheme::Snow ? snow_windows(t, window_seconds, overlap_fraction)
                                               : fnow_windows(t, window_seconds);
        std::move(ws.begin(), ws.end(), std::back_inserter(out));
    }
    return out;
}

std::size_t FoldAssignment::fold(const std::string& trial_id) const {
    auto it = fold_of.find(trial_id);
    if (it == fold_of.end()) throw Error("trial '" + trial_id + "' has no fold");
    return it->second;
}

std::vector<std::string> FoldAssignment::trials_in(std::size_t f) const {
    std::vector<std::string> out;
    for (const auto& [id, fold] : fold_of) {
        if (fold == f) out.push_back(id);
    }
    return out;
}

FoldAssignment loto_folds(const std::vector<SensorTrial>& trials, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error("LOTO needs at least 2 folds");
    if (trials.size() < k) {
        throw Error("LOTO with " + std::to_string(k) + " folds needs at least " + std::to_string(k) +
                    " trials, got " + std::to_string(trials.size()));
    }
    std::map<int, std::vector<std::string>> by_label;
    for (const auto& t : trials) by_label[t.label].push_back(t.trial_id);

    Rng rng(seed);
    FoldAssignment out;
    out.fold_count = k;
    std::size_t dealt = 0;
    for (auto& [label, ids] : by_label) {
        shuffle(std::span<std::string>(ids), rng);
        for (const auto& id : ids) {
            if (!out.fold_of.emplace(id, dealt % k).second) throw Error("duplicate trial id '" + id + "'");
            ++dealt;
        }
    }
    return out;
}

void write_window_dump(std::ostream& out, const std::vector<Window>& windows) {
    std::string subject;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto& w = windows[i];
        if (i == 0 || w.subject_id != subject || w.channels != windows[i - 1].channels) {
            subject = w.subject_id;
            char rate[40];
            std::snprintf(rate, sizeof rate, "%.9g", w.sampling_rate_hz);
            out << "#meta subject=" << w.subject_id << " rate_hz=" << rate << "\nwindow_id,label";
            for (const auto& ch : w.channels) out << ',' << ch.name;
            out << '\n';
        }
        const std::string id = w.trial_id + "@" + std::to_string(w.start_index);
        for (std::size_t r = 0; r < w.samples.rows(); ++r) {
            out << id << ',' << w.label;
            for (double v : w.samples.row(r)) {
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.9g", v);
                out << ',' << buf;
            }
            out << '\n';
        }
    }
}

}  // namespace har
