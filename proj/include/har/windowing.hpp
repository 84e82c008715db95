#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "har/dataio.hpp"

namespace har {

struct Window {
    std::string trial_id;
    std::string subject_id;
    int label = 0;
    double sampling_rate_hz = 0.0;
    std::vector<ChannelSpec> channels;
    Matrix samples;  // w x n_channels
    std::size_t start_index = 0;
};

enum class WindowScheme { Snow, Fnow };

WindowScheme window_scheme_from_string(const std::string& name);
std::string to_string(WindowScheme scheme);

/// round(seconds * rate); throws when the result is < 1.
std::size_t window_length_samples(double window_seconds, double sampling_rate_hz);

/// Sliding windows with stride max(1, round(w * (1 - overlap))); trailing partial window dropped.
std::vector<Window> snow_windows(const SensorTrial& trial, double window_seconds, double overlap_fraction = 0.5);

/// Back-to-back windows (stride w).
std::vector<Window> fnow_windows(const SensorTrial& trial, double window_seconds);

/// Windows for every trial; all trials must share one sampling rate.
std::vector<Window> make_windows(const std::vector<SensorTrial>& trials, WindowScheme scheme,
                                 double window_seconds, double overlap_fraction);

struct FoldAssignment {
    std::size_t fold_count = 0;
    std::map<std::string, std::size_t> fold_of;  // trial_id -> fold in [0, fold_count)

    std::size_t fold(const std::string& trial_id) const;
    /// Trial ids of fold `f`, sorted.
    std::vector<std::string> trials_in(std::size_t f) const;
};

/// Leave-one-trial-out folds: trials are grouped by label (ascending), each group is
/// shuffled with the seeded RNG, and the concatenated groups are dealt round-robin to
/// `k` folds, so every fold gets a near-equal share of each label.
FoldAssignment loto_folds(const std::vector<SensorTrial>& trials, std::size_t k, std::uint64_t seed);

/// Canonical CSV with a leading window_id column:
///   #meta subject=<id> rate_hz=<r>
///   window_id,label,<channels...>
void write_window_dump(std::ostream& out, const std::vector<Window>& windows);

}  // namespace har
