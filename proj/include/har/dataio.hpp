#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "har/common.hpp"

namespace har {

enum class Axis { X, Y, Z, Scalar };

struct ChannelSpec {
    std::string name;          // "<group>_<axis>", e.g. "chest_acc_x"
    std::string sensor_group;  // e.g. "chest_acc"
    Axis axis = Axis::Scalar;

    bool operator==(const ChannelSpec&) const = default;
};

/// Splits a channel name at its last underscore. A trailing x/y/z (any case) is an axis;
/// any other suffix makes a scalar channel of the prefix group. Names without an
/// underscore form their own scalar group.
ChannelSpec channel_from_name(const std::string& name);

using LabelMap = std::map<int, std::string>;

LabelMap mhealth_label_map();
LabelMap uschad_label_map();
LabelMap synthetic_label_map();
/// Named label set ("mhealth", "uschad", "synthetic"); throws on unknown names.
LabelMap label_map_by_name(const std::string& name);

struct LabeledRecording {
    std::string subject_id;
    double sampling_rate_hz = 0.0;
    std::vector<ChannelSpec> channels;
    Matrix samples;  // n_samples x n_channels
    std::vector<int> labels;
    LabelMap label_map;
    std::string label_set;  // name of label_map when it is a known set, else empty

    std::size_t n_samples() const noexcept { return samples.rows(); }
    std::size_t n_channels() const noexcept { return channels.size(); }

    /// Group names in first-appearance order.
    std::vector<std::string> groups() const;

    /// Throws Error when any documented invariant is violated.
    void validate() const;
};

struct SensorTrial {
    std::string trial_id;
    std::string subject_id;
    int label = 0;
    double sampling_rate_hz = 0.0;
    std::vector<ChannelSpec> channels;
    Matrix samples;
    std::size_t source_offset = 0;  // first row within the parent recording

    std::size_t length() const noexcept { return samples.rows(); }
};

// --- MHEALTH -------------------------------------------------------------------------

inline constexpr std::size_t kMhealthColumns = 24;
inline constexpr double kMhealthRateHz = 50.0;
inline constexpr double kUschadRateHz = 100.0;

/// The 23 sensor channels of a raw MHEALTH log, in column order.
std::vector<ChannelSpec> mhealth_channels();

/// Parses a whitespace-delimited MHEALTH log (23 sensor columns + integer label).
LabeledRecording parse_mhealth_log(std::istream& in, const std::string& subject_id,
                                   double sampling_rate_hz = kMhealthRateHz);

LabeledRecording read_mhealth_file(const std::filesystem::path& path, const std::string& subject_id,
                                   double sampling_rate_hz = kMhealthRateHz);

/// Reads every `mHealth_subject<N>.log` in `dir`, ordered by N.
std::vector<LabeledRecording> read_mhealth_dir(const std::filesystem::path& dir,
                                               double sampling_rate_hz = kMhealthRateHz);

// --- canonical CSV -------------------------------------------------------------------
//
//   #meta subject=<id> rate_hz=<r> [labelset=<mhealth|uschad|synthetic>]
//   label,<group>_<axis>,...
//   <label>,<v>,...
//
// A file may hold several recordings: each starts with its own #meta line and header.
// Values are written with 9 significant digits.

std::vector<LabeledRecording> read_canonical_dataset(std::istream& in,
                                                     const std::optional<LabelMap>& labels = {});
std::vector<LabeledRecording> load_canonical_dataset(const std::filesystem::path& path,
                                                     const std::optional<LabelMap>& labels = {});

/// Single-recording form; a file with more than one #meta block is an error.
LabeledRecording load_canonical_csv(const std::filesystem::path& path,
                                    const std::optional<LabelMap>& labels = {});

void write_canonical_csv(std::ostream& out, const LabeledRecording& rec);
void write_canonical_dataset(const std::filesystem::path& path,
                             const std::vector<LabeledRecording>& recordings);

// --- transforms ----------------------------------------------------------------------

/// Keeps the channels of the named groups, in recording order. Empty `group_names`
/// is an error; use the recording itself for "all".
LabeledRecording select_channels(const LabeledRecording& rec, const std::vector<std::string>& group_names);

/// Maximal contiguous constant-label runs of at least `min_trial_len` samples, in time
/// order. Runs whose label is in `excluded_labels` (e.g. MHEALTH's null class 0) are
/// dropped without merging their neighbours.
std::vector<SensorTrial> segment_trials(const LabeledRecording& rec, std::size_t min_trial_len,
                                        const std::set<int>& excluded_labels = {});

}  // namespace har
