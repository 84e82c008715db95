#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "har/windowing.hpp"

namespace har {

struct FeatureConfig {
    std::vector<double> percentiles{25.0, 50.0, 75.0};
    std::size_t entropy_bins = 16;
    std::size_t n_coeffs = 5;  // FFT magnitudes and DCT coefficients per channel

    bool time = true;
    bool frequency = true;  // spectral summaries, FFT magnitudes and DCT coefficients
    bool correlations = true;
    // Variance duplicates the standard deviation, so the default vector leaves it out.
    bool variance = false;

    void validate() const;
};

struct NamedValues {
    std::vector<std::string> names;
    std::vector<double> values;

    void add(std::string name, double value) {
        names.push_back(std::move(name));
        values.push_back(value);
    }
    double at(const std::string& name) const;
};

// --- time domain ---------------------------------------------------------------------

/// Linear interpolation between order statistics at rank p(n-1)/100.
double percentile(std::span<const double> sorted, double p);

/// mean, std, var, rms, p<q> for each configured percentile, iqr, kurt (non-excess,
/// 0 at zero variance), mad, entropy (histogram over the series' own [min, max]).
NamedValues time_features(std::span<const double> series, const FeatureConfig& config = {});

/// Pearson r for (X,Y), (X,Z), (Y,Z) of a 3-axis group; 0 when either side is flat.
NamedValues axis_correlations(const Window& window, const std::string& sensor_group);

double pearson(std::span<const double> a, std::span<const double> b);

// --- frequency domain ----------------------------------------------------------------

std::size_t next_pow2(std::size_t n);

/// Radix-2 FFT of the series zero-padded to the next power of two.
std::vector<std::complex<double>> dft(std::span<const double> series);

/// First `c` DCT-II coefficients, unnormalised.
std::vector<double> dct2(std::span<const double> series, std::size_t c);

/// energy, dom_freq, centroid, spec_entropy, fft_mag1..fft_mag<c> over bins 1..N/2.
NamedValues frequency_features(std::span<const std::complex<double>> spectrum, double sampling_rate_hz,
                               std::size_t c);

// --- feature vectors -----------------------------------------------------------------

struct FeatureVector {
    std::vector<double> values;
    std::shared_ptr<const std::vector<std::string>> feature_names;
    int label = 0;
    std::string trial_id;
};

/// Names produced by extract_feature_vector for windows with these channels.
std::vector<std::string> feature_names(const std::vector<ChannelSpec>& channels, const FeatureConfig& config);

FeatureVector extract_feature_vector(const Window& window, const FeatureConfig& config = {});

/// Row-per-window feature matrix.
struct FeatureTable {
    std::vector<std::string> names;
    Matrix values;
    std::vector<int> labels;
    std::vector<std::string> trial_ids;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t dimension() const noexcept { return names.size(); }
};

FeatureTable extract_features(const std::vector<Window>& windows, const FeatureConfig& config = {});

/// CSV: header `trial_id,label,<feature names...>`, one row per window.
void write_feature_dump(std::ostream& out, const FeatureTable& table);

// --- standardisation -----------------------------------------------------------------

inline constexpr double kStandardizerFloor = 1e-8;

class Standardizer {
public:
    Standardizer() = default;
    Standardizer(std::vector<double> mean, std::vector<double> scale);

    std::size_t dimension() const noexcept { return mean_.size(); }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& scale() const noexcept { return scale_; }

    std::vector<double> apply(std::span<const double> v) const;
    Matrix apply(const Matrix& m) const;
    FeatureVector apply(const FeatureVector& v) const;

private:
    std::vector<double> mean_;
    std::vector<double> scale_;
};

/// Per-column mean and max(sample std, 1e-8); needs at least two rows.
Standardizer fit_standardizer(const Matrix& training);
Standardizer fit_standardizer(const std::vector<FeatureVector>& training);

}  // namespace har
