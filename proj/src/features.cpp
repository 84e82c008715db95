#include "har/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace har {

namespace {

std::string percentile_name(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%g", p);
    return buf;
}

std::string coeff_name(const char* prefix, std::size_t k) { return prefix + std::to_string(k); }

struct Triad {
    std::string group;
    std::size_t x, y, z;
};

std::vector<Triad> find_triads(const std::vector<ChannelSpec>& channels) {
    std::vector<Triad> out;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const auto& g = channels[i].sensor_group;
        if (channels[i].axis == Axis::Scalar) continue;
        if (std::any_of(out.begin(), out.end(), [&](const Triad& t) { return t.group == g; })) continue;
        Triad t{g, SIZE_MAX, SIZE_MAX, SIZE_MAX};
        std::size_t members = 0;
        for (std::size_t j = 0; j < channels.size(); ++j) {
            if (channels[j].sensor_group != g) continue;
            ++members;
            switch (channels[j].axis) {
                case Axis::X: t.x = j; break;
                case Axis::Y: t.y = j; break;
                case Axis::Z: t.z = j; break;
                case Axis::Scalar: break;
            }
        }
        if (members != 3 || t.x == SIZE_MAX || t.y == SIZE_MAX || t.z == SIZE_MAX) {
            throw Error("sensor group '" + g + "' is not an X/Y/Z triad");
        }
        out.push_back(t);
    }
    return out;
}

}  // namespace

void FeatureConfig::validate() const {
    for (double p : percentiles) {
        if (!(p > 0.0 && p < 100.0)) throw Error("percentiles must lie in (0, 100)");
    }
    if (entropy_bins < 2) throw Error("entropy_bins must be >= 2");
    if (n_coeffs < 1) throw Error("n_coeffs must be >= 1");
}

double NamedValues::at(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    throw Error("no feature named '" + name + "'");
}

double percentile(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw Error("percentile of an empty series");
    const double rank = p * static_cast<double>(sorted.size() - 1) / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

NamedValues time_features(std::span<const double> x, const FeatureConfig& config) {
    const std::size_t n = x.size();
    if (n < 2) throw Error("time features need at least 2 samples");
    const double nd = static_cast<double>(n);

    double sum = 0.0, sum_sq = 0.0;
    for (double v : x) {
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / nd;
    double m2 = 0.0, m4 = 0.0, abs_dev = 0.0;
    for (double v : x) {
        const double d = v - mean;
        m2 += d * d;
        m4 += d * d * d * d;
        abs_dev += std::abs(d);
    }
    const double var = m2 / (nd - 1.0);
    m2 /= nd;
    m4 /= nd;

    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());

    NamedValues out;
    out.add("mean", mean);
    out.add("std", std::sqrt(var));
    out.add("var", var);
    out.add("rms", std::sqrt(sum_sq / nd));
    for (double p : config.percentiles) out.add(percentile_name(p), percentile(sorted, p));
    out.add("iqr", percentile(sorted, 75.0) - percentile(sorted, 25.0));
    out.add("kurt", m2 > 0.0 ? m4 / (m2 * m2) : 0.0);
    out.add("mad", abs_dev / nd);

    double entropy = 0.0;
    const double lo = sorted.front(), hi = sorted.back();
    if (hi > lo) {
        std::vector<std::size_t> counts(config.entropy_bins, 0);
        const double bins = static_cast<double>(config.entropy_bins);
        for (double v : x) {
            auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * bins);
            ++counts[std::min(b, config.entropy_bins - 1)];
        }
        for (std::size_t c : counts) {
            if (c == 0) continue;
            const double p = static_cast<double>(c) / nd;
            entropy -= p * std::log(p);
        }
    }
    out.add("entropy", entropy);
    return out;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw Error("pearson: series must be non-empty and equal length");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

NamedValues axis_correlations(const Window& window, const std::string& sensor_group) {
    std::size_t ix = SIZE_MAX, iy = SIZE_MAX, iz = SIZE_MAX, count = 0;
    for (std::size_t c = 0; c < window.channels.size(); ++c) {
        const auto& ch = window.channels[c];
        if (ch.sensor_group != sensor_group) continue;
        ++count;
        if (ch.axis == Axis::X) ix = c;
        if (ch.axis == Axis::Y) iy = c;
        if (ch.axis == Axis::Z) iz = c;
    }
    if (count != 3 || ix == SIZE_MAX || iy == SIZE_MAX || iz == SIZE_MAX) {
        throw Error("axis_correlations: group '" + sensor_group + "' is not an X/Y/Z triad");
    }
    const auto x = window.samples.column(ix), y = window.samples.column(iy), z = window.samples.column(iz);
    NamedValues out;
    out.add(sensor_group + ".corr_xy", pearson(x, y));
    out.add(sensor_group + ".corr_xz", pearson(x, z));
    out.add(sensor_group + ".corr_yz", pearson(y, z));
    return out;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<std::complex<double>> dft(std::span<const double> series) {
    const std::size_t n = next_pow2(series.size());
    std::vector<std::complex<double>> a(n);
    std::copy(series.begin(), series.end(), a.begin());

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t j = 0; j < half; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(len);
            const std::complex<double> w(std::cos(angle), std::sin(angle));
            for (std::size_t i = 0; i < n; i += len) {
                const auto u = a[i + j];
                const auto v = a[i + j + half] * w;
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
    return a;
}

std::vector<double> dct2(std::span<const double> series, std::size_t c) {
    const std::size_t n = series.size();
    if (n < c) throw Error("dct2: series of length " + std::to_string(n) + " has fewer than " +
                           std::to_string(c) + " coefficients");
    std::vector<double> out(c, 0.0);
    const double nd = static_cast<double>(n);
    for (std::size_t k = 0; k < c; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            acc += series[t] * std::cos(std::numbers::pi * static_cast<double>(k) *
                                        (2.0 * static_cast<double>(t) + 1.0) / (2.0 * nd));
        }
        out[k] = acc;
    }
    return out;
}

NamedValues frequency_features(std::span<const std::complex<double>> spectrum, double sampling_rate_hz,
                               std::size_t c) {
    const std::size_t n = spectrum.size();
    if (n < 4) throw Error("frequency features need a spectrum of at least 4 bins");
    const std::size_t top = n / 2;
    const double nd = static_cast<double>(n);

    double sum_mag = 0.0, sum_pow = 0.0, weighted = 0.0, best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 1; k <= top; ++k) {
        const double mag = std::abs(spectrum[k]);
        sum_mag += mag;
        sum_pow += mag * mag;
        weighted += static_cast<double>(k) * sampling_rate_hz / nd * mag;
        if (mag > best) {
            best = mag;
            best_k = k;
        }
    }

    NamedValues out;
    if (sum_mag > 0.0) {
        double entropy = 0.0;
        for (std::size_t k = 1; k <= top; ++k) {
            const double mag = std::abs(spectrum[k]);
            const double p = mag * mag / sum_pow;
            if (p > 0.0) entropy -= p * std::log(p);
        }
        out.add("energy", sum_pow / nd);
        out.add("dom_freq", static_cast<double>(best_k) * sampling_rate_hz / nd);
        out.add("centroid", weighted / sum_mag);
        out.add("spec_entropy", entropy);
    } else {
        out.add("energy", 0.0);
        out.add("dom_freq", 0.0);
        out.add("centroid", 0.0);
        out.add("spec_entropy", 0.0);
    }
    for (std::size_t k = 1; k <= c; ++k) {
        out.add(coeff_name("fft_mag", k), k <= top ? std::abs(spectrum[k]) : 0.0);
    }
    return out;
}

std::vector<std::string> feature_names(const std::vector<ChannelSpec>& channels, const FeatureConfig& config) {
    std::vector<std::string> names;
    for (const auto& ch : channels) {
        const std::string p = ch.name + ".";
        if (config.time) {
            names.push_back(p + "mean");
            names.push_back(p + "std");
            if (config.variance) names.push_back(p + "var");
            names.push_back(p + "rms");
            for (double q : config.percentiles) names.push_back(p + percentile_name(q));
            names.push_back(p + "iqr");
            names.push_back(p + "kurt");
            names.push_back(p + "mad");
            names.push_back(p + "entropy");
        }
        if (config.frequency) {
            for (const char* f : {"energy", "dom_freq", "centroid", "spec_entropy"}) names.push_back(p + f);
            for (std::size_t k = 1; k <= config.n_coeffs; ++k) names.push_back(p + coeff_name("fft_mag", k));
            for (std::size_t k = 0; k < config.n_coeffs; ++k) names.push_back(p + coeff_name("dct", k));
        }
    }
    if (config.correlations) {
        for (const auto& t : find_triads(channels)) {
            for (const char* pair : {"corr_xy", "corr_xz", "corr_yz"}) names.push_back(t.group + "." + pair);
        }
    }
    return names;
}

FeatureVector extract_feature_vector(const Window& window, const FeatureConfig& config) {
    config.validate();
    FeatureVector fv;
    fv.label = window.label;
    fv.trial_id = window.trial_id;
    fv.feature_names = std::make_shared<const std::vector<std::string>>(feature_names(window.channels, config));

    for (std::size_t c = 0; c < window.channels.size(); ++c) {
        const auto series = window.samples.column(c);
        if (config.time) {
            const auto t = time_features(series, config);
            for (std::size_t i = 0; i < t.names.size(); ++i) {
                if (t.names[i] == "var" && !config.variance) continue;
                fv.values.push_back(t.values[i]);
            }
        }
        if (config.frequency) {
            const auto f = frequency_features(dft(series), window.sampling_rate_hz, config.n_coeffs);
            fv.values.insert(fv.values.end(), f.values.begin(), f.values.end());
            const auto d = dct2(series, config.n_coeffs);
            fv.values.insert(fv.values.end(), d.begin(), d.end());
        }
    }
    if (config.correlations) {
        for (const auto& t : find_triads(window.channels)) {
            const auto r = axis_correlations(window, t.group);
            fv.values.insert(fv.values.end(), r.values.begin(), r.values.end());
        }
    }
    if (fv.values.size() != fv.feature_names->size()) throw Error("feature count does not match feature names");
    for (std::size_t i = 0; i < fv.values.size(); ++i) {
        if (!std::isfinite(fv.values[i])) {
            throw Error("non-finite feature " + (*fv.feature_names)[i] + " in trial " + window.trial_id);
        }
    }
    return fv;
}

FeatureTable extract_features(const std::vector<Window>& windows, const FeatureConfig& config) {
    FeatureTable table;
    if (windows.empty()) return table;
    table.names = feature_names(windows.front().channels, config);
    table.values = Matrix(0, table.names.size());
    for (const auto& w : windows) {
        if (w.channels != windows.front().channels) throw Error("windows disagree on channel layout");
        auto fv = extract_feature_vector(w, config);
        table.values.append_row(fv.values);
        table.labels.push_back(fv.label);
        table.trial_ids.push_back(std::move(fv.trial_id));
    }
    return table;
}

void write_feature_dump(std::ostream& out, const FeatureTable& table) {
    out << "trial_id,label";
    for (const auto& n : table.names) out << ',' << n;
    out << '\n';
    char buf[40];
    for (std::size_t r = 0; r < table.size(); ++r) {
        out << table.trial_ids[r] << ',' << table.labels[r];
        for (double v : table.values.row(r)) {
            std::snprintf(buf, sizeof buf, "%.9g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

Standardizer::Standardizer(std::vector<double> mean, std::vector<double> scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
    if (mean_.size() != scale_.size()) throw Error("standardizer mean/scale size mismatch");
}

std::vector<double> Standardizer::apply(std::span<const double> v) const {
    if (v.size() != mean_.size()) {
        throw Error("standardizer expects dimension " + std::to_string(mean_.size()) + ", got " +
                    std::to_string(v.size()));
    }
    std::vector<double> out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - mean_[j]) / scale_[j];
    return out;
}

Matrix Standardizer::apply(const Matrix& m) const {
    if (m.cols() != mean_.size()) {
        throw Error("standardizer expects dimension " + std::to_string(mean_.size()) + ", got " +
                    std::to_string(m.cols()));
    }
    Matrix out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t j = 0; j < m.cols(); ++j) out(r, j) = (m(r, j) - mean_[j]) / scale_[j];
    }
    return out;
}

FeatureVector Standardizer::apply(const FeatureVector& v) const {
    FeatureVector out = v;
    out.values = apply(std::span<const double>(v.values));
    return out;
}

Standardizer fit_standardizer(const Matrix& training) {
    if (training.rows() < 2) throw Error("standardizer needs at least 2 training vectors");
    const std::size_t d = training.cols();
    const double m = static_cast<double>(training.rows());
    std::vector<double> mean(d, 0.0), scale(d, 0.0);
    for (std::size_t r = 0; r < training.rows(); ++r) {
        for (std::size_t j = 0; j < d; ++j) mean[j] += training(r, j);
    }
    for (auto& v : mean) v /= m;
    for (std::size_t j = 0; j < d; ++j) {
        // A constant column keeps its exact value so it standardises to exactly zero.
        bool constant = true;
        for (std::size_t r = 1; r < training.rows() && constant; ++r) constant = training(r, j) == training(0, j);
        if (constant) mean[j] = training(0, j);
    }
    for (std::size_t r = 0; r < training.rows(); ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            const double dv = training(r, j) - mean[j];
            scale[j] += dv * dv;
        }
    }
    for (auto& s : scale) s = std::max(std::sqrt(s / (m - 1.0)), kStandardizerFloor);
    return Standardizer(std::move(mean), std::move(scale));
}

Standardizer fit_standardizer(const std::vector<FeatureVector>& training) {
    if (training.empty()) throw Error("standardizer needs at least 2 training vectors");
    Matrix m(0, training.front().values.size());
    for (const auto& v : training) {
        if (v.values.size() != m.cols()) throw Error("training vectors differ in dimension");
        m.append_row(v.values);
    }
    return fit_standardizer(m);
}

}  // namespace har
