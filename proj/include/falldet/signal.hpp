#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

struct WindowParams {
    double window_seconds = kDefaultWindowSeconds;
    double step_seconds = kDefaultWindowSeconds;
    Axis axis = Axis::Z;
};

/// Seconds to samples, rounded to nearest.
std::size_t seconds_to_samples(double seconds, double sample_rate);

/// Number of full windows: floor((n - W) / S) + 1, or 0 when n < W.
std::size_t window_count(std::size_t n_samples, std::size_t window_len, std::size_t step_len);

/// The requested axis of a recording as one series (Magnitude is the
/// per-sample Euclidean norm of the three channels).
std::vector<double> select_axis(const Recording& rec, Axis axis);

/// Consecutive windows starting at 0, S, 2S, ...; the trailing partial
/// segment is discarded. Throws EmptyInputError when the recording is shorter
/// than one window.
std::vector<Window> make_windows(const Recording& rec, const WindowParams& params);

/// (x[i] - mean(x))^2.
std::vector<double> zero_mean_square(std::span<const double> samples);

struct FeatureVector {
    static constexpr std::size_t kSize = 5;

    double max = 0.0;
    double median = 0.0;
    double mean = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;

    std::array<double, kSize> to_array() const { return {max, median, mean, q25, q75}; }
    bool operator==(const FeatureVector&) const = default;
};

/// Quantile of already sorted data, linear interpolation between closest
/// ranks: h = (n - 1) p.
double quantile_sorted(std::span<const double> sorted, double p);

/// Five statistics of the zero-meaned, squared window.
FeatureVector extract_features(std::span<const double> samples);
inline FeatureVector extract_features(const Window& w) { return extract_features(w.samples); }

}  // namespace falldet
