#include "falldet/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "falldet/error.hpp"

namespace falldet {

std::size_t seconds_to_samples(double seconds, double sample_rate) {
    if (!(seconds > 0.0) || !(sample_rate > 0.0))
        throw InvalidArgument("durations and sample rate must be positive");
    return static_cast<std::size_t>(std::llround(seconds * sample_rate));
}

std::size_t window_count(std::size_t n_samples, std::size_t window_len, std::size_t step_len) {
    if (window_len == 0 || step_len == 0) throw InvalidArgument("window and step must be non-zero");
    if (n_samples < window_len) return 0;
    return (n_samples - window_len) / step_len + 1;
}

std::vector<double> select_axis(const Recording& rec, Axis axis) {
    switch (axis) {
        case Axis::X: return rec.channels[0];
        case Axis::Y: return rec.channels[1];
        case Axis::Z: return rec.channels[2];
        case Axis::Magnitude: {
            std::vector<double> out(rec.length());
            for (std::size_t i = 0; i < out.size(); ++i) {
                const double x = rec.channels[0][i], y = rec.channels[1][i], z = rec.channels[2][i];
                out[i] = std::sqrt(x * x + y * y + z * z);
            }
            return out;
        }
    }
    return rec.channels[2];
}

std::vector<Window> make_windows(const Recording& rec, const WindowParams& params) {
    rec.validate();
    const std::size_t w = seconds_to_samples(params.window_seconds, rec.sample_rate);
    const std::size_t s = seconds_to_samples(params.step_seconds, rec.sample_rate);
    const std::size_t count = window_count(rec.length(), w, s);
    if (count == 0) throw EmptyInputError("recording is shorter than one window");

    const std::vector<double> series = select_axis(rec, params.axis);
    std::vector<Window> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const auto begin = series.begin() + static_cast<std::ptrdiff_t>(i * s);
        Window win;
        win.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(w));
        win.t_start = static_cast<double>(i * s) / rec.sample_rate;
        win.source_axis = params.axis;
        out.push_back(std::move(win));
    }
    return out;
}

std::vector<double> zero_mean_square(std::span<const double> samples) {
    if (samples.empty()) throw EmptyInputError("zero_mean_square: empty window");
    const double n = static_cast<double>(samples.size());
    double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    // second pass removes the rounding left by the first (exact for constant windows)
    double residual = 0.0;
    for (double x : samples) residual += x - mean;
    mean += residual / n;
    std::vector<double> out(samples.size());
    std::transform(samples.begin(), samples.end(), out.begin(), [mean](double x) {
        const double d = x - mean;
        return d * d;
    });
    return out;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw EmptyInputError("quantile of empty series");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

FeatureVector extract_features(std::span<const double> samples) {
    std::vector<double> sq = zero_mean_square(samples);
    FeatureVector f;
    f.mean = std::accumulate(sq.begin(), sq.end(), 0.0) / static_cast<double>(sq.size());
    std::sort(sq.begin(), sq.end());
    f.max = sq.back();
    f.median = quantile_sorted(sq, 0.5);
    f.q25 = quantile_sorted(sq, 0.25);
    f.q75 = quantile_sorted(sq, 0.75);
    return f;
}

}  // namespace falldet
