#include "falldet/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "falldet/error.hpp"

namespace falldet {

std::size_t StftConfig::frames(std::size_t n_samples) const {
    if (n_samples < segment_len) return 0;
    return (n_samples - segment_len) / hop + 1;
}

void StftConfig::validate() const {
    if (segment_len == 0 || hop == 0 || hop > segment_len)
        throw InvalidArgument("STFT needs 0 < hop <= segment_len");
    if (log_power && !(log_floor > 0.0)) throw InvalidArgument("log floor must be positive");
}

std::vector<double> hann(std::size_t length) {
    if (length == 0) throw InvalidArgument("hann: length must be at least 1");
    if (length == 1) return {1.0};
    std::vector<double> w(length);
    const double denom = static_cast<double>(length - 1);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / denom));
    w.front() = 0.0;
    w.back() = 0.0;
    return w;
}

StftFrames stft(std::span<const double> samples, const StftConfig& config) {
    config.validate();
    const std::size_t L = config.segment_len;
    if (samples.size() < L) throw InvalidArgument("STFT segment is longer than the signal");

    const std::vector<double> taper =
        config.window_fn == WindowFunction::Hann ? hann(L) : std::vector<double>(L, 1.0);
    // exp(-2 pi i j / L) for j in [0, L); bin k, sample n uses index (k n) mod L
    std::vector<Complex> twiddle(L);
    for (std::size_t j = 0; j < L; ++j) {
        const double a = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(L);
        twiddle[j] = {std::cos(a), std::sin(a)};
    }

    StftFrames out;
    out.frames = config.frames(samples.size());
    out.bins = config.bins();
    out.coeffs.resize(out.frames * out.bins);
    std::vector<double> seg(L);
    for (std::size_t f = 0; f < out.frames; ++f) {
        const std::size_t start = f * config.hop;
        for (std::size_t n = 0; n < L; ++n) seg[n] = samples[start + n] * taper[n];
        for (std::size_t k = 0; k < out.bins; ++k) {
            double re = 0.0, im = 0.0;
            std::size_t idx = 0;
            for (std::size_t n = 0; n < L; ++n) {
                re += seg[n] * twiddle[idx].real();
                im += seg[n] * twiddle[idx].imag();
                idx += k;
                if (idx >= L) idx %= L;
            }
            out.coeffs[f * out.bins + k] = {re, im};
        }
    }
    return out;
}

Spectrogram spectrogram(std::span<const double> samples, const StftConfig& config, double sample_rate) {
    const StftFrames frames = stft(samples, config);
    Spectrogram s;
    s.power = Matrix(frames.frames, frames.bins);
    for (std::size_t f = 0; f < frames.frames; ++f) {
        for (std::size_t k = 0; k < frames.bins; ++k) {
            const double p = std::norm(frames(f, k));
            s.power(f, k) = config.log_power ? std::log(p + config.log_floor) : p;
        }
    }
    s.frame_times.resize(frames.frames);
    for (std::size_t f = 0; f < frames.frames; ++f)
        s.frame_times[f] = static_cast<double>(f * config.hop) / sample_rate;
    s.bin_freqs.resize(frames.bins);
    for (std::size_t k = 0; k < frames.bins; ++k)
        s.bin_freqs[k] = static_cast<double>(k) * sample_rate / static_cast<double>(config.segment_len);
    return s;
}

std::string spectrogram_csv(const Spectrogram& s) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t f = 0; f < s.frames(); ++f) {
        for (std::size_t k = 0; k < s.bins(); ++k) {
            if (k) os << ',';
            os << s.power(f, k);
        }
        os << '\n';
    }
    return os.str();
}

std::vector<std::uint8_t> spectrogram_pgm(const Spectrogram& s) {
    const auto& v = s.power.values();
    double lo = 0.0, hi = 0.0;
    if (!v.empty()) {
        const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
        lo = *mn;
        hi = *mx;
    }
    const double range = hi > lo ? hi - lo : 1.0;
    const std::string header =
        "P5\n" + std::to_string(s.frames()) + " " + std::to_string(s.bins()) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.reserve(out.size() + v.size());
    for (std::size_t row = 0; row < s.bins(); ++row) {
        const std::size_t k = s.bins() - 1 - row;
        for (std::size_t f = 0; f < s.frames(); ++f) {
            const double t = (s.power(f, k) - lo) / range;
            out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0)));
        }
    }
    return out;
}

}  // namespace falldet
