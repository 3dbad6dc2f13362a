#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "falldet/matrix.hpp"
#include "falldet/types.hpp"

namespace falldet {

using Complex = std::complex<double>;

enum class WindowFunction { Hann, Rectangular };

/// Defaults reproduce a (63, 251) spectrogram from a 16000-sample window.
struct StftConfig {
    std::size_t segment_len = 500;
    std::size_t hop = 250;
    WindowFunction window_fn = WindowFunction::Hann;
    bool one_sided = true;
    bool log_power = true;
    /// Added to the power (g^2) before the log. Set well above the power of
    /// sensor noise so the background is flat instead of a log-noise texture.
    double log_floor = 1e-2;

    std::size_t bins() const { return one_sided ? segment_len / 2 + 1 : segment_len; }
    std::size_t frames(std::size_t n_samples) const;
    void validate() const;
};

/// Symmetric Hann taper, w[n] = 0.5 (1 - cos(2 pi n / (L - 1))); [1] for L = 1.
std::vector<double> hann(std::size_t length);

/// frames x bins matrix of complex coefficients.
struct StftFrames {
    std::size_t frames = 0;
    std::size_t bins = 0;
    std::vector<Complex> coeffs;

    Complex operator()(std::size_t f, std::size_t k) const { return coeffs[f * bins + k]; }
};

/// Frame f is the DFT of the tapered segment starting at f * hop.
StftFrames stft(std::span<const double> samples, const StftConfig& config);

struct Spectrogram {
    Matrix power;  // frames x bins; ln(power + floor) when log_power
    std::vector<double> frame_times;
    std::vector<double> bin_freqs;

    std::size_t frames() const { return power.rows(); }
    std::size_t bins() const { return power.cols(); }
};

Spectrogram spectrogram(std::span<const double> samples, const StftConfig& config,
                        double sample_rate = kDefaultSampleRate);
inline Spectrogram spectrogram(const Window& w, const StftConfig& config,
                               double sample_rate = kDefaultSampleRate) {
    return spectrogram(w.samples, config, sample_rate);
}

/// Rows are frames, columns are bins, full round-trip precision.
std::string spectrogram_csv(const Spectrogram& s);

/// 8-bit binary PGM (P5): frequency on the vertical axis (low at the bottom),
/// time horizontal, values min-max scaled to 0..255.
std::vector<std::uint8_t> spectrogram_pgm(const Spectrogram& s);

}  // namespace falldet
