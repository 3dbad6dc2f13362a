#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falldet/ingest.hpp"
#include "falldet/random.hpp"
#include "falldet/types.hpp"

namespace falldet {

enum class EventKind { ObjectImpact, HumanFall };

/// Damped-sinusoid impact model: each impact is a * e^(-t/tau) * sin(2 pi f t),
/// impacts spaced by inter_impact_s; the sum is scaled so max |w| == peak_g.
struct EventSpec {
    EventKind kind = EventKind::ObjectImpact;
    double peak_g = 0.5;
    double decay_tau_s = 0.02;
    double freq_hz = 100.0;
    int impact_count = 1;
    double inter_impact_s = 0.25;

    void validate(double sample_rate) const;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct ClassRanges {
    Range peak_g;
    Range decay_tau_s;
    Range freq_hz;
    int min_impacts = 1;
    int max_impacts = 1;
    Range inter_impact_s;
};

struct SynthConfig {
    double sample_rate = kDefaultSampleRate;
    double window_seconds = kDefaultWindowSeconds;
    double noise_sigma_g = 0.002;
    /// Noise windows recorded before and after each event window.
    int context_windows = 1;
    ClassRanges object{{0.1, 1.0}, {0.008, 0.03}, {60.0, 200.0}, 1, 1, {0.2, 0.2}};
    ClassRanges human{{0.3, 1.0}, {0.04, 0.08}, {15.0, 40.0}, 2, 3, {0.15, 0.35}};
    ManifestEntry::Format format = ManifestEntry::Format::Binary;
};

/// Amplitude scale factor for a lab setting (1..8): floor material, storey
/// and sensor distance.
double setting_amplitude_factor(int setting_id);

/// Zero-mean Gaussian noise on all three axes, truncated at 6 sigma.
Recording gen_noise(double duration_s, double sigma_g, std::uint64_t seed,
                    double sample_rate = kDefaultSampleRate);

/// Event waveform in g. The seed only varies the relative strength of
/// secondary impacts.
std::vector<double> gen_event(const EventSpec& spec, std::uint64_t seed,
                              double sample_rate = kDefaultSampleRate);

/// Draws an EventSpec for the given kind from the configured ranges.
EventSpec draw_event_spec(EventKind kind, const SynthConfig& config, Rng& rng);

/// Adds `event` to a recording starting at `onset` samples (z axis in full,
/// x and y at a quarter amplitude).
void inject_event(Recording& rec, const std::vector<double>& event, std::size_t onset);

struct SynthDataset {
    LabeledDataset data;
    std::vector<ManifestEntry> manifest;
    std::vector<Recording> recordings;  // parallel to manifest
};

/// One single-window noise recording per noise item; one recording of
/// 1 + 2 * context_windows windows per event, the event placed at a uniformly
/// drawn offset inside the middle window. `data` is what load_dataset yields
/// for the manifest (non-overlapping windows, z axis) before file quantization.
SynthDataset gen_dataset(std::size_t n_noise, std::size_t n_object, std::size_t n_human,
                         std::uint64_t seed, const SynthConfig& config = {});

struct InjectedEvent {
    std::size_t window_index = 0;
    double time_s = 0.0;
    EventKind kind = EventKind::ObjectImpact;
    double peak_g = 0.0;
};

struct ReplayRecording {
    Recording recording;
    std::vector<InjectedEvent> events;  // sorted by time
};

/// Long noise recording with events injected into distinct non-overlapping
/// windows (one event per window, kept clear of window edges).
ReplayRecording gen_replay(double hours, std::size_t n_object, std::size_t n_human, std::uint64_t seed,
                           const SynthConfig& config = {});

}  // namespace falldet
