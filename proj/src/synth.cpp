#include "falldet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "falldet/error.hpp"
#include "falldet/random.hpp"
#include "falldet/signal.hpp"

namespace falldet {
namespace {

double uniform(Rng& rng, Range r) {
    if (r.hi <= r.lo) return r.lo;
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

std::string recording_name(std::size_t i, ManifestEntry::Format format) {
    std::string digits = std::to_string(i);
    digits.insert(0, digits.size() < 5 ? 5 - digits.size() : 0, '0');
    return "rec_" + digits + (format == ManifestEntry::Format::Binary ? ".fds" : ".csv");
}

}  // namespace

void EventSpec::validate(double sample_rate) const {
    if (!(peak_g >= 0.0)) throw InvalidArgument("event peak must be non-negative");
    if (!(decay_tau_s > 0.0)) throw InvalidArgument("event decay constant must be positive");
    if (!(freq_hz > 0.0) || freq_hz >= sample_rate / 2.0)
        throw InvalidArgument("event frequency must lie in (0, sample_rate / 2)");
    if (impact_count < 1) throw InvalidArgument("event needs at least one impact");
    if (impact_count > 1 && !(inter_impact_s > 0.0))
        throw InvalidArgument("inter-impact spacing must be positive");
}

double setting_amplitude_factor(int setting_id) {
    if (setting_id < 1 || setting_id > 8) throw InvalidArgument("setting id outside 1..8");
    // settings 1..8 cycle floor (PVC, carpet), storey (ground, upper) and
    // distance (1 m, 3 m) in the lab table's order
    const int k = setting_id - 1;
    const double floor = (k % 2 == 0) ? 1.0 : 0.85;
    const double storey = ((k / 2) % 2 == 0) ? 0.9 : 1.0;
    const double distance = (k < 4) ? 1.0 : 0.7;
    return floor * storey * distance;
}

Recording gen_noise(double duration_s, double sigma_g, std::uint64_t seed, double sample_rate) {
    if (!(sigma_g >= 0.0)) throw InvalidArgument("noise sigma must be non-negative");
    if (!(duration_s >= 0.0) || !(sample_rate > 0.0)) throw InvalidArgument("bad noise duration or rate");
    const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
    Recording rec;
    rec.sample_rate = sample_rate;
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double bound = 6.0 * sigma_g;
    for (auto& c : rec.channels) {
        c.resize(n);
        if (sigma_g == 0.0) continue;
        for (auto& v : c) v = std::clamp(sigma_g * normal(rng), -bound, bound);
    }
    return rec;
}

std::vector<double> gen_event(const EventSpec& spec, std::uint64_t seed, double sample_rate) {
    spec.validate(sample_rate);
    const double span_s = (spec.impact_count - 1) * spec.inter_impact_s + 6.0 * spec.decay_tau_s;
    const auto n = static_cast<std::size_t>(std::ceil(span_s * sample_rate)) + 1;
    std::vector<double> w(n, 0.0);
    if (spec.peak_g == 0.0) return w;

    Rng rng(seed);
    std::uniform_real_distribution<double> rel(0.5, 1.0);
    const double omega = 2.0 * std::numbers::pi * spec.freq_hz;
    for (int k = 0; k < spec.impact_count; ++k) {
        const double amp = k == 0 ? 1.0 : rel(rng);
        const double onset = k * spec.inter_impact_s;
        const auto first = static_cast<std::size_t>(std::ceil(onset * sample_rate));
        for (std::size_t i = first; i < n; ++i) {
            const double t = static_cast<double>(i) / sample_rate - onset;
            w[i] += amp * std::exp(-t / spec.decay_tau_s) * std::sin(omega * t);
        }
    }
    double peak = 0.0;
    for (double v : w) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (auto& v : w) v *= spec.peak_g / peak;
    return w;
}

EventSpec draw_event_spec(EventKind kind, const SynthConfig& config, Rng& rng) {
    const ClassRanges& r = kind == EventKind::HumanFall ? config.human : config.object;
    EventSpec s;
    s.kind = kind;
    s.peak_g = uniform(rng, r.peak_g);
    s.decay_tau_s = uniform(rng, r.decay_tau_s);
    s.freq_hz = uniform(rng, r.freq_hz);
    s.impact_count = std::uniform_int_distribution<int>(r.min_impacts, std::max(r.min_impacts, r.max_impacts))(rng);
    s.inter_impact_s = uniform(rng, r.inter_impact_s);
    return s;
}

void inject_event(Recording& rec, const std::vector<double>& event, std::size_t onset) {
    rec.validate();
    const std::size_t end = std::min(rec.length(), onset + event.size());
    for (std::size_t i = onset; i < end; ++i) {
        const double v = event[i - onset];
        rec.channels[0][i] += 0.25 * v;
        rec.channels[1][i] += 0.25 * v;
        rec.channels[2][i] += v;
    }
}

SynthDataset gen_dataset(std::size_t n_noise, std::size_t n_object, std::size_t n_human,
                         std::uint64_t seed, const SynthConfig& config) {
    if (config.context_windows < 0) throw InvalidArgument("context windows must be non-negative");
    SynthDataset out;
    const WindowParams params{config.window_seconds, config.window_seconds, Axis::Z};
    const std::size_t win = seconds_to_samples(config.window_seconds, config.sample_rate);
    Rng rng(derive_seed(seed, 1));

    std::size_t item = 0;
    auto add = [&](Recording rec, ManifestEntry entry) {
        entry.path = recording_name(item, config.format);
        append(out.data, label_recording(rec, entry, params));
        out.manifest.push_back(std::move(entry));
        out.recordings.push_back(std::move(rec));
        ++item;
    };

    for (std::size_t i = 0; i < n_noise; ++i) {
        ManifestEntry e;
        e.format = config.format;
        e.label = ClassLabel::Noise;
        e.setting_id = std::uniform_int_distribution<int>(1, 8)(rng);
        add(gen_noise(config.window_seconds, config.noise_sigma_g, derive_seed(seed, 1000 + item),
                      config.sample_rate),
            std::move(e));
    }

    auto add_event = [&](EventKind kind) {
        const int setting = std::uniform_int_distribution<int>(1, 8)(rng);
        EventSpec spec = draw_event_spec(kind, config, rng);
        spec.peak_g *= setting_amplitude_factor(setting);
        const std::vector<double> wave = gen_event(spec, derive_seed(seed, 2000 + item), config.sample_rate);

        const std::size_t windows = 1 + 2 * static_cast<std::size_t>(config.context_windows);
        Recording rec = gen_noise(config.window_seconds * static_cast<double>(windows), config.noise_sigma_g,
                                  derive_seed(seed, 1000 + item), config.sample_rate);
        const std::size_t margin = win / 20;
        const std::size_t room = win > wave.size() + 2 * margin ? win - wave.size() - 2 * margin : 0;
        const std::size_t offset = margin + std::uniform_int_distribution<std::size_t>(0, room)(rng);
        const std::size_t onset = static_cast<std::size_t>(config.context_windows) * win + offset;
        inject_event(rec, wave, onset);

        ManifestEntry e;
        e.format = config.format;
        e.label = kind == EventKind::HumanFall ? ClassLabel::HumanFall : ClassLabel::ObjectFall;
        if (kind == EventKind::HumanFall) {
            e.event_id = 11;  // dummy
        } else {
            int id = std::uniform_int_distribution<int>(1, 14)(rng);
            e.event_id = id >= 11 ? id + 1 : id;
        }
        e.setting_id = setting;
        e.event_time_s = static_cast<double>(onset) / config.sample_rate;
        add(std::move(rec), std::move(e));
    };
    for (std::size_t i = 0; i < n_object; ++i) add_event(EventKind::ObjectImpact);
    for (std::size_t i = 0; i < n_human; ++i) add_event(EventKind::HumanFall);
    return out;
}

ReplayRecording gen_replay(double hours, std::size_t n_object, std::size_t n_human, std::uint64_t seed,
                           const SynthConfig& config) {
    ReplayRecording out;
    out.recording = gen_noise(hours * 3600.0, config.noise_sigma_g, derive_seed(seed, 1), config.sample_rate);
    const std::size_t win = seconds_to_samples(config.window_seconds, config.sample_rate);
    const std::size_t n_windows = out.recording.length() / win;
    const std::size_t n_events = n_object + n_human;
    if (n_events > n_windows) throw InvalidArgument("more events than windows in the replay recording");

    Rng rng(derive_seed(seed, 2));
    std::vector<std::size_t> slots(n_windows);
    for (std::size_t i = 0; i < n_windows; ++i) slots[i] = i;
    std::shuffle(slots.begin(), slots.end(), rng);
    slots.resize(n_events);

    for (std::size_t k = 0; k < n_events; ++k) {
        const EventKind kind = k < n_object ? EventKind::ObjectImpact : EventKind::HumanFall;
        const int setting = std::uniform_int_distribution<int>(1, 8)(rng);
        EventSpec spec = draw_event_spec(kind, config, rng);
        spec.peak_g *= setting_amplitude_factor(setting);
        const std::vector<double> wave = gen_event(spec, derive_seed(seed, 100 + k), config.sample_rate);
        const std::size_t margin = win / 20;
        const std::size_t room = win > wave.size() + 2 * margin ? win - wave.size() - 2 * margin : 0;
        const std::size_t onset = slots[k] * win + margin + std::uniform_int_distribution<std::size_t>(0, room)(rng);
        inject_event(out.recording, wave, onset);
        out.events.push_back({slots[k], static_cast<double>(onset) / config.sample_rate, kind, spec.peak_g});
    }
    std::sort(out.events.begin(), out.events.end(),
              [](const InjectedEvent& a, const InjectedEvent& b) { return a.time_s < b.time_s; });
    return out;
}

}  // namespace falldet
