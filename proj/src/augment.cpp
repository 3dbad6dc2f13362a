#include "falldet/augment.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "falldet/error.hpp"
#include "falldet/log.hpp"
#include "falldet/random.hpp"

namespace falldet {
namespace {

constexpr double kAbsoluteEventFloor = 1e-6;

struct Moments {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

Moments moments(std::span<const double> x, const std::vector<bool>& inlier) {
    Moments m;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (inlier[i]) {
            sum += x[i];
            ++m.n;
        }
    if (m.n == 0) return m;
    m.mean = sum / static_cast<double>(m.n);
    double ss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (inlier[i]) ss += (x[i] - m.mean) * (x[i] - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(m.n));
    return m;
}

double parse_number(std::string_view s, std::string_view whole) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw InvalidArgument("bad augmentation spec '" + std::string(whole) + "'");
    return v;
}

std::size_t parse_count(std::string_view s, std::string_view whole) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw InvalidArgument("bad augmentation spec '" + std::string(whole) + "'");
    return v;
}

}  // namespace

double outlier_limit(double sigma) { return std::max(3.0 * sigma, kAbsoluteEventFloor); }

NoiseStats estimate_noise_stats(std::span<const double> samples, int max_iterations) {
    if (samples.size() < 2) throw EmptyInputError("noise statistics need at least two samples");
    if (max_iterations < 1) throw InvalidArgument("noise estimation needs at least one iteration");

    std::vector<bool> inlier(samples.size(), true);
    NoiseStats stats;
    for (int it = 1; it <= max_iterations; ++it) {
        const Moments m = moments(samples, inlier);
        stats.mu = m.mean;
        stats.sigma = m.sd;
        stats.iterations_used = it;
        stats.inlier_count = m.n;

        const double limit = outlier_limit(m.sd);
        bool changed = false;
        std::size_t kept = 0;
        std::vector<bool> next(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            next[i] = std::abs(samples[i] - m.mean) <= limit;
            kept += next[i];
            changed = changed || next[i] != inlier[i];
        }
        if (kept == 0) {
            const Moments global = moments(samples, std::vector<bool>(samples.size(), true));
            stats.mu = global.mean;
            stats.sigma = global.sd;
            stats.inlier_count = samples.size();
            stats.degenerate = true;
            return stats;
        }
        if (!changed) {
            stats.converged = true;
            break;
        }
        inlier = std::move(next);
    }
    return stats;
}

std::vector<bool> event_mask(std::span<const double> samples, const NoiseStats& stats) {
    const double limit = outlier_limit(stats.sigma);
    std::vector<bool> mask(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) mask[i] = std::abs(samples[i] - stats.mu) > limit;
    return mask;
}

void AmplifyConfig::validate() const {
    if (!(g_lo > 0.0) || !(g_hi >= g_lo)) throw InvalidArgument("amplification needs 0 < g_lo <= g_hi");
}

double draw_amplification_factor(const AmplifyConfig& config) {
    config.validate();
    if (config.g_lo == config.g_hi) return config.g_lo;
    Rng rng(config.seed);
    return std::uniform_real_distribution<double>(config.g_lo, config.g_hi)(rng);
}

Window amplify_with_factor(const Window& window, const NoiseStats& stats, double factor) {
    Window out = window;
    if (factor == 1.0) return out;
    const double limit = outlier_limit(stats.sigma);
    for (auto& x : out.samples) {
        const double centered = x - stats.mu;
        if (std::abs(centered) > limit) x = factor * centered + stats.mu;
    }
    return out;
}

Window amplify(const Window& window, const NoiseStats& stats, const AmplifyConfig& config) {
    return amplify_with_factor(window, stats, draw_amplification_factor(config));
}

LabeledDataset duplicate(const LabeledDataset& data, ClassLabel target, std::size_t copies) {
    data.validate();
    LabeledDataset out = data;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] != target) continue;
        WindowMeta m = data.meta[i];
        m.source_index = i;
        for (std::size_t c = 0; c < copies; ++c) out.push_back(data.windows[i], target, m);
    }
    return out;
}

AugmentMethod AugmentMethod::duplication(std::size_t d) {
    AugmentMethod m;
    m.kind = Kind::Duplication;
    m.duplicates = d;
    return m;
}

AugmentMethod AugmentMethod::amplification(double g_lo, double g_hi, std::optional<std::size_t> variants) {
    AmplifyConfig{g_lo, g_hi, 0}.validate();
    AugmentMethod m;
    m.kind = Kind::Amplification;
    m.g_lo = g_lo;
    m.g_hi = g_hi;
    m.variants = variants;
    return m;
}

AugmentMethod AugmentMethod::parse(std::string_view text) {
    std::vector<std::string_view> parts;
    std::string_view rest = text;
    while (true) {
        const auto colon = rest.find(':');
        parts.push_back(rest.substr(0, colon));
        if (colon == std::string_view::npos) break;
        rest = rest.substr(colon + 1);
    }
    if (parts[0] == "duplicate" && parts.size() == 2) return duplication(parse_count(parts[1], text));
    if (parts[0] == "amplify" && (parts.size() == 3 || parts.size() == 4)) {
        std::optional<std::size_t> variants;
        if (parts.size() == 4) variants = parse_count(parts[3], text);
        return amplification(parse_number(parts[1], text), parse_number(parts[2], text), variants);
    }
    throw InvalidArgument("bad augmentation spec '" + std::string(text) +
                          "' (expected duplicate:D or amplify:LO:HI[:VARIANTS])");
}

std::string AugmentMethod::describe() const {
    std::ostringstream os;
    if (kind == Kind::Duplication) {
        os << "duplicate:" << duplicates;
    } else {
        os << "amplify:" << g_lo << ':' << g_hi;
        if (variants) os << ':' << *variants;
    }
    return os.str();
}

std::size_t balancing_variants(std::size_t positives, std::size_t negatives) {
    if (positives == 0 || negatives <= positives) return 0;
    return (negatives - positives) / positives;
}

LabeledDataset augment_dataset(const LabeledDataset& data, const AugmentMethod& method, std::uint64_t seed) {
    data.validate();
    if (data.empty()) throw EmptyInputError("cannot augment an empty dataset");
    const std::size_t positives = data.count(ClassLabel::HumanFall);
    if (positives == 0) {
        log_warning("no human-fall windows to augment; dataset returned unchanged");
        return data;
    }
    if (method.kind == AugmentMethod::Kind::Duplication)
        return duplicate(data, ClassLabel::HumanFall, method.duplicates);

    const std::size_t variants =
        method.variants.value_or(balancing_variants(positives, data.size() - positives));
    LabeledDataset out = data;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] != ClassLabel::HumanFall) continue;
        const NoiseStats stats = estimate_noise_stats(data.windows[i].samples);
        WindowMeta m = data.meta[i];
        m.source_index = i;
        for (std::size_t c = 0; c < variants; ++c) {
            const AmplifyConfig cfg{method.g_lo, method.g_hi, derive_seed(seed ^ i, c)};
            out.push_back(amplify(data.windows[i], stats, cfg), ClassLabel::HumanFall, m);
        }
    }
    return out;
}

}  // namespace falldet
