#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

/// Mean and standard deviation of a window's noise (its three-sigma inliers).
struct NoiseStats {
    double mu = 0.0;
    double sigma = 0.0;
    int iterations_used = 0;
    std::size_t inlier_count = 0;
    /// The inlier set was stable before the iteration limit.
    bool converged = false;
    /// Set when every sample was classified an outlier and global statistics
    /// were returned instead.
    bool degenerate = false;
};

/// Event threshold around the noise mean: 3 sigma, floored at 1e-6 g so
/// spikes in noiseless data still register.
double outlier_limit(double sigma);

/// Starts with every sample an inlier; recomputes (mu, sigma) over inliers and
/// reclassifies |x - mu| > limit as outliers until the inlier set is stable or
/// `max_iterations` passes have run. Needs at least two samples.
NoiseStats estimate_noise_stats(std::span<const double> samples, int max_iterations = 10);

/// true where |x - mu| exceeds outlier_limit(sigma).
std::vector<bool> event_mask(std::span<const double> samples, const NoiseStats& stats);

struct AmplifyConfig {
    double g_lo = 0.7;
    double g_hi = 1.3;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One factor per window, uniform in [g_lo, g_hi] from the config's seed.
double draw_amplification_factor(const AmplifyConfig& config);

/// Event samples (outside the noise band after centering on mu) are scaled by
/// `factor` around mu; all other samples are copied unchanged.
Window amplify_with_factor(const Window& window, const NoiseStats& stats, double factor);
Window amplify(const Window& window, const NoiseStats& stats, const AmplifyConfig& config);

/// Adds `copies` identical copies of every `target` window after the
/// originals, grouped by source index. Copies record their source index.
LabeledDataset duplicate(const LabeledDataset& data, ClassLabel target, std::size_t copies);

struct AugmentMethod {
    enum class Kind { Duplication, Amplification };

    Kind kind = Kind::Duplication;
    std::size_t duplicates = 0;  // Duplication: added copies per positive
    double g_lo = 1.0;           // Amplification bounds
    double g_hi = 1.0;
    /// Amplified variants per positive; empty balances the classes.
    std::optional<std::size_t> variants;

    static AugmentMethod duplication(std::size_t d);
    static AugmentMethod amplification(double g_lo, double g_hi, std::optional<std::size_t> variants = {});
    /// "duplicate:D" or "amplify:LO:HI[:VARIANTS]".
    static AugmentMethod parse(std::string_view text);
    std::string describe() const;
};

/// Variants per positive that bring positives up to the negative count:
/// floor((negatives - positives) / positives), at least 0.
std::size_t balancing_variants(std::size_t positives, std::size_t negatives);

/// Original windows followed by the human-fall augmentations. Amplified
/// variant c of window i uses seed derive_seed(seed ^ i, c), so results do not
/// depend on processing order. With no human-fall windows the data is
/// returned unchanged and a warning is logged.
LabeledDataset augment_dataset(const LabeledDataset& data, const AugmentMethod& method, std::uint64_t seed);

}  // namespace falldet
