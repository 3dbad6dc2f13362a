#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "falldet/loss.hpp"
#include "falldet/train.hpp"

namespace falldet {

struct IntRange {
    int lo = 0;
    int hi = 0;
    int step = 1;

    std::size_t count() const { return hi < lo || step <= 0 ? 0 : static_cast<std::size_t>((hi - lo) / step) + 1; }
    int at(std::size_t i) const { return lo + static_cast<int>(i) * step; }
    bool contains(int v) const { return v >= lo && v <= hi && (v - lo) % step == 0; }
};

struct TrialConfig {
    int filters = 240;
    int kernel_width = 145;
    LossKind loss = LossKind::BinaryCrossEntropy;
    double learning_rate = 0.01;

    bool operator==(const TrialConfig&) const = default;
};

/// Grid of tunable CNN settings; the kernel always spans the full input height.
struct SearchSpace {
    IntRange filters{8, 256, 8};
    IntRange kernel_width{5, 200, 5};
    std::vector<LossKind> losses{LossKind::BinaryCrossEntropy, LossKind::BinaryFocal, LossKind::SigmoidFocal};
    std::vector<double> learning_rates{0.1, 0.01, 0.001};

    std::size_t size() const;
    TrialConfig at(std::size_t index) const;
    bool contains(const TrialConfig& c) const;
};

struct Rung {
    std::size_t configs = 0;
    int epochs = 0;
};

/// floor(log_r n) + 1 rungs; rung i trains max(1, n / r^i) configurations for
/// max(1, floor(max_epochs / r^(rungs - 1 - i))) epochs.
std::vector<Rung> halving_schedule(std::size_t n, int max_epochs, int reduction);

struct TuneConfig {
    std::size_t n_configs = 9;
    int max_epochs = 20;
    int reduction = 3;
    std::uint64_t seed = 0;
    /// Batch size, focal parameters, input standardization; patience defaults to 3.
    TrainConfig base;
    /// Trials of a rung trained concurrently; results do not depend on it.
    std::size_t jobs = 1;
};

struct TrialRecord {
    std::size_t trial = 0;  // index into the sampled configurations
    std::size_t rung = 0;
    int epochs = 0;
    int epochs_run = 0;
    TrialConfig config;
    double val_loss = 0.0;
    double precision = 0.0;
    double threshold = 0.0;
};

struct TuneResult {
    TrialConfig best;
    std::vector<Rung> schedule;
    std::vector<TrialRecord> trials;  // in execution order
};

/// Samples min(n_configs, space.size()) distinct grid points, then runs one
/// successive-halving bracket. Survivors of each rung are the best by
/// validation loss; the final rung is ranked by precision at recall 1.
TuneResult successive_halving_tune(const SearchSpace& space, const TrainingSet& train, const TrainingSet& validation,
                                   const TuneConfig& config);

/// One JSON object per trial.
std::string trial_log_jsonl(const std::vector<TrialRecord>& trials);

}  // namespace falldet
