#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "falldet/augment.hpp"
#include "falldet/cnn.hpp"
#include "falldet/dsp.hpp"
#include "falldet/train.hpp"
#include "falldet/types.hpp"

namespace falldet {

enum class ModelVariant { Baseline, AllInclusive, AugmentedOnly, TwoStep };

inline constexpr std::array<ModelVariant, 4> kModelVariants = {
    ModelVariant::Baseline, ModelVariant::AllInclusive, ModelVariant::AugmentedOnly, ModelVariant::TwoStep};

std::string_view to_string(ModelVariant v);

struct ExperimentConfig {
    CnnShape shape;
    TrainConfig train;
    /// Fine-tuning stage of the two-step model; defaults to `train`.
    std::optional<TrainConfig> fine_tune;
    StftConfig stft;
    double sample_rate = kDefaultSampleRate;
    std::size_t k = 5;
    std::uint64_t seed = 0;
    /// Folds trained concurrently; results do not depend on it.
    std::size_t jobs = 1;
};

struct VariantResult {
    ModelVariant variant = ModelVariant::Baseline;
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    std::size_t train_size = 0;
};

struct FoldResult {
    std::size_t fold = 0;
    std::size_t validation_size = 0;
    std::size_t validation_positives = 0;
    std::vector<VariantResult> variants;  // in kModelVariants order
};

struct ExperimentReport {
    std::string method;
    std::vector<FoldResult> folds;

    double mean_precision(ModelVariant v) const;
    const VariantResult& result(std::size_t fold, ModelVariant v) const;
};

/// The three datasets a fold trains and validates on, handed to an observer
/// before any training.
struct FoldData {
    std::size_t fold = 0;
    const LabeledDataset& train;
    const LabeledDataset& augmented;
    const LabeledDataset& validation;
};

using FoldObserver = std::function<void(const FoldData&)>;

/// Stratified k-fold experiment. Per fold the augmentation is computed from the
/// training split only; baseline trains on D_train, all-inclusive on
/// D_train + D_aug, augmented-only on D_aug, two-step on D_aug then fine-tuned
/// on D_train from those parameters. The observer is called under a lock
/// when folds run concurrently. Every variant in a fold shares one
/// training seed and is scored on the untouched validation split at its
/// recall-1 threshold. The stage-2 target is human-fall vs. everything else.
ExperimentReport run_experiment(const LabeledDataset& data, const AugmentMethod& method,
                                const ExperimentConfig& config, const FoldObserver& observer = {});

/// One JSON object per (fold, variant) followed by one summary object per variant.
std::string report_jsonl(const ExperimentReport& report);
/// Header `method,variant,fold_1..fold_k,mean`, one row per variant.
std::string report_csv(const ExperimentReport& report);

/// Spectrogram of every window in order.
std::vector<Matrix> spectrogram_inputs(const LabeledDataset& data, const StftConfig& stft, double sample_rate);

}  // namespace falldet
