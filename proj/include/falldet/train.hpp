#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "falldet/cnn.hpp"
#include "falldet/loss.hpp"
#include "falldet/matrix.hpp"

namespace falldet {

enum class OptimizerKind { Adam, Sgd };

struct TrainConfig {
    LossKind loss = LossKind::BinaryCrossEntropy;
    FocalParams focal;
    double learning_rate = 0.01;
    int epochs = 75;
    /// 0 trains full-batch.
    std::size_t batch_size = 32;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t seed = 0;
    /// Stop when validation loss has not improved for this many epochs.
    std::optional<int> patience;
    /// Standardize inputs with the training set's global mean and deviation.
    bool standardize_input = false;

    void validate() const;
};

/// Spectrogram inputs with 0/1 targets.
struct TrainingSet {
    std::span<const Matrix> inputs;
    std::span<const int> labels;
};

struct TrainResult {
    CnnModel model;
    /// Mean training loss of the initial parameters.
    double initial_loss = 0.0;
    /// Mean training loss after each epoch.
    std::vector<double> train_loss;
    /// Mean validation loss after each epoch (empty without validation data).
    std::vector<double> val_loss;
    /// 1-based epoch of the returned checkpoint.
    int best_epoch = 0;
};

/// Mini-batch training with seeded initialization and shuffling. With
/// validation data the best-validation-loss checkpoint is returned. When
/// `initial` is given training continues from its parameters (and its input
/// standardization) with a fresh optimizer state.
TrainResult train_cnn(const TrainingSet& train, const CnnShape& shape, const TrainConfig& config,
                      std::optional<TrainingSet> validation = std::nullopt,
                      const CnnModel* initial = nullptr);

double mean_loss(const CnnModel& model, const TrainingSet& data, LossKind kind, const FocalParams& focal = {});

std::vector<double> cnn_scores(const CnnModel& model, std::span<const Matrix> inputs);

}  // namespace falldet
