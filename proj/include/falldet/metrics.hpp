#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "falldet/types.hpp"

namespace falldet {

struct ConfusionCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

/// A score is a positive prediction iff score >= threshold.
ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels, double threshold);

/// tp / (tp + fn); 1.0 when there are no positives.
double recall(const ConfusionCounts& c);
/// tp / (tp + fp); 1.0 when nothing is predicted positive.
double precision(const ConfusionCounts& c);

struct ThresholdChoice {
    double threshold = 0.0;
    double precision = 0.0;
    ConfusionCounts counts;
};

/// Largest threshold that keeps recall at 1: the lowest positive score.
/// Throws InvalidArgument without positive examples.
ThresholdChoice select_threshold(std::span<const double> scores, std::span<const int> labels);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

/// Each class is shuffled with its own seeded stream and dealt round-robin
/// over the folds; the dealing position carries over from class to class so
/// fold sizes stay balanced overall. Index lists are sorted. Every class that
/// occurs needs at least k members.
std::vector<Fold> stratified_kfold(std::span<const int> classes, std::size_t k, std::uint64_t seed);
std::vector<Fold> stratified_kfold(const LabeledDataset& data, std::size_t k, std::uint64_t seed);

/// Peak |acceleration| over all axes and recordings, per sensor position.
std::map<std::string, double> amplitude_report(const std::map<std::string, std::vector<Recording>>& by_position);

}  // namespace falldet
