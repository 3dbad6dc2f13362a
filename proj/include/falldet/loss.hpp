#pragma once

#include <string_view>

namespace falldet {

enum class LossKind { BinaryCrossEntropy, BinaryFocal, SigmoidFocal };

std::string_view to_string(LossKind kind);
LossKind parse_loss(std::string_view text);

/// Focal-loss parameters. BinaryFocal weights positives by alpha and
/// negatives by 1 - alpha; SigmoidFocal ignores alpha (unweighted).
struct FocalParams {
    double gamma = 2.0;
    double alpha = 0.25;
};

/// Numerically stable logistic function; exact 0/1 only in the infinite limits.
double sigmoid(double z);

/// Scores are clamped to [1e-12, 1 - 1e-12] before taking logarithms.
double loss(LossKind kind, double score, int label, const FocalParams& params = {});

/// d loss / d logit, where score = sigmoid(logit).
double loss_gradient(LossKind kind, double score, int label, const FocalParams& params = {});

}  // namespace falldet
