#include "falldet/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "falldet/error.hpp"

namespace falldet {
namespace {

constexpr double kClamp = 1e-12;

// Probability assigned to the true class, and the class weight.
struct TrueClass {
    double pt;
    double weight;
    double sign;  // d pt / d p
};

TrueClass true_class(LossKind kind, double score, int label, const FocalParams& params) {
    const double p = std::clamp(score, kClamp, 1.0 - kClamp);
    TrueClass t{label == 1 ? p : 1.0 - p, 1.0, label == 1 ? 1.0 : -1.0};
    if (kind == LossKind::BinaryFocal) t.weight = label == 1 ? params.alpha : 1.0 - params.alpha;
    return t;
}

}  // namespace

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::BinaryCrossEntropy: return "binary-cross-entropy";
        case LossKind::BinaryFocal: return "binary-focal";
        case LossKind::SigmoidFocal: return "sigmoid-focal";
    }
    return "binary-cross-entropy";
}

LossKind parse_loss(std::string_view text) {
    if (text == "binary-cross-entropy" || text == "bce") return LossKind::BinaryCrossEntropy;
    if (text == "binary-focal") return LossKind::BinaryFocal;
    if (text == "sigmoid-focal") return LossKind::SigmoidFocal;
    throw InvalidArgument("unknown loss '" + std::string(text) + "'");
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double loss(LossKind kind, double score, int label, const FocalParams& params) {
    const TrueClass t = true_class(kind, score, label, params);
    if (kind == LossKind::BinaryCrossEntropy) return -std::log(t.pt);
    return -t.weight * std::pow(1.0 - t.pt, params.gamma) * std::log(t.pt);
}

double loss_gradient(LossKind kind, double score, int label, const FocalParams& params) {
    const TrueClass t = true_class(kind, score, label, params);
    if (kind == LossKind::BinaryCrossEntropy) return t.sign * -(1.0 - t.pt);
    // d/dz of -a (1 - pt)^g ln pt with d pt / dz = s pt (1 - pt):
    //   a s (1 - pt)^g (g pt ln pt - (1 - pt))
    return t.weight * t.sign * std::pow(1.0 - t.pt, params.gamma) *
           (params.gamma * t.pt * std::log(t.pt) - (1.0 - t.pt));
}

}  // namespace falldet
