#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "falldet/matrix.hpp"
#include "falldet/signal.hpp"
#include "falldet/types.hpp"

namespace falldet {

/// Stage-1 prefilter. beta[0] is the intercept; features are optionally
/// log-compressed, then standardized with the stored training statistics
/// before the linear term.
struct LogRegModel {
    static constexpr double kLogFloor = 1e-12;

    std::vector<double> beta;
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    /// Features enter as ln(f + kLogFloor).
    bool log_features = false;

    LogRegModel() = default;
    /// Raw features, identity standardization.
    explicit LogRegModel(std::vector<double> coefficients);

    std::size_t feature_count() const { return beta.empty() ? 0 : beta.size() - 1; }
    void validate() const;
    bool operator==(const LogRegModel&) const = default;
};

double logreg_predict(const LogRegModel& model, std::span<const double> features);
double logreg_predict(const LogRegModel& model, const FeatureVector& features);

struct LogRegTrainConfig {
    double learning_rate = 2.0;
    int epochs = 500;
    std::uint64_t seed = 0;
    /// Initial coefficients are uniform in [-init_scale, init_scale].
    double init_scale = 0.01;
    /// Squared-g features span several decades; the log keeps weak events
    /// apart from noise on a linear boundary.
    bool log_features = true;
};

struct LogRegTrainResult {
    LogRegModel model;
    /// Mean cross-entropy before each epoch's update, plus the final value.
    std::vector<double> loss_history;
};

/// Full-batch gradient descent on mean binary cross-entropy. Rows of
/// `features` are examples; labels are 0/1 and must contain both classes.
LogRegTrainResult logreg_train(const Matrix& features, std::span<const int> labels,
                               const LogRegTrainConfig& config);

/// One row of five features per window.
Matrix feature_matrix(const LabeledDataset& data);
Matrix feature_matrix(const std::vector<Window>& windows);

}  // namespace falldet
