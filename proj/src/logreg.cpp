#include "falldet/logreg.hpp"

#include <algorithm>
#include <cmath>

#include "falldet/error.hpp"
#include "falldet/loss.hpp"
#include "falldet/random.hpp"

namespace falldet {
namespace {

double input_value(const LogRegModel& m, double f) {
    return m.log_features ? std::log(std::max(f, 0.0) + LogRegModel::kLogFloor) : f;
}

double linear_term(const LogRegModel& m, std::span<const double> f) {
    double z = m.beta[0];
    for (std::size_t i = 0; i < f.size(); ++i)
        z += m.beta[i + 1] * (input_value(m, f[i]) - m.feature_mean[i]) / m.feature_scale[i];
    return z;
}

double mean_cross_entropy(const LogRegModel& m, const Matrix& x, std::span<const int> y) {
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r)
        total += loss(LossKind::BinaryCrossEntropy, sigmoid(linear_term(m, x.row(r))), y[r]);
    return total / static_cast<double>(x.rows());
}

}  // namespace

LogRegModel::LogRegModel(std::vector<double> coefficients) : beta(std::move(coefficients)) {
    const std::size_t p = feature_count();
    feature_mean.assign(p, 0.0);
    feature_scale.assign(p, 1.0);
}

void LogRegModel::validate() const {
    if (beta.empty()) throw InvalidArgument("logistic model has no coefficients");
    if (feature_mean.size() != feature_count() || feature_scale.size() != feature_count())
        throw InvalidArgument("logistic model standardization does not match its coefficients");
    for (double b : beta)
        if (!std::isfinite(b)) throw InvalidArgument("logistic model has non-finite coefficients");
    for (double s : feature_scale)
        if (!(s > 0.0)) throw InvalidArgument("logistic model has a non-positive feature scale");
}

double logreg_predict(const LogRegModel& model, std::span<const double> features) {
    if (features.size() != model.feature_count())
        throw InvalidArgument("feature count " + std::to_string(features.size()) + " does not match model (" +
                              std::to_string(model.feature_count()) + ")");
    return sigmoid(linear_term(model, features));
}

double logreg_predict(const LogRegModel& model, const FeatureVector& features) {
    const auto a = features.to_array();
    return logreg_predict(model, std::span<const double>(a));
}

LogRegTrainResult logreg_train(const Matrix& features, std::span<const int> labels,
                               const LogRegTrainConfig& config) {
    const std::size_t n = features.rows();
    const std::size_t p = features.cols();
    if (labels.size() != n) throw InvalidArgument("feature rows and labels differ in length");
    if (!(config.learning_rate >= 0.0) || config.epochs < 0) throw InvalidArgument("bad logistic training config");
    std::size_t positives = 0;
    for (int y : labels) {
        if (y != 0 && y != 1) throw InvalidArgument("labels must be 0 or 1");
        positives += static_cast<std::size_t>(y);
    }
    if (positives == 0 || positives == n) throw TrainingError("logistic training needs both classes");

    LogRegModel m;
    m.log_features = config.log_features;
    m.feature_mean.assign(p, 0.0);
    m.feature_scale.assign(p, 1.0);
    Matrix inputs(n, p);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t j = 0; j < p; ++j) inputs(r, j) = input_value(m, features(r, j));
    for (std::size_t j = 0; j < p; ++j) {
        double sum = 0.0;
        for (std::size_t r = 0; r < n; ++r) sum += inputs(r, j);
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t r = 0; r < n; ++r) ss += (inputs(r, j) - mean) * (inputs(r, j) - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n));
        m.feature_mean[j] = mean;
        m.feature_scale[j] = sd > 0.0 ? sd : 1.0;
    }
    Rng rng(config.seed);
    std::uniform_real_distribution<double> init(-config.init_scale, config.init_scale);
    m.beta.resize(p + 1);
    for (auto& b : m.beta) b = config.init_scale > 0.0 ? init(rng) : 0.0;

    LogRegTrainResult result;
    std::vector<double> grad(p + 1);
    std::vector<double> z(p);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const auto row = inputs.row(r);
            for (std::size_t j = 0; j < p; ++j) z[j] = (row[j] - m.feature_mean[j]) / m.feature_scale[j];
            double logit = m.beta[0];
            for (std::size_t j = 0; j < p; ++j) logit += m.beta[j + 1] * z[j];
            const double s = sigmoid(logit);
            total += loss(LossKind::BinaryCrossEntropy, s, labels[r]);
            const double g = s - labels[r];
            grad[0] += g;
            for (std::size_t j = 0; j < p; ++j) grad[j + 1] += g * z[j];
        }
        const double mean_loss = total / static_cast<double>(n);
        if (!std::isfinite(mean_loss)) throw TrainingError("logistic training produced a non-finite loss");
        result.loss_history.push_back(mean_loss);
        for (std::size_t j = 0; j <= p; ++j)
            m.beta[j] -= config.learning_rate * grad[j] / static_cast<double>(n);
    }
    result.loss_history.push_back(mean_cross_entropy(m, features, labels));
    result.model = std::move(m);
    return result;
}

Matrix feature_matrix(const std::vector<Window>& windows) {
    Matrix x(windows.size(), FeatureVector::kSize);
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto f = extract_features(windows[i]).to_array();
        std::copy(f.begin(), f.end(), x.row(i).begin());
    }
    return x;
}

Matrix feature_matrix(const LabeledDataset& data) { return feature_matrix(data.windows); }

}  // namespace falldet
