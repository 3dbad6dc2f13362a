#include "falldet/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "falldet/error.hpp"
#include "falldet/optim.hpp"
#include "falldet/random.hpp"

namespace falldet {
namespace {

void check_set(const TrainingSet& s, const CnnShape& shape, const char* what) {
    if (s.inputs.size() != s.labels.size())
        throw InvalidArgument(std::string(what) + " inputs and labels differ in length");
    for (const Matrix& m : s.inputs)
        if (m.rows() != shape.in_h || m.cols() != shape.in_w)
            throw InvalidArgument(std::string(what) + " input shape does not match the model");
    for (int y : s.labels)
        if (y != 0 && y != 1) throw InvalidArgument(std::string(what) + " labels must be 0 or 1");
}

struct Optimizer {
    OptimizerKind kind;
    AdamConfig adam;
    AdamState conv_w, conv_b, dense_w, dense_b;

    void step(CnnModel& m, const CnnGradients& g) {
        std::span<double> db(&m.dense_bias, 1);
        std::span<const double> gdb(&g.dense_bias, 1);
        if (kind == OptimizerKind::Sgd) {
            sgd_step(m.conv_weights, g.conv_weights, adam.learning_rate);
            sgd_step(m.conv_bias, g.conv_bias, adam.learning_rate);
            sgd_step(m.dense_weights, g.dense_weights, adam.learning_rate);
            sgd_step(db, gdb, adam.learning_rate);
            return;
        }
        adam_step(m.conv_weights, g.conv_weights, conv_w, adam);
        adam_step(m.conv_bias, g.conv_bias, conv_b, adam);
        adam_step(m.dense_weights, g.dense_weights, dense_w, adam);
        adam_step(db, gdb, dense_b, adam);
    }
};

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw InvalidArgument("learning rate must be non-negative");
    if (epochs < 1) throw InvalidArgument("epochs must be at least 1");
    if (patience && *patience < 1) throw InvalidArgument("patience must be at least 1");
}

double mean_loss(const CnnModel& model, const TrainingSet& data, LossKind kind, const FocalParams& focal) {
    if (data.inputs.empty()) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < data.inputs.size(); ++i)
        total += loss(kind, cnn_forward(model, data.inputs[i]), data.labels[i], focal);
    return total / static_cast<double>(data.inputs.size());
}

std::vector<double> cnn_scores(const CnnModel& model, std::span<const Matrix> inputs) {
    std::vector<double> s;
    s.reserve(inputs.size());
    for (const Matrix& m : inputs) s.push_back(cnn_forward(model, m));
    return s;
}

TrainResult train_cnn(const TrainingSet& train, const CnnShape& shape, const TrainConfig& config,
                      std::optional<TrainingSet> validation, const CnnModel* initial) {
    config.validate();
    shape.validate();
    check_set(train, shape, "training");
    if (validation) check_set(*validation, shape, "validation");
    const std::size_t n = train.inputs.size();
    const std::size_t pos = static_cast<std::size_t>(std::count(train.labels.begin(), train.labels.end(), 1));
    if (pos == 0 || pos == n) throw TrainingError("CNN training needs both classes");

    TrainResult result;
    if (initial) {
        if (!(initial->shape == shape)) throw InvalidArgument("initial model shape does not match");
        result.model = *initial;
    } else {
        result.model = init_cnn(shape, derive_seed(config.seed, 1));
        if (config.standardize_input) {
            double sum = 0.0, count = 0.0;
            for (const Matrix& m : train.inputs) {
                for (double v : m.values()) sum += v;
                count += static_cast<double>(m.size());
            }
            const double mean = sum / count;
            double ss = 0.0;
            for (const Matrix& m : train.inputs)
                for (double v : m.values()) ss += (v - mean) * (v - mean);
            const double sd = std::sqrt(ss / count);
            result.model.input_mean = mean;
            result.model.input_scale = sd > 0.0 ? sd : 1.0;
        }
    }
    CnnModel& model = result.model;

    Optimizer opt{config.optimizer, AdamConfig{config.learning_rate}, {}, {}, {}, {}};
    Rng shuffle_rng(derive_seed(config.seed, 2));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = config.batch_size == 0 ? n : std::min(config.batch_size, n);

    result.initial_loss = mean_loss(model, train, config.loss, config.focal);
    CnnGradients grads(shape);
    CnnModel best = model;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    result.best_epoch = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.batch_size != 0) std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t end = std::min(n, start + batch);
            grads.zero();
            for (std::size_t i = start; i < end; ++i)
                cnn_backward(model, train.inputs[order[i]], train.labels[order[i]], config.loss, config.focal, grads);
            grads.scale(1.0 / static_cast<double>(end - start));
            opt.step(model, grads);
        }
        const double tl = mean_loss(model, train, config.loss, config.focal);
        if (!std::isfinite(tl))
            throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch) +
                                " (learning rate " + std::to_string(config.learning_rate) + ")");
        result.train_loss.push_back(tl);
        if (!validation) {
            result.best_epoch = epoch;
            continue;
        }
        const double vl = mean_loss(model, *validation, config.loss, config.focal);
        result.val_loss.push_back(vl);
        if (vl < best_val) {
            best_val = vl;
            best = model;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (config.patience && ++since_best >= *config.patience) {
            break;
        }
    }
    if (validation && result.best_epoch > 0) result.model = std::move(best);
    return result;
}

}  // namespace falldet
