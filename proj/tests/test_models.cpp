#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "falldet/cnn.hpp"
#include "falldet/error.hpp"
#include "falldet/logreg.hpp"
#include "falldet/loss.hpp"
#include "falldet/model_io.hpp"
#include "falldet/optim.hpp"
#include "falldet/synth.hpp"
#include "falldet/train.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace falldet;
using gradcheck::gradient_check;
using gradcheck::random_matrix;

namespace {

constexpr LossKind kAllLosses[] = {LossKind::BinaryCrossEntropy, LossKind::BinaryFocal, LossKind::SigmoidFocal};

const CnnShape kTiny{4, 6, 2, 2, 3, 1, 2};

std::vector<Matrix> blob_inputs(std::mt19937_64& rng, std::size_t n, int label, std::size_t h, std::size_t w) {
    std::normal_distribution<double> normal(0.0, 0.5);
    std::vector<Matrix> out;
    for (std::size_t i = 0; i < n; ++i) {
        Matrix m(h, w);
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t c = 0; c < w; ++c) m(r, c) = normal(rng) + (label && c < w / 3 ? 1.5 : 0.0);
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace

TEST_CASE("sigmoid") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(sigmoid(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(sigmoid(-std::numeric_limits<double>::infinity()) == 0.0);
    for (double z : {-1000.0, -700.0, -40.0, 40.0, 700.0, 1000.0}) {
        const double s = sigmoid(z);
        CHECK(std::isfinite(s));
        CHECK(s >= 0.0);
        CHECK(s <= 1.0);
    }
    CHECK(sigmoid(-30.0) > 0.0);
    CHECK(sigmoid(30.0) < 1.0);
}

TEST_CASE("logreg_predict") {
    const std::array<double, 5> f{0.5, 1.0, -2.0, 3.0, 4.0};
    CHECK(logreg_predict(LogRegModel(std::vector<double>(6, 0.0)), f) == 0.5);
    CHECK(logreg_predict(LogRegModel({0, 1, 0, 0, 0, 0}), std::array<double, 5>{0, 9, 9, 9, 9}) == 0.5);
    CHECK(logreg_predict(LogRegModel({-1, 2, 0, 0, 0, 0}), f) == 0.5);
    CHECK(logreg_predict(LogRegModel({0.3, 0.1, 0.2, 0.3, 0.4, 0.5}), f) ==
          doctest::Approx(oracle::logistic(0.3 + 0.05 + 0.2 - 0.6 + 1.2 + 2.0)));
    CHECK_THROWS_AS(logreg_predict(LogRegModel({0, 1, 2}), f), InvalidArgument);
}

TEST_CASE("logreg_train") {
    const auto synth = gen_dataset(60, 0, 20, 5);
    const Matrix x = feature_matrix(synth.data);
    const auto y = human_fall_targets(synth.data);

    SUBCASE("separable features reach 100% training accuracy") {
        const auto r = logreg_train(x, y, LogRegTrainConfig{.seed = 1});
        for (std::size_t i = 0; i < x.rows(); ++i) CHECK((logreg_predict(r.model, x.row(i)) >= 0.5) == (y[i] == 1));
    }
    SUBCASE("loss is non-increasing at a small rate") {
        const auto r = logreg_train(x, y, {1e-3, 300, 2});
        REQUIRE(r.loss_history.size() == 301);
        for (std::size_t i = 1; i < r.loss_history.size(); ++i) CHECK(r.loss_history[i] <= r.loss_history[i - 1]);
    }
    SUBCASE("duplicated rows give the same coefficients") {
        Matrix xx(2 * x.rows(), x.cols());
        std::vector<int> yy;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            std::copy(x.row(i).begin(), x.row(i).end(), xx.row(2 * i).begin());
            std::copy(x.row(i).begin(), x.row(i).end(), xx.row(2 * i + 1).begin());
            yy.push_back(y[i]);
            yy.push_back(y[i]);
        }
        const auto a = logreg_train(x, y, {0.5, 200, 3}).model;
        const auto b = logreg_train(xx, yy, {0.5, 200, 3}).model;
        for (std::size_t j = 0; j < a.beta.size(); ++j) CHECK(a.beta[j] == doctest::Approx(b.beta[j]).epsilon(1e-9));
    }
    SUBCASE("zero rate keeps the initialization") {
        const auto r = logreg_train(x, y, {0.0, 50, 4});
        const auto init = logreg_train(x, y, {0.0, 0, 4});
        CHECK(r.model == init.model);
        for (double b : r.model.beta) CHECK(std::abs(b) <= 0.01);
    }
    SUBCASE("deterministic") { CHECK(logreg_train(x, y, {0.5, 20, 9}).model == logreg_train(x, y, {0.5, 20, 9}).model); }
    SUBCASE("single class") {
        const std::vector<int> ones(x.rows(), 1);
        CHECK_THROWS_AS(logreg_train(x, ones, {}), TrainingError);
    }
}

TEST_CASE("conv2d_forward") {
    SUBCASE("2x2 example") {
        Matrix in(2, 2);
        in(0, 0) = 1, in(0, 1) = 2, in(1, 0) = 3, in(1, 1) = 4;
        const std::vector<double> k{1, 0, 0, 1}, b{0};
        CHECK(conv2d_forward(in, k, b, 1, 2, 2) == std::vector<double>{5.0});
    }
    SUBCASE("1x1 identity kernel") {
        std::mt19937_64 rng(1);
        const Matrix in = random_matrix(rng, 5, 7);
        CHECK(conv2d_forward(in, std::vector<double>{1.0}, std::vector<double>{0.0}, 1, 1, 1) == in.values());
    }
    SUBCASE("cross-correlation against a direct sum") {
        std::mt19937_64 rng(2);
        const Matrix in = random_matrix(rng, 6, 9);
        const Matrix k = random_matrix(rng, 3, 4);
        const auto out = conv2d_forward(in, k.values(), std::vector<double>{0.25}, 1, 3, 4);
        REQUIRE(out.size() == 4 * 6);
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 6; ++c) {
                double acc = 0.25;
                for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < 4; ++j) acc += in(r + i, c + j) * k(i, j);
                CHECK(out[r * 6 + c] == doctest::Approx(acc).epsilon(1e-12));
            }
    }
    SUBCASE("shape algebra") {
        std::mt19937_64 rng(3);
        for (int t = 0; t < 20; ++t) {
            const std::size_t h = 1 + rng() % 8, w = 1 + rng() % 8, kh = 1 + rng() % h, kw = 1 + rng() % w;
            const Matrix in(h, w, 1.0);
            const auto out = conv2d_forward(in, std::vector<double>(2 * kh * kw, 1.0), std::vector<double>(2, 0.0), 2, kh, kw);
            CHECK(out.size() == 2 * (h - kh + 1) * (w - kw + 1));
        }
    }
    SUBCASE("kernel larger than input") {
        CHECK_THROWS_AS(conv2d_forward(Matrix(2, 2), std::vector<double>(9, 1.0), std::vector<double>{0.0}, 1, 3, 3),
                        InvalidArgument);
    }
}

TEST_CASE("relu") {
    CHECK(relu(std::vector<double>{-1, 0, 2}) == std::vector<double>{0, 0, 2});
    CHECK(relu(std::vector<double>{-3, -0.1}) == std::vector<double>{0, 0});
    std::mt19937_64 rng(5);
    const Matrix x = random_matrix(rng, 3, 30);
    CHECK(relu(relu(x.values())) == relu(x.values()));
}

TEST_CASE("maxpool2d") {
    SUBCASE("single region") {
        const auto p = maxpool2d(std::vector<double>{1, 3, 2, 0}, 1, 1, 4, 1, 4);
        CHECK(p.values == std::vector<double>{3});
        CHECK(p.argmax == std::vector<std::size_t>{1});
    }
    SUBCASE("107 columns pool to 26") {
        std::vector<double> x(107);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
        const auto p = maxpool2d(x, 1, 1, 107, 1, 4);
        CHECK(p.out_w == 26);
        REQUIRE(p.values.size() == 26);
        for (std::size_t i = 0; i < 26; ++i) CHECK(p.values[i] == static_cast<double>(4 * i + 3));
    }
    SUBCASE("ties go to the first element") {
        const auto p = maxpool2d(std::vector<double>{2, 2, 1, 2}, 1, 1, 4, 1, 4);
        CHECK(p.argmax == std::vector<std::size_t>{0});
    }
}

TEST_CASE("default architecture") {
    const CnnShape s;
    CHECK(s.conv_h() == 1);
    CHECK(s.conv_w() == 107);
    CHECK(s.pooled_w() == 26);
    CHECK(s.flat_len() == 6240);
    CHECK(s.param_count() == 2'198'881);
    const CnnModel zero(s);
    CHECK(cnn_forward(zero, Matrix(63, 251)) == 0.5);
    CHECK_THROWS_AS(cnn_forward(zero, Matrix(63, 250)), InvalidArgument);
}

TEST_CASE("cnn_forward is pure and bounded") {
    std::mt19937_64 rng(6);
    const CnnShape s{8, 20, 3, 4, 5, 1, 4};
    const CnnModel m = init_cnn(s, 1);
    for (int t = 0; t < 10; ++t) {
        const Matrix x = random_matrix(rng, 8, 20);
        const double a = cnn_forward(m, x);
        CHECK(a > 0.0);
        CHECK(a < 1.0);
        CHECK(cnn_forward(m, x) == a);
    }
}

TEST_CASE("losses against closed forms") {
    CHECK(loss(LossKind::BinaryCrossEntropy, 0.5, 1) == doctest::Approx(std::log(2.0)));
    for (double p : {0.01, 0.3, 0.5, 0.8, 0.999})
        for (int y : {0, 1}) {
            CHECK(loss(LossKind::BinaryCrossEntropy, p, y) == doctest::Approx(oracle::bce(p, y)).epsilon(1e-12));
            CHECK(loss(LossKind::BinaryFocal, p, y) == doctest::Approx(oracle::focal(p, y, 2.0, 0.25, true)).epsilon(1e-12));
            CHECK(loss(LossKind::SigmoidFocal, p, y) == doctest::Approx(oracle::focal(p, y, 2.0, 0.25, false)).epsilon(1e-12));
            CHECK(loss(LossKind::BinaryFocal, p, y, {0.0, 0.5}) == doctest::Approx(0.5 * oracle::bce(p, y)).epsilon(1e-12));
        }
    CHECK(std::isfinite(loss(LossKind::BinaryCrossEntropy, 0.0, 1)));
    CHECK(std::isfinite(loss(LossKind::SigmoidFocal, 1.0, 0)));
    CHECK(parse_loss("binary-focal") == LossKind::BinaryFocal);
    CHECK_THROWS_AS(parse_loss("hinge"), InvalidArgument);
}

TEST_CASE("loss gradients match finite differences in the logit") {
    for (LossKind kind : kAllLosses)
        for (double p : {0.05, 0.3, 0.5, 0.8, 0.95})
            for (int y : {0, 1}) {
                const double z = std::log(p / (1.0 - p));
                const double numeric = oracle::central_difference(
                    [&](double zz) {
                        const double q = oracle::logistic(zz);
                        return kind == LossKind::BinaryCrossEntropy ? oracle::bce(q, y)
                                                                    : oracle::focal(q, y, 2.0, 0.25, kind == LossKind::BinaryFocal);
                    },
                    z, 1e-5);
                CHECK(oracle::relative_error(loss_gradient(kind, p, y), numeric) < 1e-6);
            }
}

TEST_CASE("cnn_backward matches finite differences on tiny models") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 5; ++t) {
        Matrix x;
        const CnnModel m = gradcheck::smooth_model(rng, kTiny, x);
        for (LossKind kind : kAllLosses)
            for (int y : {0, 1}) CHECK(gradient_check(m, x, y, kind) < 1e-4);
    }
}

TEST_CASE("dead ReLU units get no conv gradient") {
    CnnModel m = init_cnn(kTiny, 3);
    for (std::size_t i = 0; i < kTiny.kernel_size(); ++i) m.conv_weights[i] = 0.0;
    m.conv_bias[0] = -1.0;
    std::mt19937_64 rng(4);
    CnnGradients g(kTiny);
    cnn_backward(m, random_matrix(rng, 4, 6), 1, LossKind::BinaryCrossEntropy, {}, g);
    for (std::size_t i = 0; i < kTiny.kernel_size(); ++i) CHECK(g.conv_weights[i] == 0.0);
    CHECK(g.conv_bias[0] == 0.0);
}

TEST_CASE("gradient vanishes at a constructed minimum") {
    // Only the dense bias is free; with every other parameter zero the score is
    // sigmoid(b), and mean BCE over one positive and one negative is minimized at b = 0.
    const CnnModel m(kTiny);
    CnnGradients g(kTiny);
    const Matrix x(4, 6, 1.0);
    cnn_backward(m, x, 1, LossKind::BinaryCrossEntropy, {}, g);
    cnn_backward(m, x, 0, LossKind::BinaryCrossEntropy, {}, g);
    CHECK(g.dense_bias == doctest::Approx(0.0));
}

TEST_CASE("adam_step") {
    const AdamConfig cfg{0.001};
    SUBCASE("zero gradient leaves parameters") {
        std::vector<double> p{1.0, -2.0}, g{0.0, 0.0};
        AdamState st;
        adam_step(p, g, st, cfg);
        CHECK(p == std::vector<double>{1.0, -2.0});
    }
    SUBCASE("first step moves by about lr") {
        std::vector<double> p{0.0, 0.0, 0.0}, g{3.0, -0.02, 1e3};
        AdamState st;
        adam_step(p, g, st, cfg);
        CHECK(std::abs(p[0] + 0.001) <= 1e-6);
        CHECK(std::abs(p[1] - 0.001) <= 1e-6);
        CHECK(std::abs(p[2] + 0.001) <= 1e-6);
        CHECK(st.step == 1);
    }
    SUBCASE("independent tensors") {
        std::vector<double> a{1.0}, b{1.0}, c{1.0};
        AdamState sa, sb, sc;
        adam_step(a, std::vector<double>{0.5}, sa, cfg);
        adam_step(b, std::vector<double>{-4.0}, sb, cfg);
        adam_step(c, std::vector<double>{0.5}, sc, cfg);
        CHECK(a == c);
        CHECK(sa.m == sc.m);
    }
}

TEST_CASE("train_cnn") {
    std::mt19937_64 rng(77);
    const CnnShape shape{6, 12, 2, 6, 4, 1, 3};
    auto pos = blob_inputs(rng, 20, 1, 6, 12);
    auto neg = blob_inputs(rng, 20, 0, 6, 12);
    std::vector<Matrix> inputs;
    std::vector<int> labels;
    for (std::size_t i = 0; i < 20; ++i) {
        inputs.push_back(pos[i]);
        labels.push_back(1);
        inputs.push_back(neg[i]);
        labels.push_back(0);
    }
    const TrainingSet set{inputs, labels};
    TrainConfig cfg;
    cfg.learning_rate = 0.01;
    cfg.epochs = 75;
    cfg.seed = 5;

    SUBCASE("loss halves within 75 epochs") {
        const auto r = train_cnn(set, shape, cfg);
        REQUIRE(r.train_loss.size() == 75);
        CHECK(r.train_loss.back() <= 0.5 * r.initial_loss);
    }
    SUBCASE("zero learning rate keeps the loss") {
        cfg.learning_rate = 0.0;
        cfg.epochs = 5;
        const auto r = train_cnn(set, shape, cfg);
        for (double l : r.train_loss) CHECK(l == r.initial_loss);
    }
    SUBCASE("deterministic") {
        cfg.epochs = 5;
        const auto a = train_cnn(set, shape, cfg);
        const auto b = train_cnn(set, shape, cfg);
        CHECK(a.train_loss == b.train_loss);
        CHECK(a.model == b.model);
    }
    SUBCASE("validation checkpoint and patience") {
        cfg.epochs = 30;
        cfg.patience = 2;
        const auto r = train_cnn(set, shape, cfg, set);
        CHECK(r.val_loss.size() <= 30);
        CHECK(r.best_epoch >= 1);
        const auto best = std::min_element(r.val_loss.begin(), r.val_loss.end());
        CHECK(r.best_epoch == best - r.val_loss.begin() + 1);
        CHECK(mean_loss(r.model, set, cfg.loss) == doctest::Approx(*best));
    }
    SUBCASE("single class") {
        const std::vector<int> ones(labels.size(), 1);
        CHECK_THROWS_AS(train_cnn({inputs, ones}, shape, cfg), TrainingError);
    }
    SUBCASE("non-finite loss aborts") {
        cfg.learning_rate = 1e300;
        cfg.optimizer = OptimizerKind::Sgd;
        cfg.epochs = 3;
        CHECK_THROWS_AS(train_cnn(set, shape, cfg), TrainingError);
    }
}

TEST_CASE("model serialization is bit-exact") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 10; ++t) {
        CnnShape s{3 + rng() % 5, 8 + rng() % 10, 1 + rng() % 3, 1 + rng() % 3, 1 + rng() % 4, 1, 1 + rng() % 3};
        CnnModel m = init_cnn(s, rng());
        m.input_mean = 0.1 * t;
        m.input_scale = 2.5;
        m.threshold = 0.37;
        m.dense_bias = -0.5;
        const auto bytes = write_model(m);
        CHECK(peek_model_kind(bytes) == ModelKind::Cnn);
        const CnnModel back = parse_cnn_model(bytes);
        CHECK(back == m);
        CHECK(write_model(back) == bytes);
        CHECK_THROWS_AS(parse_logreg_model(bytes), ParseError);
        auto cut = bytes;
        cut.resize(cut.size() - 3);
        CHECK_THROWS_AS(parse_cnn_model(cut), ParseError);
    }
    LogRegModel lr({0.5, -1.0, 2.0, 0.0, 3.0, 1e-300});
    lr.feature_mean = {1, 2, 3, 4, 5};
    lr.feature_scale = {0.1, 0.2, 0.3, 0.4, std::numeric_limits<double>::min()};
    for (bool log_features : {false, true}) {
        lr.log_features = log_features;
        const auto bytes = write_model(lr);
        CHECK(parse_logreg_model(bytes) == lr);
        CHECK(write_model(parse_logreg_model(bytes)) == bytes);
    }
}
