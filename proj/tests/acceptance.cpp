// Runs every primary acceptance criterion once and prints one PASS/FAIL line
// per criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "falldet/augment.hpp"
#include "falldet/byteio.hpp"
#include "falldet/deploy.hpp"
#include "falldet/dsp.hpp"
#include "falldet/experiment.hpp"
#include "falldet/ingest.hpp"
#include "falldet/model_io.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace falldet;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double t = seconds_since(t0);
    const bool in_time = budget_s <= 0.0 || t < budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::printf("%s  %-26s %s [%.1f s%s]\n", pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), t,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
}

template <class... T>
std::string fmt(const T&... parts) {
    std::ostringstream os;
    os.precision(6);
    (os << ... << parts);
    return os.str();
}

Outcome shape_fidelity() {
    Rng rng(1);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> window(16000);
    for (double& v : window) v = noise(rng);
    const Spectrogram s = spectrogram(window, StftConfig{});

    const CnnShape shape;
    const CnnModel model = init_cnn(shape, 3);
    const ForwardCache cache = cnn_forward_cached(model, s.power);
    const std::size_t stored = model.conv_weights.size() + model.conv_bias.size() + model.dense_weights.size() + 1;
    const bool pass = s.frames() == 63 && s.bins() == 251 && shape.filters == 240 && shape.conv_h() == 1 &&
                      shape.conv_w() == 107 && cache.conv.size() == 240 * 1 * 107 && cache.pool.out_h == 1 &&
                      cache.pool.out_w == 26 && cache.pool.values.size() == 240 * 26 && shape.flat_len() == 6240 &&
                      shape.param_count() == 2198881 && stored == 2198881;
    return {pass, fmt("spectrogram ", s.frames(), "x", s.bins(), ", conv (", shape.filters, ",", shape.conv_h(), ",",
                      shape.conv_w(), "), pooled (", shape.filters, ",", cache.pool.out_h, ",", cache.pool.out_w,
                      "), flatten ", cache.pool.values.size(), ", parameters ", stored)};
}

Outcome window_arithmetic(const fixture::Cascade& cascade) {
    const ReplayRecording replay = gen_replay(3.0, 38, 1, 7);
    const auto windows = make_windows(replay.recording, WindowParams{});
    const auto events = detect_stream(replay.recording, cascade.logreg, cascade.cnn, DetectorConfig{});
    const std::string log = write_event_log(events);
    const auto lines = static_cast<std::size_t>(std::count(log.begin(), log.end(), '\n'));
    const auto parsed = read_event_log(log);
    const bool pass = windows.size() == 1080 && events.size() == 1080 && lines == 1080 && parsed == events;
    return {pass, fmt(replay.recording.length(), " samples -> ", windows.size(), " windows, ", lines, " log lines")};
}

Outcome dft_oracle() {
    Rng rng(2025);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    std::size_t frames = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        const std::size_t len = 1 + rng() % n;
        StftConfig cfg;
        cfg.segment_len = len;
        cfg.hop = 1 + rng() % len;
        cfg.window_fn = trial % 2 ? WindowFunction::Hann : WindowFunction::Rectangular;
        cfg.one_sided = trial % 3 == 0;
        cfg.log_power = false;
        std::vector<double> x(n);
        for (double& v : x) v = normal(rng);
        const StftFrames got = stft(x, cfg);
        const auto taper = cfg.window_fn == WindowFunction::Hann ? hann(len) : std::vector<double>(len, 1.0);
        if (got.frames != (n - len) / cfg.hop + 1 || got.bins != cfg.bins()) return {false, "wrong frame geometry"};
        for (std::size_t f = 0; f < got.frames; ++f, ++frames) {
            std::vector<double> seg(len);
            for (std::size_t i = 0; i < len; ++i) seg[i] = x[f * cfg.hop + i] * taper[i];
            const auto want = oracle::dft(seg);
            double scale = 0.0, err = 0.0;
            for (std::size_t k = 0; k < got.bins; ++k) {
                scale = std::max(scale, std::abs(want[k]));
                err = std::max(err, std::abs(got(f, k) - want[k]));
            }
            worst = std::max(worst, err / std::max(scale, 1e-300));
        }
    }
    return {worst <= 1e-9, fmt("100 trials, ", frames, " frames, max relative error ", worst)};
}

Outcome gradient_check() {
    std::mt19937_64 rng(77);
    const LossKind losses[] = {LossKind::BinaryCrossEntropy, LossKind::BinaryFocal, LossKind::SigmoidFocal};
    double worst = 0.0;
    std::size_t params = 0;
    for (int t = 0; t < 20; ++t) {
        const std::size_t in_h = 2 + rng() % 4, in_w = 4 + rng() % 8;
        const CnnShape shape{in_h, in_w, 1 + rng() % 3, 1 + rng() % in_h, 1 + rng() % 3, 1, 1 + rng() % 2};
        Matrix x;
        const CnnModel m = gradcheck::smooth_model(rng, shape, x);
        params += shape.param_count();
        for (LossKind kind : losses)
            for (int y : {0, 1}) worst = std::max(worst, gradcheck::gradient_check(m, x, y, kind));
    }
    return {worst < 1e-4, fmt("20 models (", params, " parameters) x 3 losses x 2 labels, max relative error ", worst)};
}

Outcome threshold_oracle() {
    Rng rng(5);
    std::size_t mismatches = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng() % 40;
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        const bool coarse = t % 2 == 0;  // coarse scores give ties
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = coarse ? static_cast<double>(rng() % 6) / 5.0 : std::uniform_real_distribution<double>()(rng);
            labels[i] = static_cast<int>(rng() % 2);
        }
        labels[rng() % n] = 1;
        const ThresholdChoice got = select_threshold(scores, labels);
        const auto [t_want, p_want] = oracle::best_precision_at_full_recall(scores, labels);
        mismatches += got.threshold != t_want || got.precision != p_want;
    }
    return {mismatches == 0, fmt("1000 score/label sets, ", mismatches, " mismatches")};
}

Outcome anti_leakage() {
    LabeledDataset data = gen_dataset(15, 10, 10, 8).data;
    for (std::size_t i = 0; i < data.size(); ++i) data.windows[i].t_start = 1e6 + static_cast<double>(i);
    ExperimentConfig cfg;
    cfg.shape = CnnShape{63, 251, 2, 63, 15, 1, 4};
    cfg.train.epochs = 1;
    cfg.seed = 12;
    const AugmentMethod methods[] = {AugmentMethod::duplication(0), AugmentMethod::duplication(10),
                                     AugmentMethod::amplification(0.7, 1.3), AugmentMethod::amplification(0.5, 2.0, 3)};
    std::size_t violations = 0, folds = 0;
    for (const auto& method : methods) {
        run_experiment(data, method, cfg, [&](const FoldData& fd) {
            ++folds;
            std::set<double> val;
            for (const auto& w : fd.validation.windows) val.insert(w.t_start);
            for (const auto* set : {&fd.train, &fd.augmented})
                for (const auto& w : set->windows) {
                    violations += val.count(w.t_start);
                    for (const auto& v : fd.validation.windows) violations += v.samples == w.samples;
                }
        });
    }
    return {violations == 0 && folds == 4 * 5, fmt(std::size(methods), " methods x 5 folds probed (", folds,
                                                   "), ", violations, " violations")};
}

Outcome augmentation_invariants() {
    const auto synth = gen_dataset(10, 10, 10, 31);
    std::size_t windows = 0, identity_fail = 0, noise_fail = 0, scaled = 0;
    for (std::size_t i = 0; i < synth.data.size(); ++i) {
        const Window& w = synth.data.windows[i];
        const NoiseStats stats = estimate_noise_stats(w.samples);
        const auto mask = event_mask(w.samples, stats);
        ++windows;
        identity_fail += !(amplify_with_factor(w, stats, 1.0) == w);
        for (double g : {0.5, 0.7, 1.3, 2.0}) {
            const Window a = amplify_with_factor(w, stats, g);
            for (std::size_t k = 0; k < w.samples.size(); ++k) {
                if (!mask[k])
                    noise_fail += a.samples[k] != w.samples[k];
                else
                    scaled += a.samples[k] != w.samples[k];
            }
        }
    }
    const std::size_t pos = synth.data.count(ClassLabel::HumanFall);
    const LabeledDataset dup = duplicate(synth.data, ClassLabel::HumanFall, 10);
    const bool dup_ok = dup.count(ClassLabel::HumanFall) == 11 * pos &&
                        dup.count(ClassLabel::Noise) == synth.data.count(ClassLabel::Noise) &&
                        dup.count(ClassLabel::ObjectFall) == synth.data.count(ClassLabel::ObjectFall);
    return {identity_fail == 0 && noise_fail == 0 && scaled > 0 && dup_ok,
            fmt(windows, " windows: g=1 identity failures ", identity_fail, ", changed noise samples ", noise_fail,
                " (", scaled, " event samples scaled); d=10 positives ", pos, " -> ", dup.count(ClassLabel::HumanFall))};
}

Outcome learning_sanity() {
    // stage 1
    const auto synth = gen_dataset(100, 40, 40, 3);
    const Matrix x = feature_matrix(synth.data);
    const auto y = event_targets(synth.data);
    const LogRegModel lr = logreg_train(x, y, LogRegTrainConfig{.seed = 3}).model;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) correct += (logreg_predict(lr, x.row(i)) >= 0.5) == (y[i] == 1);
    const double accuracy = static_cast<double>(correct) / static_cast<double>(x.rows());

    // stage 2 training loss
    const fixture::EventSet events = fixture::event_set(30, 30, 4);
    TrainConfig tc;
    tc.epochs = 75;
    tc.learning_rate = 0.01;
    tc.standardize_input = true;
    tc.seed = 4;
    const TrainResult tr = train_cnn({events.inputs, events.labels}, fixture::kTinyShape, tc);
    const double drop = 1.0 - tr.train_loss.back() / tr.initial_loss;

    // augmentation direction: all-inclusive vs. baseline with duplication d=10
    ExperimentConfig ec;
    ec.shape = fixture::kTinyShape;
    ec.train.epochs = 10;
    ec.train.learning_rate = 0.01;
    ec.train.standardize_input = true;
    ec.seed = 5;
    const ExperimentReport rep = run_experiment(gen_dataset(20, 30, 10, 1).data, AugmentMethod::duplication(10), ec);
    std::size_t wins = 0;
    std::string per_fold;
    for (std::size_t f = 0; f < rep.folds.size(); ++f) {
        const double base = rep.result(f, ModelVariant::Baseline).precision;
        const double aug = rep.result(f, ModelVariant::AllInclusive).precision;
        wins += aug >= base;
        per_fold += fmt(f ? " " : "", aug, "/", base);
    }
    return {accuracy == 1.0 && drop >= 0.5 && wins >= 4,
            fmt("logreg train accuracy ", accuracy, "; CNN loss ", tr.initial_loss, " -> ", tr.train_loss.back(), " (",
                drop * 100.0, "% drop); all-inclusive >= baseline on ", wins, "/5 folds [", per_fold, "]")};
}

Outcome serialization() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    std::size_t failures_lr = 0, failures_cnn = 0, failures_log = 0;
    for (int t = 0; t < 100; ++t) {
        LogRegModel lr;
        const std::size_t p = 1 + rng() % 8;
        for (std::size_t i = 0; i <= p; ++i) lr.beta.push_back(normal(rng) * std::exp(normal(rng) * 10.0));
        for (std::size_t i = 0; i < p; ++i) {
            lr.feature_mean.push_back(normal(rng));
            lr.feature_scale.push_back(std::exp(normal(rng)));
        }
        lr.log_features = rng() % 2;
        const auto lr_bytes = write_model(lr);
        failures_lr += !(parse_logreg_model(lr_bytes) == lr) || write_model(parse_logreg_model(lr_bytes)) != lr_bytes;

        const CnnShape s{2 + rng() % 6, 8 + rng() % 12, 1 + rng() % 4, 1 + rng() % 2, 1 + rng() % 4, 1, 1 + rng() % 3};
        CnnModel m = init_cnn(s, rng());
        m.input_mean = normal(rng);
        m.input_scale = std::exp(normal(rng));
        m.threshold = std::uniform_real_distribution<double>()(rng);
        m.dense_bias = normal(rng);
        for (double& b : m.conv_bias) b = normal(rng);
        const auto cnn_bytes = write_model(m);
        failures_cnn += !(parse_cnn_model(cnn_bytes) == m) || write_model(parse_cnn_model(cnn_bytes)) != cnn_bytes;

        std::vector<std::uint8_t> log;
        byteio::put_bytes(log, BinaryLogHeader::kMagic);
        byteio::put(log, BinaryLogHeader::kVersion);
        byteio::put(log, static_cast<std::uint32_t>(1 + rng() % 4000));
        byteio::put(log, std::uint8_t{3});
        byteio::put(log, std::uniform_real_distribution<float>(1e-5f, 1e-2f)(rng));
        std::uint64_t ts = rng() % 1'000'000'000'000ull;
        const std::size_t n = rng() % 400;
        for (std::size_t i = 0; i < n; ++i) {
            ts += 1 + rng() % 2000;
            byteio::put(log, ts);
            for (int a = 0; a < 3; ++a) byteio::put(log, static_cast<std::int16_t>(rng()));
        }
        const Recording rec = parse_binary(log);
        const Recording again = parse_binary(write_binary(rec, parse_binary_header(log).scale));
        failures_log += write_binary(rec, parse_binary_header(log).scale) != log || again.channels != rec.channels ||
                        again.timestamps_us != rec.timestamps_us;
    }
    return {failures_lr + failures_cnn + failures_log == 0,
            fmt("100 logistic, 100 CNN, 100 binary logs; failures ", failures_lr, "/", failures_cnn, "/", failures_log)};
}

Outcome scenario(const fixture::Cascade& cascade) {
    const ReplayRecording replay = gen_replay(3.0, 38, 1, 2024);
    std::size_t stage2 = 0;
    const auto events = detect_stream(replay.recording, cascade.logreg, cascade.cnn, DetectorConfig{}, &stage2);
    std::size_t detections = 0, falls = 0, injected_hit = 0;
    bool fall_at_injected_human = false;
    for (const auto& e : events) {
        detections += e.stage2_score.has_value();
        falls += e.verdict == Verdict::HumanFall;
    }
    for (const auto& ie : replay.events) {
        injected_hit += events[ie.window_index].stage2_score.has_value();
        if (ie.kind == EventKind::HumanFall)
            fall_at_injected_human = events[ie.window_index].verdict == Verdict::HumanFall;
    }
    const bool pass = detections >= 38 && detections <= 41 && falls == 1 && fall_at_injected_human;
    return {pass, fmt("39 injected (38 object, 1 human): ", detections, " stage-1 detections (", injected_hit,
                      " injected), ", falls, " human-fall verdicts", fall_at_injected_human ? " at the injected fall" : "")};
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    const fixture::Cascade cascade = fixture::train_cascade(101);
    std::printf("trained scenario cascade in %.1f s\n", seconds_since(t0));

    criterion("shape fidelity", 1.0, shape_fidelity);
    criterion("window arithmetic", 60.0, [&] { return window_arithmetic(cascade); });
    criterion("DFT oracle", 0.0, dft_oracle);
    criterion("gradient check", 30.0, gradient_check);
    criterion("threshold oracle", 0.0, threshold_oracle);
    criterion("anti-leakage", 0.0, anti_leakage);
    criterion("augmentation invariants", 0.0, augmentation_invariants);
    criterion("learning sanity", 600.0, learning_sanity);
    criterion("serialization", 0.0, serialization);
    criterion("scenario fixture", 0.0, [&] { return scenario(cascade); });

    std::printf("%d of 10 criteria failed\n", failures);
    return failures;
}
