#pragma once

// Small trained cascades on the synthetic distribution, shared by the deploy
// tests and the acceptance run.

#include <vector>

#include "falldet/cnn.hpp"
#include "falldet/experiment.hpp"
#include "falldet/logreg.hpp"
#include "falldet/metrics.hpp"
#include "falldet/synth.hpp"
#include "falldet/train.hpp"

namespace fixture {

inline const falldet::CnnShape kTinyShape{63, 251, 8, 63, 15, 1, 4};

struct Cascade {
    falldet::LogRegModel logreg;
    falldet::CnnModel cnn;
};

/// Event windows (object and human) with their spectrograms and human-fall targets.
struct EventSet {
    std::vector<falldet::Matrix> inputs;
    std::vector<int> labels;
};

inline EventSet event_set(std::size_t n_object, std::size_t n_human, std::uint64_t seed) {
    using namespace falldet;
    const auto synth = gen_dataset(0, n_object, n_human, seed);
    LabeledDataset events;
    for (std::size_t i = 0; i < synth.data.size(); ++i)
        if (synth.data.labels[i] != ClassLabel::Noise)
            events.push_back(synth.data.windows[i], synth.data.labels[i], synth.data.meta[i]);
    return {spectrogram_inputs(events, StftConfig{}, kDefaultSampleRate), human_fall_targets(events)};
}

/// Stage 1 learns event vs. noise from window features; stage 2 learns human
/// fall vs. other events from spectrograms, with its threshold picked at
/// recall 1 on a separate draw.
inline Cascade train_cascade(std::uint64_t seed) {
    using namespace falldet;
    Cascade c;
    const auto synth = gen_dataset(60, 30, 30, seed);
    const Matrix x = feature_matrix(synth.data);
    const auto y = event_targets(synth.data);
    c.logreg = logreg_train(x, y, LogRegTrainConfig{.seed = seed}).model;

    const EventSet train = event_set(100, 100, seed + 1);
    TrainConfig tc;
    tc.epochs = 30;
    tc.learning_rate = 0.01;
    tc.batch_size = 16;
    tc.standardize_input = true;
    tc.seed = seed;
    c.cnn = train_cnn({train.inputs, train.labels}, kTinyShape, tc).model;

    const EventSet held_out = event_set(100, 100, seed + 2);
    c.cnn.threshold = select_threshold(cnn_scores(c.cnn, held_out.inputs), held_out.labels).threshold;
    return c;
}

}  // namespace fixture
