#pragma once

#include <optional>
#include <string>

#include "cli_config.hpp"

namespace falldet::cli {

/// Command-specific arguments; each command reads only its own.
struct Args {
    std::string input;
    std::string out;
    std::string csv;
    std::optional<double> hours;
    std::optional<std::size_t> noise;
    std::optional<std::size_t> objects;
    std::optional<std::size_t> humans;
    std::string format = "binary";
    std::size_t window = 0;
    std::size_t configs = 9;
    int max_epochs = 20;
    int reduction = 3;
    bool realtime = false;
};

int cmd_synth(const Config& cfg, const Args& args);
int cmd_ingest(const Config& cfg, const Args& args);
int cmd_features(const Config& cfg, const Args& args);
int cmd_spectrogram(const Config& cfg, const Args& args);
int cmd_train_logreg(const Config& cfg, const Args& args);
int cmd_train_cnn(const Config& cfg, const Args& args);
int cmd_tune(const Config& cfg, const Args& args);
int cmd_augment(const Config& cfg, const Args& args);
int cmd_evaluate(const Config& cfg, const Args& args);
/// Exit status 2 when any window is classified a human fall.
int cmd_detect(const Config& cfg, const Args& args);

}  // namespace falldet::cli
