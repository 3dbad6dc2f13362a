#include <filesystem>
#include <functional>
#include <iostream>
#include <list>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "cli_config.hpp"
#include "commands.hpp"
#include "falldet/error.hpp"
#include "falldet/ingest.hpp"

namespace {

using namespace falldet;
using namespace falldet::cli;

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitInternal = 70;

struct Command {
    CLI::App* app = nullptr;
    std::function<int(const Config&, const Args&)> run;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
};

std::string describe(const KeySpec& k) {
    std::string text = k.help;
    if (!k.choices.empty()) {
        text += " {";
        for (std::size_t i = 0; i < k.choices.size(); ++i) text += (i ? "|" : "") + k.choices[i];
        text += "}";
    }
    text += k.default_value.empty() ? " [default: unset]" : " [default: " + k.default_value + "]";
    return text;
}

std::string type_name(ValueType t) {
    switch (t) {
        case ValueType::Count: return "UINT";
        case ValueType::Real: return "NUM";
        case ValueType::Flag: return "BOOL";
        case ValueType::Choice: return "CHOICE";
        case ValueType::Text: return "TEXT";
    }
    return "TEXT";
}

void add_schema_options(Command& cmd) {
    cmd.app->add_option("--config", cmd.config_path, "key = value configuration file; flags override it");
    for (const KeySpec& k : schema()) {
        const std::string names = k.name == "folds" ? "--folds,--k" : "--" + k.name;
        cmd.options[k.name] = cmd.app->add_option(names, cmd.values[k.name], describe(k))
                                  ->type_name(type_name(k.type))
                                  ->group("Configuration");
    }
}

Config resolve(const Command& cmd) {
    Config cfg;
    if (!cmd.config_path.empty()) {
        if (!std::filesystem::is_regular_file(cmd.config_path))
            throw UsageError("config file '" + cmd.config_path + "' not found");
        cfg.load_text(read_file_text(cmd.config_path), cmd.config_path);
    }
    for (const auto& [key, opt] : cmd.options)
        if (opt->count() > 0) cfg.set(key, cmd.values.at(key), "--" + key);
    return cfg;
}

std::string key_list() {
    std::string text = "Configuration keys, accepted by every command as --KEY VALUE or in a --config file:\n";
    for (const KeySpec& k : schema()) text += "  " + k.name + ": " + describe(k) + "\n";
    return text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage bed-vibration fall detection: synthesis, training, evaluation and replay."};
    app.name("falldet");
    app.require_subcommand(1);
    app.footer(key_list());

    Args args;
    std::list<Command> commands;
    auto add = [&](const std::string& name, const std::string& help, int (*run)(const Config&, const Args&)) {
        Command& cmd = commands.emplace_back();
        cmd.app = app.add_subcommand(name, help);
        cmd.run = run;
        add_schema_options(cmd);
        return cmd.app;
    };

    auto* synth = add("synth", "generate a labeled dataset, or with --hours a replay recording", cmd_synth);
    synth->add_option("--out", args.out, "output directory")->required();
    synth->add_option("--hours", args.hours, "write one replay recording of this length instead of a dataset");
    synth->add_option("--noise", args.noise, "noise recordings [default: 60]");
    synth->add_option("--objects", args.objects, "object-fall events [default: 30, replay: 38]");
    synth->add_option("--humans", args.humans, "human-fall events [default: 30, replay: 1]");
    synth->add_option("--format", args.format, "recording format {binary|csv}")->capture_default_str();

    auto* ingest = add("ingest", "window and label the recordings of a manifest into a dataset dump", cmd_ingest);
    ingest->add_option("--manifest", args.input, "manifest (one JSON object per line)")->required();
    ingest->add_option("--out", args.out, "dataset dump to write")->required();

    auto* features = add("features", "five window statistics as CSV", cmd_features);
    features->add_option("--input", args.input, "recording, manifest or dataset dump")->required();
    features->add_option("--out", args.out, "CSV file [default: stdout]");

    auto* spectro = add("spectrogram", "spectrogram of one window as CSV matrix and graymap", cmd_spectrogram);
    spectro->add_option("--input", args.input, "recording (binary or CSV)")->required();
    spectro->add_option("--window", args.window, "window index")->capture_default_str();
    spectro->add_option("--out", args.out, "output prefix; writes PREFIX.csv and PREFIX.pgm")->required();

    auto* logreg = add("train-logreg", "train the stage-1 event prefilter", cmd_train_logreg);
    logreg->add_option("--data", args.input, "manifest or dataset dump")->required();
    logreg->add_option("--out", args.out, "model file [default: logreg_model]");

    auto* cnn = add("train-cnn", "train the stage-2 classifier; fold 0 is held out for checkpoint and threshold",
                    cmd_train_cnn);
    cnn->add_option("--data", args.input, "manifest or dataset dump")->required();
    cnn->add_option("--out", args.out, "model file [default: cnn_model]");

    auto* tune = add("tune", "successive-halving search over CNN settings", cmd_tune);
    tune->add_option("--data", args.input, "manifest or dataset dump")->required();
    tune->add_option("--out", args.out, "trial log (JSON lines) [default: stdout]");
    tune->add_option("--configs", args.configs, "sampled configurations")->capture_default_str();
    tune->add_option("--max-epochs", args.max_epochs, "epochs of the final rung")->capture_default_str();
    tune->add_option("--reduction", args.reduction, "halving factor")->capture_default_str();

    auto* augment = add("augment", "augment the human-fall windows of a dataset", cmd_augment);
    augment->add_option("--data", args.input, "manifest or dataset dump")->required();
    augment->add_option("--out", args.out, "dataset dump to write")->required();

    auto* evaluate = add("evaluate", "cross-validated comparison of the four training variants", cmd_evaluate);
    evaluate->add_option("--data", args.input, "manifest or dataset dump")->required();
    evaluate->add_option("--out", args.out, "report as JSON lines");
    evaluate->add_option("--csv", args.csv, "precision table as CSV (also printed)");

    auto* detect = add("detect", "stream a recording through the cascade; exit 2 on any human fall", cmd_detect);
    detect->add_option("--input", args.input, "recording (binary log is streamed, CSV is loaded)")->required();
    detect->add_option("--out", args.out, "event log (JSON lines) [default: stdout]");
    detect->add_flag("--realtime", args.realtime, "pace input at the recording's sample rate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    for (const Command& cmd : commands) {
        if (!cmd.app->parsed()) continue;
        try {
            return cmd.run(resolve(cmd), args);
        } catch (const UsageError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const InvalidArgument& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const DataError& e) {
            std::cerr << "data error: " << e.what() << "\n";
            return kExitData;
        } catch (const std::filesystem::filesystem_error& e) {
            std::cerr << "data error: " << e.what() << "\n";
            return kExitData;
        } catch (const std::exception& e) {
            std::cerr << "internal error: " << e.what() << "\n";
            return kExitInternal;
        }
    }
    return kExitInternal;
}
