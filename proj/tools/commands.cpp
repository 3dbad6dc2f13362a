#include "commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "falldet/augment.hpp"
#include "falldet/dataset_io.hpp"
#include "falldet/error.hpp"
#include "falldet/experiment.hpp"
#include "falldet/ingest.hpp"
#include "falldet/metrics.hpp"
#include "falldet/model_io.hpp"
#include "falldet/random.hpp"
#include "falldet/tune.hpp"

namespace falldet::cli {
namespace fs = std::filesystem;

namespace {

// Seed streams per command, so commands sharing a seed stay independent.
enum Stream : std::uint64_t { kSynth = 1, kLogReg, kSplit, kAugment, kCnn, kTune, kExperiment };

enum class InputKind { BinaryRecording, CsvRecording, Manifest, DatasetDump };

bool starts_with(const std::vector<std::uint8_t>& bytes, std::string_view magic) {
    return bytes.size() >= magic.size() && std::equal(magic.begin(), magic.end(), bytes.begin());
}

InputKind classify(const std::vector<std::uint8_t>& bytes) {
    if (starts_with(bytes, BinaryLogHeader::kMagic)) return InputKind::BinaryRecording;
    if (starts_with(bytes, "FDD1")) return InputKind::DatasetDump;
    for (std::uint8_t c : bytes) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
        return c == '{' ? InputKind::Manifest : InputKind::CsvRecording;
    }
    return InputKind::Manifest;
}

std::string as_text(const std::vector<std::uint8_t>& bytes) {
    return {bytes.begin(), bytes.end()};
}

void require(const std::string& value, std::string_view flag) {
    if (value.empty()) throw UsageError("missing required " + std::string(flag));
}

Recording load_recording(const std::string& path) {
    const auto bytes = read_file_bytes(path);
    switch (classify(bytes)) {
        case InputKind::BinaryRecording: return parse_binary(bytes);
        case InputKind::CsvRecording: return parse_csv(as_text(bytes));
        default: throw DataError("'" + path + "' is not a recording");
    }
}

LabeledDataset load_labeled(const Config& cfg, const std::string& path) {
    const auto bytes = read_file_bytes(path);
    switch (classify(bytes)) {
        case InputKind::DatasetDump: return parse_dataset(bytes);
        case InputKind::Manifest:
            return load_dataset(parse_manifest(as_text(bytes)), cfg.window_params(), fs::path(path).parent_path());
        default: throw DataError("'" + path + "' is neither a manifest nor a dataset dump");
    }
}

std::string output_path(const Args& args, const Config& cfg, std::string_view key) {
    if (!args.out.empty()) return args.out;
    if (cfg.has(key)) return cfg.text(key);
    throw UsageError("missing --out (or --" + std::string(key) + ")");
}

void write_or_print(const std::string& path, std::string_view text) {
    if (path.empty())
        std::cout << text;
    else
        write_file_text(path, text);
}

std::string class_counts(const LabeledDataset& d) {
    std::ostringstream os;
    os << d.size() << " windows (" << d.count(ClassLabel::Noise) << " noise, " << d.count(ClassLabel::ObjectFall)
       << " object-fall, " << d.count(ClassLabel::HumanFall) << " human-fall)";
    return os.str();
}

struct Split {
    LabeledDataset train;
    LabeledDataset validation;
};

// Fold 0 of a stratified split is held out for checkpointing and thresholds.
Split holdout_split(const Config& cfg, const LabeledDataset& data) {
    const std::size_t k = cfg.count("folds");
    if (k < 2) throw UsageError("folds must be at least 2");
    const auto folds = stratified_kfold(data, k, derive_seed(cfg.seed(), kSplit));
    return {data.subset(folds[0].train), data.subset(folds[0].validation)};
}

std::size_t window_samples(const LabeledDataset& data) {
    if (data.empty()) throw EmptyInputError("dataset has no windows");
    return data.windows.front().samples.size();
}

}  // namespace

int cmd_synth(const Config& cfg, const Args& args) {
    require(args.out, "--out");
    SynthConfig sc = cfg.synth();
    if (args.format != "binary" && args.format != "csv") throw UsageError("--format must be binary or csv");
    sc.format = args.format == "csv" ? ManifestEntry::Format::Csv : ManifestEntry::Format::Binary;
    fs::create_directories(args.out);
    const std::uint64_t seed = derive_seed(cfg.seed(), kSynth);

    if (args.hours) {
        const auto replay = gen_replay(*args.hours, args.objects.value_or(38), args.humans.value_or(1), seed, sc);
        const fs::path rec = fs::path(args.out) / (sc.format == ManifestEntry::Format::Csv ? "recording.csv" : "recording.fds");
        write_recording(rec, replay.recording, sc.format);
        std::string truth;
        for (const auto& e : replay.events) {
            nlohmann::ordered_json j;
            j["window_index"] = e.window_index;
            j["time_s"] = e.time_s;
            j["kind"] = e.kind == EventKind::HumanFall ? "human-fall" : "object-fall";
            j["peak_g"] = e.peak_g;
            truth += j.dump() + "\n";
        }
        write_file_text(fs::path(args.out) / "injected.jsonl", truth);
        std::cout << "wrote " << rec.string() << ": " << replay.recording.length() << " samples, "
                  << replay.events.size() << " injected events\n";
        return 0;
    }

    const auto synth = gen_dataset(args.noise.value_or(60), args.objects.value_or(30), args.humans.value_or(30), seed, sc);
    for (std::size_t i = 0; i < synth.manifest.size(); ++i)
        write_recording(fs::path(args.out) / synth.manifest[i].path, synth.recordings[i], sc.format);
    write_file_text(fs::path(args.out) / "manifest.jsonl", write_manifest(synth.manifest));
    std::cout << "wrote " << synth.manifest.size() << " recordings and manifest.jsonl to " << args.out << ": "
              << class_counts(synth.data) << "\n";
    return 0;
}

int cmd_ingest(const Config& cfg, const Args& args) {
    require(args.input, "--manifest");
    require(args.out, "--out");
    const LabeledDataset data = load_labeled(cfg, args.input);
    write_file_bytes(args.out, write_dataset(data));
    std::cout << "wrote " << args.out << ": " << class_counts(data) << "\n";
    return 0;
}

int cmd_features(const Config& cfg, const Args& args) {
    require(args.input, "--input");
    const auto bytes = read_file_bytes(args.input);
    LabeledDataset data;
    bool labeled = true;
    switch (classify(bytes)) {
        case InputKind::BinaryRecording:
        case InputKind::CsvRecording:
            labeled = false;
            for (Window& w : make_windows(load_recording(args.input), cfg.window_params()))
                data.push_back(std::move(w), ClassLabel::Noise);
            break;
        default: data = load_labeled(cfg, args.input);
    }
    std::ostringstream os;
    os.precision(17);
    os << "window,t_start,label,max,median,mean,q25,q75\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        os << i << ',' << data.windows[i].t_start << ',' << (labeled ? to_string(data.labels[i]) : "");
        for (double v : extract_features(data.windows[i]).to_array()) os << ',' << v;
        os << '\n';
    }
    write_or_print(args.out, os.str());
    return 0;
}

int cmd_spectrogram(const Config& cfg, const Args& args) {
    require(args.input, "--input");
    require(args.out, "--out");
    const Recording rec = load_recording(args.input);
    const auto windows = make_windows(rec, cfg.window_params());
    if (args.window >= windows.size())
        throw DataError("window " + std::to_string(args.window) + " out of range: recording has " +
                        std::to_string(windows.size()));
    const Spectrogram s = spectrogram(windows[args.window], cfg.stft(), rec.sample_rate);
    write_file_text(args.out + ".csv", spectrogram_csv(s));
    write_file_bytes(args.out + ".pgm", spectrogram_pgm(s));
    std::cout << "wrote " << args.out << ".csv and " << args.out << ".pgm: " << s.frames() << " x " << s.bins()
              << "\n";
    return 0;
}

int cmd_train_logreg(const Config& cfg, const Args& args) {
    require(args.input, "--data");
    const std::string out = output_path(args, cfg, "logreg_model");
    const LabeledDataset data = load_labeled(cfg, args.input);
    const Matrix x = feature_matrix(data);
    const std::vector<int> y = event_targets(data);
    LogRegTrainConfig lc = cfg.logreg();
    lc.seed = derive_seed(cfg.seed(), kLogReg);
    const LogRegTrainResult r = logreg_train(x, y, lc);

    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        correct += (logreg_predict(r.model, x.row(i)) >= cfg.real("tau1")) == (y[i] == 1);
    write_file_bytes(out, write_model(r.model));
    std::cout << "wrote " << out << ": training loss " << r.loss_history.back() << ", accuracy at tau1 "
              << static_cast<double>(correct) / static_cast<double>(x.rows()) << "\n";
    return 0;
}

int cmd_train_cnn(const Config& cfg, const Args& args) {
    require(args.input, "--data");
    const std::string out = output_path(args, cfg, "cnn_model");
    const LabeledDataset data = load_labeled(cfg, args.input);
    Split split = holdout_split(cfg, data);
    split.train = augment_dataset(split.train, AugmentMethod::parse(cfg.text("augment")),
                                  derive_seed(cfg.seed(), kAugment));

    const StftConfig stft = cfg.stft();
    const double fs = cfg.real("sample_rate");
    const auto train_x = spectrogram_inputs(split.train, stft, fs);
    const auto val_x = spectrogram_inputs(split.validation, stft, fs);
    const auto train_y = human_fall_targets(split.train);
    const auto val_y = human_fall_targets(split.validation);
    const CnnShape shape = cfg.shape(train_x.front().rows(), train_x.front().cols());
    TrainConfig tc = cfg.train();
    tc.seed = derive_seed(cfg.seed(), kCnn);

    TrainResult r = train_cnn({train_x, train_y}, shape, tc, TrainingSet{val_x, val_y});
    const ThresholdChoice t = select_threshold(cnn_scores(r.model, val_x), val_y);
    r.model.threshold = t.threshold;
    write_file_bytes(out, write_model(r.model));
    std::cout << "wrote " << out << ": " << shape.param_count() << " parameters, best epoch " << r.best_epoch << " of "
              << r.train_loss.size() << ", held-out precision " << t.precision << " at threshold " << t.threshold
              << "\n";
    return 0;
}

int cmd_tune(const Config& cfg, const Args& args) {
    require(args.input, "--data");
    const LabeledDataset data = load_labeled(cfg, args.input);
    const Split split = holdout_split(cfg, data);
    const StftConfig stft = cfg.stft();
    const double fs = cfg.real("sample_rate");
    const auto train_x = spectrogram_inputs(split.train, stft, fs);
    const auto val_x = spectrogram_inputs(split.validation, stft, fs);
    const auto train_y = human_fall_targets(split.train);
    const auto val_y = human_fall_targets(split.validation);

    TuneConfig tc;
    tc.n_configs = args.configs;
    tc.max_epochs = args.max_epochs;
    tc.reduction = args.reduction;
    tc.seed = derive_seed(cfg.seed(), kTune);
    tc.base = cfg.train();
    tc.jobs = cfg.count("jobs");
    if (tc.reduction < 2) throw UsageError("--reduction must be at least 2");
    if (tc.max_epochs < 1) throw UsageError("--max-epochs must be at least 1");

    const TuneResult r = successive_halving_tune(SearchSpace{}, {train_x, train_y}, {val_x, val_y}, tc);
    write_or_print(args.out, trial_log_jsonl(r.trials));
    std::cerr << "best: filters=" << r.best.filters << " kernel_width=" << r.best.kernel_width
              << " loss=" << to_string(r.best.loss) << " learning_rate=" << r.best.learning_rate << "\n";
    return 0;
}

int cmd_augment(const Config& cfg, const Args& args) {
    require(args.input, "--data");
    require(args.out, "--out");
    const LabeledDataset data = load_labeled(cfg, args.input);
    const AugmentMethod method = AugmentMethod::parse(cfg.text("augment"));
    const LabeledDataset aug = augment_dataset(data, method, derive_seed(cfg.seed(), kAugment));
    write_file_bytes(args.out, write_dataset(aug));
    std::cout << "wrote " << args.out << " (" << method.describe() << "): " << class_counts(aug) << "\n";
    return 0;
}

int cmd_evaluate(const Config& cfg, const Args& args) {
    require(args.input, "--data");
    const LabeledDataset data = load_labeled(cfg, args.input);
    ExperimentConfig ec;
    ec.stft = cfg.stft();
    const std::size_t n = window_samples(data);
    ec.shape = cfg.shape(ec.stft.frames(n), ec.stft.bins());
    ec.train = cfg.train();
    ec.sample_rate = cfg.real("sample_rate");
    ec.k = cfg.count("folds");
    ec.seed = derive_seed(cfg.seed(), kExperiment);
    ec.jobs = cfg.count("jobs");
    if (ec.k < 2) throw UsageError("folds must be at least 2");

    const ExperimentReport report = run_experiment(data, AugmentMethod::parse(cfg.text("augment")), ec);
    if (!args.out.empty()) write_file_text(args.out, report_jsonl(report));
    if (!args.csv.empty()) write_file_text(args.csv, report_csv(report));
    std::cout << report_csv(report);
    return 0;
}

int cmd_detect(const Config& cfg, const Args& args) {
    require(args.input, "--input");
    if (!cfg.has("logreg_model")) throw UsageError("detect needs --logreg_model");
    if (!cfg.has("cnn_model")) throw UsageError("detect needs --cnn_model");
    const LogRegModel logreg = parse_logreg_model(read_file_bytes(cfg.text("logreg_model")));
    const CnnModel cnn = parse_cnn_model(read_file_bytes(cfg.text("cnn_model")));
    const DetectorConfig dc = cfg.detector();

    std::ifstream in(args.input, std::ios::binary);
    if (!in) throw DataError("cannot open '" + args.input + "'");
    char magic[4] = {};
    in.read(magic, 4);
    const bool binary = in.gcount() == 4 && std::string_view(magic, 4) == BinaryLogHeader::kMagic;
    in.clear();
    in.seekg(0);

    // Samples arrive in one-second chunks, from the stream or a parsed CSV.
    std::optional<BinaryLogReader> reader;
    std::vector<double> csv_samples;
    double fs = 0.0;
    if (binary) {
        reader.emplace(in);
        fs = reader->header().sample_rate;
    } else {
        const Recording rec = load_recording(args.input);
        fs = rec.sample_rate;
        csv_samples = select_axis(rec, dc.window.axis);
    }
    StreamingDetector detector(CascadeDetector(logreg, cnn, dc, fs));

    std::ofstream file;
    if (!args.out.empty()) {
        file.open(args.out, std::ios::binary | std::ios::trunc);
        if (!file) throw DataError("cannot write '" + args.out + "'");
    }
    std::ostream& out = args.out.empty() ? std::cout : file;

    const std::size_t chunk = std::max<std::size_t>(1, static_cast<std::size_t>(fs));
    const auto started = std::chrono::steady_clock::now();
    std::size_t fed = 0, stage2 = 0, falls = 0, windows = 0;
    std::vector<double> buf;
    while (true) {
        buf.clear();
        if (reader) {
            if (reader->read(chunk, dc.window.axis, buf) == 0) break;
        } else {
            if (fed >= csv_samples.size()) break;
            const std::size_t n = std::min(chunk, csv_samples.size() - fed);
            buf.assign(csv_samples.begin() + static_cast<std::ptrdiff_t>(fed),
                       csv_samples.begin() + static_cast<std::ptrdiff_t>(fed + n));
        }
        fed += buf.size();
        for (const DetectionEvent& e : detector.push(buf)) {
            out << event_log_line(e) << '\n';
            ++windows;
            stage2 += e.stage2_score.has_value();
            falls += e.verdict == Verdict::HumanFall;
        }
        if (args.realtime) {
            out.flush();
            std::this_thread::sleep_until(started + std::chrono::duration<double>(static_cast<double>(fed) / fs));
        }
    }
    out.flush();
    if (!out) throw DataError("writing the event log failed");
    if (windows == 0) throw EmptyInputError("recording is shorter than one window");
    std::cerr << windows << " windows, " << stage2 << " passed stage 1, " << falls << " human falls\n";
    return falls > 0 ? 2 : 0;
}

}  // namespace falldet::cli
