#include "cli_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace falldet::cli {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::optional<double> to_real(std::string_view s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_count(std::string_view s) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<bool> to_flag(std::string_view s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    return std::nullopt;
}

std::vector<KeySpec> build_schema() {
    using T = ValueType;
    return {
        {"sample_rate", T::Real, "1600", "sampling rate in Hz for synthesized recordings", {}, false},
        {"window_seconds", T::Real, "10", "window length in seconds", {}, false},
        {"step_seconds", T::Real, "10", "window step in seconds (equal to the length: no overlap)", {}, false},
        {"axis", T::Choice, "z", "accelerometer axis fed to the models", {"x", "y", "z", "magnitude"}, false},
        {"stft_segment", T::Count, "500", "STFT segment length in samples", {}, false},
        {"stft_hop", T::Count, "250", "STFT hop in samples", {}, false},
        {"stft_window", T::Choice, "hann", "STFT taper", {"hann", "rectangular"}, false},
        {"log_power", T::Flag, "true", "use ln(power + log_floor) spectrograms", {}, false},
        {"log_floor", T::Real, "0.01", "power offset before the log, in g^2", {}, false},
        {"seed", T::Count, "0", "seed from which every random stream is derived", {}, false},
        {"logreg_model", T::Text, "", "stage-1 model file", {}, true},
        {"cnn_model", T::Text, "", "stage-2 model file", {}, true},
        {"tau1", T::Real, "0.5", "stage-1 threshold on the event probability", {}, false},
        {"tau2", T::Real, "", "stage-2 threshold (default: the one stored with the CNN)", {}, true},
        {"filters", T::Count, "240", "CNN filter count", {}, false},
        {"kernel_width", T::Count, "145", "CNN kernel width in frequency bins (height spans all frames)", {}, false},
        {"pool_width", T::Count, "4", "max-pooling width", {}, false},
        {"loss", T::Choice, "bce", "training loss", {"bce", "binary-cross-entropy", "binary-focal", "sigmoid-focal"}, false},
        {"learning_rate", T::Real, "0.01", "CNN learning rate", {}, false},
        {"epochs", T::Count, "75", "CNN training epochs", {}, false},
        {"batch_size", T::Count, "32", "mini-batch size (0: full batch)", {}, false},
        {"optimizer", T::Choice, "adam", "CNN optimizer", {"adam", "sgd"}, false},
        {"patience", T::Count, "", "early-stopping patience in epochs (default: none)", {}, true},
        {"standardize", T::Flag, "true", "standardize CNN inputs with training statistics", {}, false},
        {"logreg_lr", T::Real, "2", "logistic-regression learning rate", {}, false},
        {"logreg_epochs", T::Count, "500", "logistic-regression epochs", {}, false},
        {"noise_sigma", T::Real, "0.002", "synthetic sensor noise in g", {}, false},
        {"folds", T::Count, "5", "cross-validation folds", {}, false},
        {"augment", T::Text, "duplicate:0", "augmentation: duplicate:D or amplify:LO:HI[:VARIANTS]", {}, false},
        {"jobs", T::Count, "1", "parallel folds or tuning trials", {}, false},
    };
}

}  // namespace

const std::vector<KeySpec>& schema() {
    static const std::vector<KeySpec> keys = build_schema();
    return keys;
}

const KeySpec* find_key(std::string_view name) {
    for (const KeySpec& k : schema())
        if (k.name == name) return &k;
    return nullptr;
}

Config::Config() {
    for (const KeySpec& k : schema()) values_[k.name] = k.default_value;
}

void Config::set(std::string_view key, std::string_view value, std::string_view origin) {
    const KeySpec* spec = find_key(key);
    const std::string where = std::string(origin) + ": ";
    if (!spec) throw UsageError(where + "unknown key '" + std::string(key) + "'");
    const std::string v(trim(value));
    const auto bad = [&](std::string_view expected) {
        return UsageError(where + spec->name + " expects " + std::string(expected) + ", got '" + v + "'");
    };
    if (!(v.empty() && spec->optional)) {
        switch (spec->type) {
            case ValueType::Count:
                if (!to_count(v)) throw bad("a non-negative integer");
                break;
            case ValueType::Real:
                if (!to_real(v)) throw bad("a number");
                break;
            case ValueType::Flag:
                if (!to_flag(v)) throw bad("true or false");
                break;
            case ValueType::Choice:
                if (std::find(spec->choices.begin(), spec->choices.end(), v) == spec->choices.end())
                    throw bad("one of the listed choices");
                break;
            case ValueType::Text:
                if (v.empty()) throw bad("a value");
                break;
        }
    }
    values_[spec->name] = v;
}

void Config::load_text(std::string_view text, std::string_view origin) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw UsageError(where + ": expected key = value");
        set(trim(line.substr(0, eq)), line.substr(eq + 1), where);
    }
}

const std::string& Config::text(std::string_view key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::logic_error("key missing from schema: " + std::string(key));
    return it->second;
}

double Config::real(std::string_view key) const {
    return *to_real(text(key));
}

std::size_t Config::count(std::string_view key) const {
    return static_cast<std::size_t>(*to_count(text(key)));
}

bool Config::flag(std::string_view key) const {
    return *to_flag(text(key));
}

WindowParams Config::window_params() const {
    return {real("window_seconds"), real("step_seconds"), parse_axis(text("axis"))};
}

StftConfig Config::stft() const {
    StftConfig s;
    s.segment_len = count("stft_segment");
    s.hop = count("stft_hop");
    s.window_fn = text("stft_window") == "hann" ? WindowFunction::Hann : WindowFunction::Rectangular;
    s.log_power = flag("log_power");
    s.log_floor = real("log_floor");
    s.validate();
    return s;
}

SynthConfig Config::synth() const {
    SynthConfig s;
    s.sample_rate = real("sample_rate");
    s.window_seconds = real("window_seconds");
    s.noise_sigma_g = real("noise_sigma");
    return s;
}

CnnShape Config::shape(std::size_t in_h, std::size_t in_w) const {
    CnnShape s;
    s.in_h = in_h;
    s.in_w = in_w;
    s.filters = count("filters");
    s.kernel_h = in_h;
    s.kernel_w = count("kernel_width");
    s.pool_w = count("pool_width");
    s.validate();
    return s;
}

TrainConfig Config::train() const {
    TrainConfig t;
    t.loss = parse_loss(text("loss"));
    t.learning_rate = real("learning_rate");
    t.epochs = static_cast<int>(std::min<std::size_t>(count("epochs"), 1'000'000));
    t.batch_size = count("batch_size");
    t.optimizer = text("optimizer") == "adam" ? OptimizerKind::Adam : OptimizerKind::Sgd;
    if (has("patience")) t.patience = static_cast<int>(std::min<std::size_t>(count("patience"), 1'000'000));
    t.standardize_input = flag("standardize");
    t.validate();
    return t;
}

LogRegTrainConfig Config::logreg() const {
    LogRegTrainConfig c;
    c.learning_rate = real("logreg_lr");
    c.epochs = static_cast<int>(std::min<std::size_t>(count("logreg_epochs"), 100'000'000));
    return c;
}

DetectorConfig Config::detector() const {
    DetectorConfig d;
    d.window = window_params();
    d.stft = stft();
    d.tau1 = real("tau1");
    if (has("tau2")) d.tau2 = real("tau2");
    return d;
}

std::string Config::dump() const {
    std::ostringstream os;
    for (const KeySpec& k : schema()) os << k.name << " = " << text(k.name) << '\n';
    return os.str();
}

}  // namespace falldet::cli
