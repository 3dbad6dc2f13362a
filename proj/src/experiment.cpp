#include "falldet/experiment.hpp"

#include <mutex>
#include <sstream>

#include "json.hpp"

#include "falldet/error.hpp"
#include "falldet/metrics.hpp"
#include "falldet/random.hpp"
#include "parallel.hpp"

namespace falldet {
namespace {

struct Inputs {
    std::vector<Matrix> x;
    std::vector<int> y;

    TrainingSet set() const { return {x, y}; }
};

// Spectrograms for an augmented set whose first source.size() windows are the
// source windows; copies bit-equal to their source reuse its spectrogram.
Inputs make_inputs(const LabeledDataset& data, const std::vector<Matrix>& source_inputs,
                   const LabeledDataset& source, const StftConfig& stft, double sample_rate) {
    Inputs in;
    in.y = human_fall_targets(data);
    in.x.reserve(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& src = data.meta[i].source_index;
        if (i < source.size()) {
            in.x.push_back(source_inputs[i]);
        } else if (src && *src < source.size() && source.windows[*src].samples == data.windows[i].samples) {
            in.x.push_back(source_inputs[*src]);
        } else {
            in.x.push_back(spectrogram(data.windows[i], stft, sample_rate).power);
        }
    }
    return in;
}

Inputs join(const Inputs& a, const Inputs& b) {
    Inputs out = a;
    out.x.insert(out.x.end(), b.x.begin(), b.x.end());
    out.y.insert(out.y.end(), b.y.begin(), b.y.end());
    return out;
}

VariantResult evaluate(ModelVariant v, const CnnModel& model, const Inputs& val, std::size_t train_size) {
    const std::vector<double> scores = cnn_scores(model, val.x);
    const ThresholdChoice t = select_threshold(scores, val.y);
    return {v, t.threshold, t.precision, recall(t.counts), train_size};
}

}  // namespace

std::string_view to_string(ModelVariant v) {
    switch (v) {
        case ModelVariant::Baseline: return "baseline";
        case ModelVariant::AllInclusive: return "all-inclusive";
        case ModelVariant::AugmentedOnly: return "augmented-only";
        case ModelVariant::TwoStep: return "two-step";
    }
    return "baseline";
}

double ExperimentReport::mean_precision(ModelVariant v) const {
    if (folds.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t f = 0; f < folds.size(); ++f) sum += result(f, v).precision;
    return sum / static_cast<double>(folds.size());
}

const VariantResult& ExperimentReport::result(std::size_t fold, ModelVariant v) const {
    for (const auto& r : folds.at(fold).variants)
        if (r.variant == v) return r;
    throw InvalidArgument("variant missing from report");
}

std::vector<Matrix> spectrogram_inputs(const LabeledDataset& data, const StftConfig& stft, double sample_rate) {
    std::vector<Matrix> out;
    out.reserve(data.size());
    for (const Window& w : data.windows) out.push_back(spectrogram(w, stft, sample_rate).power);
    return out;
}

ExperimentReport run_experiment(const LabeledDataset& data, const AugmentMethod& method,
                                const ExperimentConfig& config, const FoldObserver& observer) {
    data.validate();
    config.shape.validate();
    if (data.count(ClassLabel::HumanFall) < config.k)
        throw DataError("experiment needs at least k human-fall windows");

    const std::vector<Matrix> all_inputs = spectrogram_inputs(data, config.stft, config.sample_rate);
    const std::vector<Fold> folds = stratified_kfold(data, config.k, config.seed);
    const TrainConfig fine = config.fine_tune.value_or(config.train);

    ExperimentReport report;
    report.method = method.describe();
    report.folds.resize(folds.size());
    std::mutex observer_mutex;
    detail::parallel_for(folds.size(), config.jobs, [&](std::size_t f) {
        const LabeledDataset train = data.subset(folds[f].train);
        const LabeledDataset val = data.subset(folds[f].validation);
        const LabeledDataset aug = augment_dataset(train, method, derive_seed(config.seed, 100 + f));
        if (observer) {
            const std::lock_guard lock(observer_mutex);
            observer(FoldData{f, train, aug, val});
        }

        Inputs train_in;
        train_in.y = human_fall_targets(train);
        for (std::size_t i : folds[f].train) train_in.x.push_back(all_inputs[i]);
        Inputs val_in;
        val_in.y = human_fall_targets(val);
        for (std::size_t i : folds[f].validation) val_in.x.push_back(all_inputs[i]);
        const Inputs aug_in = make_inputs(aug, train_in.x, train, config.stft, config.sample_rate);
        const Inputs all_in = join(train_in, aug_in);

        TrainConfig tc = config.train;
        tc.seed = derive_seed(config.seed, 200 + f);
        TrainConfig ft = fine;
        ft.seed = tc.seed;

        FoldResult fr;
        fr.fold = f;
        fr.validation_size = val.size();
        fr.validation_positives = val.count(ClassLabel::HumanFall);

        const CnnModel baseline = train_cnn(train_in.set(), config.shape, tc).model;
        fr.variants.push_back(evaluate(ModelVariant::Baseline, baseline, val_in, train_in.x.size()));
        const CnnModel inclusive = train_cnn(all_in.set(), config.shape, tc).model;
        fr.variants.push_back(evaluate(ModelVariant::AllInclusive, inclusive, val_in, all_in.x.size()));
        const CnnModel augmented = train_cnn(aug_in.set(), config.shape, tc).model;
        fr.variants.push_back(evaluate(ModelVariant::AugmentedOnly, augmented, val_in, aug_in.x.size()));
        const CnnModel two_step = train_cnn(train_in.set(), config.shape, ft, std::nullopt, &augmented).model;
        fr.variants.push_back(evaluate(ModelVariant::TwoStep, two_step, val_in, aug_in.x.size() + train_in.x.size()));
        report.folds[f] = std::move(fr);
    });
    return report;
}

std::string report_jsonl(const ExperimentReport& report) {
    std::string out;
    for (const FoldResult& f : report.folds) {
        for (const VariantResult& v : f.variants) {
            nlohmann::ordered_json j;
            j["method"] = report.method;
            j["fold"] = f.fold;
            j["variant"] = std::string(to_string(v.variant));
            j["threshold"] = v.threshold;
            j["precision"] = v.precision;
            j["recall"] = v.recall;
            j["train_size"] = v.train_size;
            j["validation_size"] = f.validation_size;
            j["validation_positives"] = f.validation_positives;
            out += j.dump() + "\n";
        }
    }
    for (ModelVariant v : kModelVariants) {
        nlohmann::ordered_json j;
        j["method"] = report.method;
        j["variant"] = std::string(to_string(v));
        j["mean_precision"] = report.mean_precision(v);
        j["folds"] = report.folds.size();
        out += j.dump() + "\n";
    }
    return out;
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os.precision(17);
    os << "method,variant";
    for (std::size_t f = 0; f < report.folds.size(); ++f) os << ",fold_" << f + 1;
    os << ",mean\n";
    for (ModelVariant v : kModelVariants) {
        os << report.method << ',' << to_string(v);
        for (std::size_t f = 0; f < report.folds.size(); ++f) os << ',' << report.result(f, v).precision;
        os << ',' << report.mean_precision(v) << '\n';
    }
    return os.str();
}

}  // namespace falldet
