#include "falldet/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "falldet/error.hpp"
#include "falldet/random.hpp"

namespace falldet {

ConfusionCounts confusion(std::span<const double> scores, std::span<const int> labels, double threshold) {
    if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        if (labels[i] == 1) (predicted ? c.tp : c.fn)++;
        else (predicted ? c.fp : c.tn)++;
    }
    return c;
}

double recall(const ConfusionCounts& c) {
    const std::size_t d = c.tp + c.fn;
    return d == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(d);
}

double precision(const ConfusionCounts& c) {
    const std::size_t d = c.tp + c.fp;
    return d == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(d);
}

ThresholdChoice select_threshold(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw InvalidArgument("scores and labels differ in length");
    bool any = false;
    double lowest = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        if (!any || scores[i] < lowest) lowest = scores[i];
        any = true;
    }
    if (!any) throw InvalidArgument("threshold selection needs at least one positive example");
    ThresholdChoice t;
    t.threshold = lowest;
    t.counts = confusion(scores, labels, lowest);
    t.precision = precision(t.counts);
    return t;
}

std::vector<Fold> stratified_kfold(std::span<const int> classes, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw InvalidArgument("k-fold needs k >= 2");
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < classes.size(); ++i) members[classes[i]].push_back(i);
    for (const auto& [cls, idx] : members)
        if (idx.size() < k)
            throw DataError("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                                  " members, fewer than k = " + std::to_string(k));

    std::vector<std::vector<std::size_t>> val(k);
    std::size_t next = 0;
    for (auto& [cls, idx] : members) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls) + 1));
        std::shuffle(idx.begin(), idx.end(), rng);
        for (std::size_t i : idx) {
            val[next].push_back(i);
            next = (next + 1) % k;
        }
    }
    std::vector<Fold> folds(k);
    for (std::size_t f = 0; f < k; ++f) {
        std::sort(val[f].begin(), val[f].end());
        std::vector<bool> in_val(classes.size(), false);
        for (std::size_t i : val[f]) in_val[i] = true;
        for (std::size_t i = 0; i < classes.size(); ++i)
            if (!in_val[i]) folds[f].train.push_back(i);
        folds[f].validation = std::move(val[f]);
    }
    return folds;
}

std::vector<Fold> stratified_kfold(const LabeledDataset& data, std::size_t k, std::uint64_t seed) {
    std::vector<int> classes;
    classes.reserve(data.size());
    for (ClassLabel l : data.labels) classes.push_back(static_cast<int>(l));
    return stratified_kfold(classes, k, seed);
}

std::map<std::string, double> amplitude_report(const std::map<std::string, std::vector<Recording>>& by_position) {
    std::map<std::string, double> out;
    for (const auto& [position, recordings] : by_position) {
        if (recordings.empty()) throw InvalidArgument("no recordings for position '" + position + "'");
        double peak = 0.0;
        for (const Recording& r : recordings)
            for (const auto& c : r.channels)
                for (double v : c) peak = std::max(peak, std::abs(v));
        out[position] = peak;
    }
    return out;
}

}  // namespace falldet
