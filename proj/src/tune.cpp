#include "falldet/tune.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "json.hpp"

#include "falldet/error.hpp"
#include "falldet/metrics.hpp"
#include "falldet/random.hpp"
#include "parallel.hpp"

namespace falldet {

std::size_t SearchSpace::size() const {
    return filters.count() * kernel_width.count() * losses.size() * learning_rates.size();
}

TrialConfig SearchSpace::at(std::size_t index) const {
    if (index >= size()) throw InvalidArgument("search space index out of range");
    TrialConfig c;
    c.learning_rate = learning_rates[index % learning_rates.size()];
    index /= learning_rates.size();
    c.loss = losses[index % losses.size()];
    index /= losses.size();
    c.kernel_width = kernel_width.at(index % kernel_width.count());
    index /= kernel_width.count();
    c.filters = filters.at(index);
    return c;
}

bool SearchSpace::contains(const TrialConfig& c) const {
    return filters.contains(c.filters) && kernel_width.contains(c.kernel_width) &&
           std::find(losses.begin(), losses.end(), c.loss) != losses.end() &&
           std::find(learning_rates.begin(), learning_rates.end(), c.learning_rate) != learning_rates.end();
}

std::vector<Rung> halving_schedule(std::size_t n, int max_epochs, int reduction) {
    if (n == 0) throw InvalidArgument("halving schedule needs at least one configuration");
    if (max_epochs < 1 || reduction < 2) throw InvalidArgument("halving schedule needs max_epochs >= 1, reduction >= 2");
    const auto r = static_cast<std::size_t>(reduction);
    std::size_t top = 0;
    for (std::size_t p = r; p <= n; p *= r) ++top;
    std::vector<Rung> rungs;
    for (std::size_t i = 0; i <= top; ++i) {
        std::size_t div = 1;
        for (std::size_t j = 0; j < i; ++j) div *= r;
        std::size_t epoch_div = 1;
        for (std::size_t j = 0; j < top - i; ++j) epoch_div *= r;
        rungs.push_back({std::max<std::size_t>(1, n / div),
                         std::max(1, static_cast<int>(static_cast<std::size_t>(max_epochs) / epoch_div))});
    }
    return rungs;
}

TuneResult successive_halving_tune(const SearchSpace& space, const TrainingSet& train, const TrainingSet& validation,
                                   const TuneConfig& config) {
    if (space.size() == 0) throw InvalidArgument("empty search space");
    if (train.inputs.empty()) throw InvalidArgument("tuning needs training data");
    const std::size_t in_h = train.inputs.front().rows();
    const std::size_t in_w = train.inputs.front().cols();

    const std::size_t n = std::min(config.n_configs, space.size());
    Rng rng(derive_seed(config.seed, 1));
    std::vector<std::size_t> picks;
    if (n == space.size()) {
        picks.resize(n);
        std::iota(picks.begin(), picks.end(), std::size_t{0});
    } else {
        std::set<std::size_t> seen;
        std::uniform_int_distribution<std::size_t> dist(0, space.size() - 1);
        while (picks.size() < n)
            if (const std::size_t i = dist(rng); seen.insert(i).second) picks.push_back(i);
    }
    std::vector<TrialConfig> configs;
    for (std::size_t i : picks) configs.push_back(space.at(i));

    TuneResult result;
    result.schedule = halving_schedule(n, config.max_epochs, config.reduction);
    std::vector<std::size_t> alive(n);
    std::iota(alive.begin(), alive.end(), std::size_t{0});

    for (std::size_t rung = 0; rung < result.schedule.size(); ++rung) {
        const int epochs = result.schedule[rung].epochs;
        std::vector<TrialRecord> records(alive.size());
        detail::parallel_for(alive.size(), config.jobs, [&](std::size_t slot) {
            const std::size_t t = alive[slot];
            const TrialConfig& c = configs[t];
            CnnShape shape;
            shape.in_h = in_h;
            shape.in_w = in_w;
            shape.kernel_h = in_h;
            shape.filters = static_cast<std::size_t>(c.filters);
            // narrow inputs: keep at least one pooled column
            shape.kernel_w = std::min(static_cast<std::size_t>(c.kernel_width), in_w + 1 - std::min(in_w, shape.pool_w));

            TrainConfig tc = config.base;
            tc.loss = c.loss;
            tc.learning_rate = c.learning_rate;
            tc.epochs = epochs;
            tc.patience = config.base.patience.value_or(3);
            tc.seed = derive_seed(config.seed, 100 + t);

            TrialRecord rec;
            rec.trial = t;
            rec.rung = rung;
            rec.epochs = epochs;
            rec.config = c;
            try {
                const TrainResult tr = train_cnn(train, shape, tc, validation);
                rec.epochs_run = static_cast<int>(tr.train_loss.size());
                rec.val_loss = *std::min_element(tr.val_loss.begin(), tr.val_loss.end());
                const ThresholdChoice th = select_threshold(cnn_scores(tr.model, validation.inputs), validation.labels);
                rec.precision = th.precision;
                rec.threshold = th.threshold;
            } catch (const TrainingError&) {
                rec.val_loss = std::numeric_limits<double>::infinity();
                rec.precision = 0.0;
            }
            records[slot] = rec;
        });
        result.trials.insert(result.trials.end(), records.begin(), records.end());

        const bool last = rung + 1 == result.schedule.size();
        std::stable_sort(records.begin(), records.end(), [last](const TrialRecord& a, const TrialRecord& b) {
            if (last && a.precision != b.precision) return a.precision > b.precision;
            return a.val_loss < b.val_loss;
        });
        const std::size_t keep = last ? 1 : std::min(records.size(), result.schedule[rung + 1].configs);
        alive.clear();
        for (std::size_t i = 0; i < keep; ++i) alive.push_back(records[i].trial);
    }
    result.best = configs[alive.front()];
    return result;
}

std::string trial_log_jsonl(const std::vector<TrialRecord>& trials) {
    std::string out;
    for (const TrialRecord& t : trials) {
        nlohmann::ordered_json j;
        j["trial"] = t.trial;
        j["rung"] = t.rung;
        j["epochs"] = t.epochs;
        j["epochs_run"] = t.epochs_run;
        j["filters"] = t.config.filters;
        j["kernel_width"] = t.config.kernel_width;
        j["loss"] = std::string(to_string(t.config.loss));
        j["learning_rate"] = t.config.learning_rate;
        j["val_loss"] = std::isfinite(t.val_loss) ? nlohmann::ordered_json(t.val_loss) : nlohmann::ordered_json(nullptr);
        j["precision"] = t.precision;
        j["threshold"] = t.threshold;
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace falldet
