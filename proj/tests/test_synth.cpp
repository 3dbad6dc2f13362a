#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "falldet/signal.hpp"
#include "falldet/synth.hpp"

using namespace falldet;

namespace {

double sample_std(const std::vector<double>& x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double abs_max(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST_CASE("gen_noise") {
    SUBCASE("zero sigma gives zeros") {
        const Recording r = gen_noise(10.0, 0.0, 1);
        CHECK(r.length() == 16000);
        for (const auto& c : r.channels) CHECK(abs_max(c) == 0.0);
    }
    SUBCASE("deterministic per seed") {
        const Recording a = gen_noise(2.0, 0.01, 42);
        const Recording b = gen_noise(2.0, 0.01, 42);
        const Recording c = gen_noise(2.0, 0.01, 43);
        CHECK(a.channels == b.channels);
        CHECK(a.channels != c.channels);
    }
    SUBCASE("standard deviation within 5%") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Recording r = gen_noise(10.0, 0.01, seed);
            for (const auto& c : r.channels) CHECK(std::abs(sample_std(c) - 0.01) <= 0.0005);
        }
    }
    SUBCASE("negative sigma rejected") { CHECK_THROWS(gen_noise(1.0, -0.1, 1)); }
}

TEST_CASE("gen_event") {
    SUBCASE("single impact peaks at the requested amplitude") {
        EventSpec s{EventKind::ObjectImpact, 1.01, 0.02, 100.0, 1, 0.0};
        const auto w = gen_event(s, 5);
        CHECK(abs_max(w) == doctest::Approx(1.01).epsilon(0.1));
    }
    SUBCASE("zero peak gives a zero waveform") {
        EventSpec s{EventKind::ObjectImpact, 0.0, 0.02, 100.0, 1, 0.0};
        CHECK(abs_max(gen_event(s, 5)) == 0.0);
    }
    SUBCASE("two impacts 0.3 s apart") {
        EventSpec s{EventKind::HumanFall, 0.8, 0.03, 25.0, 2, 0.3};
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto w = gen_event(s, seed);
            const std::size_t split = 240;
            std::vector<double> a(w.begin(), w.begin() + split);
            std::vector<double> b(w.begin() + split, w.end());
            auto arg = [](const std::vector<double>& x) {
                std::size_t k = 0;
                for (std::size_t i = 0; i < x.size(); ++i)
                    if (std::abs(x[i]) > std::abs(x[k])) k = i;
                return k;
            };
            const double gap = static_cast<double>(split + arg(b)) - static_cast<double>(arg(a));
            // one carrier period at 25 Hz is 64 samples
            CHECK(std::abs(gap - 480.0) <= 32.0);
        }
    }
    SUBCASE("invalid specs") {
        CHECK_THROWS(gen_event({EventKind::ObjectImpact, 0.5, 0.0, 100.0, 1, 0.0}, 1));
        CHECK_THROWS(gen_event({EventKind::ObjectImpact, 0.5, 0.02, 800.0, 1, 0.0}, 1));
        CHECK_THROWS(gen_event({EventKind::ObjectImpact, 0.5, 0.02, 100.0, 0, 0.0}, 1));
    }
}

TEST_CASE("gen_dataset") {
    SUBCASE("construction count") {
        const auto s = gen_dataset(100, 10, 5, 9);
        CHECK(s.data.count(ClassLabel::ObjectFall) == 10);
        CHECK(s.data.count(ClassLabel::HumanFall) == 5);
        // 100 noise recordings plus one context window either side of every event
        CHECK(s.data.count(ClassLabel::Noise) == 100 + 2 * 15);
        CHECK(s.manifest.size() == 115);
        CHECK(s.recordings.size() == 115);
        for (const auto& m : s.data.meta) {
            REQUIRE(m.setting_id);
            CHECK(*m.setting_id >= 1);
            CHECK(*m.setting_id <= 8);
        }
        for (std::size_t i = 0; i < s.data.size(); ++i) {
            if (s.data.labels[i] == ClassLabel::HumanFall) CHECK(s.data.meta[i].event_id == 11);
            if (s.data.labels[i] == ClassLabel::ObjectFall) {
                REQUIRE(s.data.meta[i].event_id);
                CHECK(*s.data.meta[i].event_id != 11);
            }
        }
    }
    SUBCASE("empty") { CHECK(gen_dataset(0, 0, 0, 1).data.empty()); }
    SUBCASE("deterministic") {
        const auto a = gen_dataset(5, 3, 2, 77);
        const auto b = gen_dataset(5, 3, 2, 77);
        CHECK(a.data == b.data);
        CHECK(a.manifest == b.manifest);
    }
}

TEST_CASE("human falls separate from noise on the max feature") {
    const auto s = gen_dataset(40, 0, 20, 123);
    double noise_max = 0.0;
    double fall_min = 1e300;
    for (std::size_t i = 0; i < s.data.size(); ++i) {
        const double f = extract_features(s.data.windows[i]).max;
        if (s.data.labels[i] == ClassLabel::Noise) noise_max = std::max(noise_max, f);
        else fall_min = std::min(fall_min, f);
    }
    CHECK(fall_min > noise_max);
}

TEST_CASE("generator output is bounded by peak plus six sigma") {
    SynthConfig cfg;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(seed);
        for (EventKind kind : {EventKind::ObjectImpact, EventKind::HumanFall}) {
            const EventSpec spec = draw_event_spec(kind, cfg, rng);
            Recording rec = gen_noise(1.0, cfg.noise_sigma_g, seed);
            inject_event(rec, gen_event(spec, seed), 100);
            for (const auto& c : rec.channels) CHECK(abs_max(c) <= spec.peak_g + 6.0 * cfg.noise_sigma_g);
        }
    }
}

TEST_CASE("gen_replay places events in distinct windows") {
    const auto r = gen_replay(0.1, 5, 2, 3);
    CHECK(r.recording.length() == 576000);
    REQUIRE(r.events.size() == 7);
    std::vector<std::size_t> idx;
    for (const auto& e : r.events) {
        idx.push_back(e.window_index);
        CHECK(static_cast<std::size_t>(e.time_s / 10.0) == e.window_index);
    }
    std::sort(idx.begin(), idx.end());
    CHECK(std::adjacent_find(idx.begin(), idx.end()) == idx.end());
    CHECK(std::count_if(r.events.begin(), r.events.end(),
                        [](const InjectedEvent& e) { return e.kind == EventKind::HumanFall; }) == 2);
}
