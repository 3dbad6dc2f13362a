#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falldet/cnn.hpp"
#include "falldet/dsp.hpp"
#include "falldet/logreg.hpp"
#include "falldet/signal.hpp"

namespace falldet {

enum class Verdict { Noise, EventNonFall, HumanFall };

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct DetectionEvent {
    std::size_t window_index = 0;
    double t_start = 0.0;
    double stage1_score = 0.0;
    /// Present iff stage1_score >= tau1.
    std::optional<double> stage2_score;
    Verdict verdict = Verdict::Noise;

    bool operator==(const DetectionEvent&) const = default;
};

struct DetectorConfig {
    WindowParams window;
    StftConfig stft;
    double tau1 = 0.5;
    /// Defaults to the threshold stored with the CNN.
    std::optional<double> tau2;
};

/// Two-stage classifier for single windows. The spectrogram and CNN run only
/// for windows the logistic prefilter flags.
class CascadeDetector {
public:
    /// Throws InvalidArgument when thresholds leave (0, 1) or the models do not
    /// fit the window/STFT geometry.
    CascadeDetector(LogRegModel logreg, CnnModel cnn, DetectorConfig config,
                    double sample_rate = kDefaultSampleRate);

    DetectionEvent classify(std::span<const double> window, std::size_t index, double t_start);

    std::size_t window_len() const { return window_len_; }
    std::size_t step_len() const { return step_len_; }
    double sample_rate() const { return sample_rate_; }
    double tau1() const { return tau1_; }
    double tau2() const { return tau2_; }
    std::size_t stage2_invocations() const { return stage2_calls_; }

private:
    LogRegModel logreg_;
    CnnModel cnn_;
    DetectorConfig config_;
    double sample_rate_;
    std::size_t window_len_;
    std::size_t step_len_;
    double tau1_;
    double tau2_;
    std::size_t stage2_calls_ = 0;
};

/// Feeds samples of the selected axis in arbitrary chunks and emits one event
/// per completed window, in chronological order.
class StreamingDetector {
public:
    explicit StreamingDetector(CascadeDetector detector);

    std::vector<DetectionEvent> push(std::span<const double> samples);

    const CascadeDetector& detector() const { return detector_; }
    std::size_t windows_emitted() const { return next_index_; }

private:
    CascadeDetector detector_;
    std::vector<double> buffer_;
    std::size_t buffer_start_ = 0;  // absolute sample index of buffer_[0]
    std::size_t next_index_ = 0;
};

/// One event per window of make_windows(recording, config.window).
std::vector<DetectionEvent> detect_stream(const Recording& recording, const LogRegModel& logreg,
                                          const CnnModel& cnn, const DetectorConfig& config,
                                          std::size_t* stage2_invocations = nullptr);

/// NDJSON: one object per event with window_index, t_start, stage1_score,
/// stage2_score (null when stage 2 did not run) and verdict.
std::string write_event_log(std::span<const DetectionEvent> events);
std::string event_log_line(const DetectionEvent& event);
/// Throws ParseError naming the 1-based line on malformed input.
std::vector<DetectionEvent> read_event_log(std::string_view text);

}  // namespace falldet
