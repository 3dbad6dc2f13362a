#include "falldet/deploy.hpp"

#include <cmath>

#include "json.hpp"

#include "falldet/error.hpp"

namespace falldet {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Noise: return "noise";
        case Verdict::EventNonFall: return "event-nonfall";
        case Verdict::HumanFall: return "human-fall";
    }
    return "noise";
}

Verdict parse_verdict(std::string_view text) {
    if (text == "noise") return Verdict::Noise;
    if (text == "event-nonfall") return Verdict::EventNonFall;
    if (text == "human-fall") return Verdict::HumanFall;
    throw InvalidArgument("unknown verdict '" + std::string(text) + "'");
}

CascadeDetector::CascadeDetector(LogRegModel logreg, CnnModel cnn, DetectorConfig config, double sample_rate)
    : logreg_(std::move(logreg)),
      cnn_(std::move(cnn)),
      config_(config),
      sample_rate_(sample_rate),
      window_len_(seconds_to_samples(config.window.window_seconds, sample_rate)),
      step_len_(seconds_to_samples(config.window.step_seconds, sample_rate)),
      tau1_(config.tau1),
      tau2_(config.tau2.value_or(cnn_.threshold)) {
    logreg_.validate();
    cnn_.validate();
    config_.stft.validate();
    if (!(tau1_ > 0.0 && tau1_ < 1.0)) throw InvalidArgument("stage-1 threshold must lie in (0, 1)");
    if (!(tau2_ > 0.0 && tau2_ < 1.0)) throw InvalidArgument("stage-2 threshold must lie in (0, 1)");
    if (logreg_.feature_count() != FeatureVector::kSize)
        throw InvalidArgument("logistic model expects " + std::to_string(logreg_.feature_count()) +
                              " features, windows provide 5");
    const std::size_t frames = config_.stft.frames(window_len_);
    if (frames != cnn_.shape.in_h || config_.stft.bins() != cnn_.shape.in_w)
        throw InvalidArgument("CNN input (" + std::to_string(cnn_.shape.in_h) + ", " +
                              std::to_string(cnn_.shape.in_w) + ") does not match the spectrogram (" +
                              std::to_string(frames) + ", " + std::to_string(config_.stft.bins()) + ")");
}

DetectionEvent CascadeDetector::classify(std::span<const double> window, std::size_t index, double t_start) {
    if (window.size() != window_len_) throw InvalidArgument("window length does not match the detector");
    DetectionEvent e;
    e.window_index = index;
    e.t_start = t_start;
    e.stage1_score = logreg_predict(logreg_, extract_features(window));
    if (e.stage1_score < tau1_) return e;

    ++stage2_calls_;
    e.stage2_score = cnn_forward(cnn_, spectrogram(window, config_.stft, sample_rate_).power);
    e.verdict = *e.stage2_score >= tau2_ ? Verdict::HumanFall : Verdict::EventNonFall;
    return e;
}

StreamingDetector::StreamingDetector(CascadeDetector detector) : detector_(std::move(detector)) {}

std::vector<DetectionEvent> StreamingDetector::push(std::span<const double> samples) {
    buffer_.insert(buffer_.end(), samples.begin(), samples.end());
    std::vector<DetectionEvent> out;
    const std::size_t w = detector_.window_len();
    const std::size_t s = detector_.step_len();
    while (true) {
        const std::size_t start = next_index_ * s;
        if (start < buffer_start_) throw std::logic_error("streaming detector lost buffered samples");
        const std::size_t offset = start - buffer_start_;
        if (offset + w > buffer_.size()) break;
        const double t = static_cast<double>(start) / detector_.sample_rate();
        out.push_back(detector_.classify(std::span<const double>(buffer_).subspan(offset, w), next_index_, t));
        ++next_index_;
    }
    // keep everything from the next window start onwards
    const std::size_t keep_from = next_index_ * s;
    if (keep_from > buffer_start_) {
        const std::size_t drop = std::min(keep_from - buffer_start_, buffer_.size());
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(drop));
        buffer_start_ += drop;
    }
    return out;
}

std::vector<DetectionEvent> detect_stream(const Recording& recording, const LogRegModel& logreg,
                                          const CnnModel& cnn, const DetectorConfig& config,
                                          std::size_t* stage2_invocations) {
    recording.validate();
    StreamingDetector stream(CascadeDetector(logreg, cnn, config, recording.sample_rate));
    const std::vector<double> series = select_axis(recording, config.window.axis);
    if (series.size() < stream.detector().window_len()) throw EmptyInputError("recording is shorter than one window");
    std::vector<DetectionEvent> events;
    constexpr std::size_t kChunk = 1 << 16;
    for (std::size_t pos = 0; pos < series.size(); pos += kChunk) {
        const std::size_t n = std::min(kChunk, series.size() - pos);
        auto part = stream.push(std::span<const double>(series).subspan(pos, n));
        events.insert(events.end(), part.begin(), part.end());
    }
    if (stage2_invocations) *stage2_invocations = stream.detector().stage2_invocations();
    return events;
}

std::string event_log_line(const DetectionEvent& e) {
    nlohmann::ordered_json j;
    j["window_index"] = e.window_index;
    j["t_start"] = e.t_start;
    j["stage1_score"] = e.stage1_score;
    j["stage2_score"] = e.stage2_score ? nlohmann::ordered_json(*e.stage2_score) : nlohmann::ordered_json(nullptr);
    j["verdict"] = std::string(to_string(e.verdict));
    return j.dump();
}

std::string write_event_log(std::span<const DetectionEvent> events) {
    std::string out;
    for (const auto& e : events) {
        out += event_log_line(e);
        out += '\n';
    }
    return out;
}

std::vector<DetectionEvent> read_event_log(std::string_view text) {
    std::vector<DetectionEvent> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const std::string where = " on event log line " + std::to_string(line_no);
        try {
            const auto j = nlohmann::json::parse(line);
            for (const char* key : {"window_index", "t_start", "stage1_score", "stage2_score", "verdict"})
                if (!j.contains(key))
                    throw ParseError(ParseError::Kind::Missing, line_no, std::string("missing ") + key + where);
            DetectionEvent e;
            e.window_index = j["window_index"].get<std::size_t>();
            e.t_start = j["t_start"].get<double>();
            e.stage1_score = j["stage1_score"].get<double>();
            if (!j["stage2_score"].is_null()) e.stage2_score = j["stage2_score"].get<double>();
            e.verdict = parse_verdict(j["verdict"].get<std::string>());
            out.push_back(e);
        } catch (const nlohmann::json::exception& ex) {
            throw ParseError(ParseError::Kind::BadValue, line_no, std::string(ex.what()) + where);
        } catch (const InvalidArgument& ex) {
            throw ParseError(ParseError::Kind::BadValue, line_no, std::string(ex.what()) + where);
        }
    }
    return out;
}

}  // namespace falldet
