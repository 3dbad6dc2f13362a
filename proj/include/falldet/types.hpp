#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace falldet {

inline constexpr double kDefaultSampleRate = 1600.0;
inline constexpr double kDefaultWindowSeconds = 10.0;

enum class Axis { X, Y, Z, Magnitude };

enum class ClassLabel { Noise = 0, ObjectFall = 1, HumanFall = 2 };

std::string_view to_string(Axis axis);
std::string_view to_string(ClassLabel label);
Axis parse_axis(std::string_view text);
ClassLabel parse_label(std::string_view text);

/// Three-axis acceleration recording in g.
struct Recording {
    double sample_rate = kDefaultSampleRate;
    std::int64_t t0_us = 0;
    std::array<std::vector<double>, 3> channels;
    /// Per-sample timestamps as read from a binary log; empty when the
    /// recording is uniformly sampled from t0_us.
    std::vector<std::int64_t> timestamps_us;

    std::size_t length() const { return channels[0].size(); }
    double duration_seconds() const { return static_cast<double>(length()) / sample_rate; }

    /// Throws InvalidArgument when channel lengths differ or the rate is not positive.
    void validate() const;
};

/// Fixed-length single-channel segment, the unit of classification.
struct Window {
    std::vector<double> samples;
    double t_start = 0.0;
    Axis source_axis = Axis::Z;

    bool operator==(const Window&) const = default;
};

struct WindowMeta {
    std::optional<int> event_id;    // 1..15
    std::optional<int> setting_id;  // 1..8
    /// Index (within the dataset the augmentation was applied to) of the window
    /// this one was derived from; empty for original windows.
    std::optional<std::size_t> source_index;

    bool operator==(const WindowMeta&) const = default;
};

struct LabeledDataset {
    std::vector<Window> windows;
    std::vector<ClassLabel> labels;
    std::vector<WindowMeta> meta;

    std::size_t size() const { return windows.size(); }
    bool empty() const { return windows.empty(); }
    void push_back(Window w, ClassLabel label, WindowMeta m = {});
    std::size_t count(ClassLabel label) const;
    /// Subset in the order given by `indices`.
    LabeledDataset subset(const std::vector<std::size_t>& indices) const;
    /// Throws InvalidArgument when the parallel sequences disagree in length.
    void validate() const;

    bool operator==(const LabeledDataset&) const = default;
};

/// Appends `other` after `base`.
LabeledDataset concat(const LabeledDataset& base, const LabeledDataset& other);
void append(LabeledDataset& dst, const LabeledDataset& src);

/// Binary stage-2 target: 1 for human falls, 0 otherwise.
std::vector<int> human_fall_targets(const LabeledDataset& data);
/// Binary stage-1 target: 1 for any event, 0 for noise.
std::vector<int> event_targets(const LabeledDataset& data);

}  // namespace falldet
