#include "falldet/types.hpp"

#include <algorithm>

#include "falldet/error.hpp"

namespace falldet {

std::string_view to_string(Axis axis) {
    switch (axis) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
        case Axis::Magnitude: return "magnitude";
    }
    return "z";
}

std::string_view to_string(ClassLabel label) {
    switch (label) {
        case ClassLabel::Noise: return "noise";
        case ClassLabel::ObjectFall: return "object-fall";
        case ClassLabel::HumanFall: return "human-fall";
    }
    return "noise";
}

Axis parse_axis(std::string_view text) {
    if (text == "x") return Axis::X;
    if (text == "y") return Axis::Y;
    if (text == "z") return Axis::Z;
    if (text == "magnitude" || text == "euclidean") return Axis::Magnitude;
    throw InvalidArgument("unknown axis '" + std::string(text) + "'");
}

ClassLabel parse_label(std::string_view text) {
    if (text == "noise") return ClassLabel::Noise;
    if (text == "object-fall") return ClassLabel::ObjectFall;
    if (text == "human-fall") return ClassLabel::HumanFall;
    throw InvalidArgument("unknown class label '" + std::string(text) + "'");
}

void Recording::validate() const {
    if (!(sample_rate > 0.0)) throw InvalidArgument("recording sample rate must be positive");
    if (channels[1].size() != channels[0].size() || channels[2].size() != channels[0].size())
        throw InvalidArgument("recording channels differ in length");
    if (!timestamps_us.empty() && timestamps_us.size() != channels[0].size())
        throw InvalidArgument("recording timestamps differ in length from channels");
}

void LabeledDataset::push_back(Window w, ClassLabel label, WindowMeta m) {
    windows.push_back(std::move(w));
    labels.push_back(label);
    meta.push_back(m);
}

std::size_t LabeledDataset::count(ClassLabel label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& indices) const {
    LabeledDataset out;
    out.windows.reserve(indices.size());
    out.labels.reserve(indices.size());
    out.meta.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= size()) throw InvalidArgument("dataset subset index out of range");
        out.push_back(windows[i], labels[i], meta[i]);
    }
    return out;
}

void LabeledDataset::validate() const {
    if (labels.size() != windows.size() || meta.size() != windows.size())
        throw InvalidArgument("dataset sequences differ in length");
}

LabeledDataset concat(const LabeledDataset& base, const LabeledDataset& other) {
    LabeledDataset out = base;
    append(out, other);
    return out;
}

void append(LabeledDataset& dst, const LabeledDataset& src) {
    dst.windows.insert(dst.windows.end(), src.windows.begin(), src.windows.end());
    dst.labels.insert(dst.labels.end(), src.labels.begin(), src.labels.end());
    dst.meta.insert(dst.meta.end(), src.meta.begin(), src.meta.end());
}

std::vector<int> human_fall_targets(const LabeledDataset& data) {
    std::vector<int> y;
    y.reserve(data.size());
    for (ClassLabel l : data.labels) y.push_back(l == ClassLabel::HumanFall ? 1 : 0);
    return y;
}

std::vector<int> event_targets(const LabeledDataset& data) {
    std::vector<int> y;
    y.reserve(data.size());
    for (ClassLabel l : data.labels) y.push_back(l == ClassLabel::Noise ? 0 : 1);
    return y;
}

}  // namespace falldet
