#include "falldet/dataset_io.hpp"

#include <limits>

#include "falldet/byteio.hpp"
#include "falldet/error.hpp"

namespace falldet {
namespace {

constexpr std::string_view kMagic = "FDD1";
constexpr std::uint16_t kVersion = 1;
constexpr std::uint64_t kNoSource = std::numeric_limits<std::uint64_t>::max();

}  // namespace

std::vector<std::uint8_t> write_dataset(const LabeledDataset& data) {
    data.validate();
    std::vector<std::uint8_t> out;
    byteio::put_bytes(out, kMagic);
    byteio::put(out, kVersion);
    byteio::put(out, static_cast<std::uint64_t>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Window& w = data.windows[i];
        const WindowMeta& m = data.meta[i];
        byteio::put(out, static_cast<std::uint8_t>(data.labels[i]));
        byteio::put(out, static_cast<std::uint8_t>(w.source_axis));
        byteio::put(out, w.t_start);
        byteio::put(out, static_cast<std::int32_t>(m.event_id.value_or(-1)));
        byteio::put(out, static_cast<std::int32_t>(m.setting_id.value_or(-1)));
        byteio::put(out, m.source_index ? static_cast<std::uint64_t>(*m.source_index) : kNoSource);
        byteio::put(out, static_cast<std::uint64_t>(w.samples.size()));
        for (double v : w.samples) byteio::put(out, v);
    }
    return out;
}

LabeledDataset parse_dataset(std::span<const std::uint8_t> bytes) {
    byteio::Reader r(bytes);
    if (r.remaining() < kMagic.size() || r.get_string(kMagic.size()) != kMagic)
        throw ParseError(ParseError::Kind::BadMagic, 0, "bad dataset magic at byte offset 0 (expected FDD1)");
    if (r.get<std::uint16_t>() != kVersion)
        throw ParseError(ParseError::Kind::BadHeader, 4, "unsupported dataset version at byte offset 4");
    const auto count = r.get<std::uint64_t>();
    LabeledDataset data;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::size_t off = r.offset();
        const auto label = r.get<std::uint8_t>();
        const auto axis = r.get<std::uint8_t>();
        if (label > 2 || axis > 3)
            throw ParseError(ParseError::Kind::BadValue, off, "bad label/axis at byte offset " + std::to_string(off));
        Window w;
        w.source_axis = static_cast<Axis>(axis);
        w.t_start = r.get<double>();
        WindowMeta m;
        if (const auto e = r.get<std::int32_t>(); e >= 0) m.event_id = e;
        if (const auto s = r.get<std::int32_t>(); s >= 0) m.setting_id = s;
        if (const auto src = r.get<std::uint64_t>(); src != kNoSource) m.source_index = static_cast<std::size_t>(src);
        const auto n = r.get<std::uint64_t>();
        if (n > r.remaining() / sizeof(double)) r.require(r.remaining() + 1);
        w.samples.resize(n);
        for (auto& v : w.samples) v = r.get<double>();
        data.push_back(std::move(w), static_cast<ClassLabel>(label), m);
    }
    if (!r.done())
        throw ParseError(ParseError::Kind::BadValue, r.offset(),
                         "trailing bytes at byte offset " + std::to_string(r.offset()));
    return data;
}

}  // namespace falldet
