#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "falldet/signal.hpp"
#include "falldet/types.hpp"

namespace falldet {

// Binary sensor log, little-endian:
//   header  "FDS1" | u16 version (1) | u32 sample_rate | u8 axis_count (3) | f32 scale
//   records u64 timestamp_us | i16 ax | i16 ay | i16 az   (repeated)
struct BinaryLogHeader {
    static constexpr std::string_view kMagic = "FDS1";
    static constexpr std::uint16_t kVersion = 1;
    static constexpr std::size_t kSize = 15;
    static constexpr std::size_t kRecordSize = 14;

    std::uint16_t version = kVersion;
    std::uint32_t sample_rate = 1600;
    std::uint8_t axis_count = 3;
    float scale = 0.001f;
};

struct BinaryLogRecord {
    std::uint64_t timestamp_us = 0;
    std::int16_t ax = 0, ay = 0, az = 0;
};

BinaryLogHeader parse_binary_header(std::span<const std::uint8_t> bytes);

/// Decodes a full binary log. Channel values are raw * scale in g; t0 is the
/// first record's timestamp and per-record timestamps are kept.
Recording parse_binary(std::span<const std::uint8_t> bytes);

/// Encodes a recording with the given scale. Uses the recording's own
/// timestamps when present, t0 + i/fs otherwise. Values that do not fit a
/// signed 16-bit count at this scale raise DataError.
std::vector<std::uint8_t> write_binary(const Recording& rec, float scale);

/// Incremental reader over a binary log stream, for recordings too long to
/// hold in memory.
class BinaryLogReader {
public:
    explicit BinaryLogReader(std::istream& in);

    const BinaryLogHeader& header() const { return header_; }
    /// Appends up to `max_records` decoded samples of `axis` to `out`; returns
    /// the number appended (0 at end of stream).
    std::size_t read(std::size_t max_records, Axis axis, std::vector<double>& out);

private:
    std::istream& in_;
    BinaryLogHeader header_;
    std::size_t offset_ = BinaryLogHeader::kSize;
    std::optional<std::uint64_t> last_ts_;
};

/// CSV with header `t,ax,ay,az`; t in seconds, accelerations in g. The rate is
/// round(1 / median dt) and every dt must be within 1% of the median.
Recording parse_csv(std::string_view text);
std::string write_csv(const Recording& rec);

struct ManifestEntry {
    enum class Format { Binary, Csv };

    std::string path;
    Format format = Format::Binary;
    ClassLabel label = ClassLabel::Noise;
    std::optional<int> event_id;
    std::optional<int> setting_id;
    std::optional<double> event_time_s;

    bool operator==(const ManifestEntry&) const = default;
};

/// One JSON object per line; blank lines are skipped.
std::vector<ManifestEntry> parse_manifest(std::string_view text);
std::string write_manifest(const std::vector<ManifestEntry>& entries);

Recording read_recording(const std::filesystem::path& path, ManifestEntry::Format format);
/// 2^-14 g per count: +-2 g full scale.
inline constexpr float kDefaultBinaryScale = 6.103515625e-05f;

void write_recording(const std::filesystem::path& path, const Recording& rec,
                     ManifestEntry::Format format, float scale = kDefaultBinaryScale);

/// Labels the windows of one recording: noise recordings give all-noise
/// windows; event recordings give the first window containing event_time_s
/// the entry's label and the remaining windows that do not contain the event
/// noise. Event entries without an event time are replay material and yield
/// no windows.
LabeledDataset label_recording(const Recording& rec, const ManifestEntry& entry,
                               const WindowParams& params);

/// Relative manifest paths are resolved against `base_dir`.
LabeledDataset load_dataset(const std::vector<ManifestEntry>& manifest, const WindowParams& params,
                            const std::filesystem::path& base_dir = {});

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_text(const std::filesystem::path& path, std::string_view text);

}  // namespace falldet
