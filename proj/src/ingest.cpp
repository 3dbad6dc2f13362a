#include "falldet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "falldet/byteio.hpp"
#include "falldet/error.hpp"

namespace falldet {
namespace {

using byteio::Reader;

constexpr double kCsvJitterTolerance = 0.01;

BinaryLogHeader read_header(Reader& r) {
    if (r.remaining() < BinaryLogHeader::kMagic.size() ||
        r.get_string(BinaryLogHeader::kMagic.size()) != BinaryLogHeader::kMagic)
        throw ParseError(ParseError::Kind::BadMagic, 0, "bad magic at byte offset 0 (expected FDS1)");
    BinaryLogHeader h;
    h.version = r.get<std::uint16_t>();
    if (h.version != BinaryLogHeader::kVersion)
        throw ParseError(ParseError::Kind::BadHeader, 4,
                         "unsupported version " + std::to_string(h.version) + " at byte offset 4");
    h.sample_rate = r.get<std::uint32_t>();
    if (h.sample_rate == 0)
        throw ParseError(ParseError::Kind::BadHeader, 6, "zero sample rate at byte offset 6");
    h.axis_count = r.get<std::uint8_t>();
    if (h.axis_count != 3)
        throw ParseError(ParseError::Kind::BadHeader, 10, "axis count must be 3 at byte offset 10");
    h.scale = r.get<float>();
    if (!(h.scale > 0.0f) || !std::isfinite(h.scale))
        throw ParseError(ParseError::Kind::BadHeader, 11, "scale must be positive at byte offset 11");
    return h;
}

void check_monotonic(std::optional<std::uint64_t>& last, std::uint64_t ts, std::size_t offset) {
    if (last && ts <= *last)
        throw ParseError(ParseError::Kind::NonMonotonic, offset,
                         "non-monotonic timestamp at byte offset " + std::to_string(offset));
    last = ts;
}

std::int16_t to_raw(double value, float scale) {
    const double raw = std::round(value / static_cast<double>(scale));
    if (!(raw >= std::numeric_limits<std::int16_t>::min() &&
          raw <= std::numeric_limits<std::int16_t>::max()))
        throw DataError("sample value " + std::to_string(value) + " g does not fit at scale " +
                        std::to_string(scale));
    return static_cast<std::int16_t>(raw);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_cell(std::string_view cell, std::size_t line) {
    cell = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty() || !std::isfinite(v))
        throw ParseError(ParseError::Kind::BadValue, line,
                         "non-numeric value '" + std::string(cell) + "' on line " + std::to_string(line));
    return v;
}

}  // namespace

BinaryLogHeader parse_binary_header(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    return read_header(r);
}

Recording parse_binary(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const BinaryLogHeader h = read_header(r);
    if (r.remaining() % BinaryLogHeader::kRecordSize != 0) {
        const std::size_t off = r.offset() + (r.remaining() / BinaryLogHeader::kRecordSize) *
                                                 BinaryLogHeader::kRecordSize;
        throw ParseError(ParseError::Kind::Truncated, off,
                         "truncated record at byte offset " + std::to_string(off));
    }
    const std::size_t n = r.remaining() / BinaryLogHeader::kRecordSize;

    Recording rec;
    rec.sample_rate = h.sample_rate;
    for (auto& c : rec.channels) c.reserve(n);
    rec.timestamps_us.reserve(n);
    const double scale = h.scale;
    std::optional<std::uint64_t> last;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = r.offset();
        const auto ts = r.get<std::uint64_t>();
        check_monotonic(last, ts, off);
        rec.timestamps_us.push_back(static_cast<std::int64_t>(ts));
        rec.channels[0].push_back(r.get<std::int16_t>() * scale);
        rec.channels[1].push_back(r.get<std::int16_t>() * scale);
        rec.channels[2].push_back(r.get<std::int16_t>() * scale);
    }
    rec.t0_us = rec.timestamps_us.empty() ? 0 : rec.timestamps_us.front();
    return rec;
}

std::vector<std::uint8_t> write_binary(const Recording& rec, float scale) {
    rec.validate();
    if (!(scale > 0.0f)) throw InvalidArgument("binary log scale must be positive");
    const double rate = std::round(rec.sample_rate);
    if (rate < 1.0 || rate > std::numeric_limits<std::uint32_t>::max())
        throw InvalidArgument("sample rate does not fit the binary header");

    std::vector<std::uint8_t> out;
    out.reserve(BinaryLogHeader::kSize + rec.length() * BinaryLogHeader::kRecordSize);
    byteio::put_bytes(out, BinaryLogHeader::kMagic);
    byteio::put(out, BinaryLogHeader::kVersion);
    byteio::put(out, static_cast<std::uint32_t>(rate));
    byteio::put(out, std::uint8_t{3});
    byteio::put(out, scale);
    for (std::size_t i = 0; i < rec.length(); ++i) {
        const std::int64_t ts =
            rec.timestamps_us.empty()
                ? rec.t0_us + std::llround(static_cast<double>(i) * 1e6 / rec.sample_rate)
                : rec.timestamps_us[i];
        byteio::put(out, static_cast<std::uint64_t>(ts));
        for (const auto& c : rec.channels) byteio::put(out, to_raw(c[i], scale));
    }
    return out;
}

BinaryLogReader::BinaryLogReader(std::istream& in) : in_(in) {
    std::vector<std::uint8_t> buf(BinaryLogHeader::kSize);
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    buf.resize(static_cast<std::size_t>(in_.gcount()));
    header_ = parse_binary_header(buf);
}

std::size_t BinaryLogReader::read(std::size_t max_records, Axis axis, std::vector<double>& out) {
    std::vector<std::uint8_t> buf(max_records * BinaryLogHeader::kRecordSize);
    in_.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    buf.resize(static_cast<std::size_t>(in_.gcount()));
    if (buf.size() % BinaryLogHeader::kRecordSize != 0) {
        const std::size_t off =
            offset_ + (buf.size() / BinaryLogHeader::kRecordSize) * BinaryLogHeader::kRecordSize;
        throw ParseError(ParseError::Kind::Truncated, off,
                         "truncated record at byte offset " + std::to_string(off));
    }
    Reader r(buf);
    const double scale = header_.scale;
    std::size_t n = 0;
    while (!r.done()) {
        const auto ts = r.get<std::uint64_t>();
        check_monotonic(last_ts_, ts, offset_ + r.offset() - 8);
        const double x = r.get<std::int16_t>() * scale;
        const double y = r.get<std::int16_t>() * scale;
        const double z = r.get<std::int16_t>() * scale;
        switch (axis) {
            case Axis::X: out.push_back(x); break;
            case Axis::Y: out.push_back(y); break;
            case Axis::Z: out.push_back(z); break;
            case Axis::Magnitude: out.push_back(std::sqrt(x * x + y * y + z * z)); break;
        }
        ++n;
    }
    offset_ += buf.size();
    return n;
}

Recording parse_csv(std::string_view text) {
    std::vector<double> t;
    Recording rec;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            std::string compact;
            for (char c : line)
                if (c != ' ') compact.push_back(c);
            if (compact != "t,ax,ay,az")
                throw ParseError(ParseError::Kind::BadHeader, line_no,
                                 "expected header 't,ax,ay,az' on line " + std::to_string(line_no));
            header_seen = true;
            continue;
        }
        std::array<double, 4> v{};
        std::size_t col = 0;
        while (true) {
            const std::size_t comma = line.find(',');
            if (col >= 4)
                throw ParseError(ParseError::Kind::BadValue, line_no,
                                 "too many columns on line " + std::to_string(line_no));
            v[col++] = parse_cell(line.substr(0, comma), line_no);
            if (comma == std::string_view::npos) break;
            line = line.substr(comma + 1);
        }
        if (col != 4)
            throw ParseError(ParseError::Kind::Missing, line_no,
                             "expected 4 columns on line " + std::to_string(line_no));
        t.push_back(v[0]);
        for (int c = 0; c < 3; ++c) rec.channels[c].push_back(v[c + 1]);
    }
    if (!header_seen) throw ParseError(ParseError::Kind::BadHeader, 1, "missing CSV header");
    if (t.size() < 2) throw EmptyInputError("CSV recording needs at least two rows to infer a rate");

    std::vector<double> dt(t.size() - 1);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        dt[i] = t[i + 1] - t[i];
        // header is line 1, sample i sits on line i + 2 when there are no blank lines
        if (!(dt[i] > 0.0))
            throw ParseError(ParseError::Kind::NonMonotonic, i + 3,
                             "non-increasing time near data row " + std::to_string(i + 2));
    }
    std::vector<double> sorted = dt;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                     sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (std::size_t i = 0; i < dt.size(); ++i) {
        if (std::abs(dt[i] - median) / median >= kCsvJitterTolerance)
            throw ParseError(ParseError::Kind::Jitter, i + 3,
                             "sampling jitter above 1% near data row " + std::to_string(i + 2));
    }
    rec.sample_rate = std::round(1.0 / median);
    rec.t0_us = std::llround(t.front() * 1e6);
    return rec;
}

std::string write_csv(const Recording& rec) {
    rec.validate();
    std::ostringstream os;
    os.precision(17);
    os << "t,ax,ay,az\n";
    for (std::size_t i = 0; i < rec.length(); ++i) {
        const double t = rec.timestamps_us.empty()
                             ? static_cast<double>(rec.t0_us) * 1e-6 + static_cast<double>(i) / rec.sample_rate
                             : static_cast<double>(rec.timestamps_us[i]) * 1e-6;
        os << t << ',' << rec.channels[0][i] << ',' << rec.channels[1][i] << ',' << rec.channels[2][i]
           << '\n';
    }
    return os.str();
}

std::vector<ManifestEntry> parse_manifest(std::string_view text) {
    std::vector<ManifestEntry> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const std::size_t nl = text.find('\n');
        const std::string_view line = trim(text.substr(0, nl));
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (line.empty()) continue;
        const auto where = " on manifest line " + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(ParseError::Kind::BadValue, line_no, "invalid JSON" + where);
        }
        try {
            ManifestEntry e;
            e.path = j.at("path").get<std::string>();
            const std::string fmt = j.value("format", std::string("binary"));
            if (fmt == "binary") e.format = ManifestEntry::Format::Binary;
            else if (fmt == "csv") e.format = ManifestEntry::Format::Csv;
            else throw ParseError(ParseError::Kind::BadValue, line_no, "unknown format '" + fmt + "'" + where);
            e.label = parse_label(j.at("label").get<std::string>());
            if (j.contains("event_id") && !j["event_id"].is_null()) {
                e.event_id = j["event_id"].get<int>();
                if (*e.event_id < 1 || *e.event_id > 15)
                    throw ParseError(ParseError::Kind::BadValue, line_no, "event_id outside 1..15" + where);
            }
            if (j.contains("setting_id") && !j["setting_id"].is_null()) {
                e.setting_id = j["setting_id"].get<int>();
                if (*e.setting_id < 1 || *e.setting_id > 8)
                    throw ParseError(ParseError::Kind::BadValue, line_no, "setting_id outside 1..8" + where);
            }
            if (j.contains("event_time_s") && !j["event_time_s"].is_null())
                e.event_time_s = j["event_time_s"].get<double>();
            out.push_back(std::move(e));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(ParseError::Kind::Missing, line_no, std::string(e.what()) + where);
        } catch (const InvalidArgument& e) {
            throw ParseError(ParseError::Kind::BadValue, line_no, std::string(e.what()) + where);
        }
    }
    return out;
}

std::string write_manifest(const std::vector<ManifestEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        nlohmann::ordered_json j;
        j["path"] = e.path;
        j["format"] = e.format == ManifestEntry::Format::Binary ? "binary" : "csv";
        j["label"] = std::string(to_string(e.label));
        j["event_id"] = e.event_id ? nlohmann::ordered_json(*e.event_id) : nlohmann::ordered_json(nullptr);
        j["setting_id"] = e.setting_id ? nlohmann::ordered_json(*e.setting_id) : nlohmann::ordered_json(nullptr);
        j["event_time_s"] =
            e.event_time_s ? nlohmann::ordered_json(*e.event_time_s) : nlohmann::ordered_json(nullptr);
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

void write_file_text(const std::filesystem::path& path, std::string_view text) {
    write_file_bytes(path, {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

Recording read_recording(const std::filesystem::path& path, ManifestEntry::Format format) {
    if (format == ManifestEntry::Format::Binary) return parse_binary(read_file_bytes(path));
    return parse_csv(read_file_text(path));
}

void write_recording(const std::filesystem::path& path, const Recording& rec,
                     ManifestEntry::Format format, float scale) {
    if (format == ManifestEntry::Format::Binary) write_file_bytes(path, write_binary(rec, scale));
    else write_file_text(path, write_csv(rec));
}

LabeledDataset label_recording(const Recording& rec, const ManifestEntry& entry,
                               const WindowParams& params) {
    LabeledDataset out;
    const WindowMeta meta{entry.event_id, entry.setting_id, std::nullopt};
    if (entry.label == ClassLabel::Noise) {
        for (auto& w : make_windows(rec, params)) out.push_back(std::move(w), ClassLabel::Noise, meta);
        return out;
    }
    if (!entry.event_time_s) return out;

    const double t = *entry.event_time_s;
    if (!(t >= 0.0) || t >= rec.duration_seconds())
        throw DataError("event time " + std::to_string(t) + " s lies outside recording '" + entry.path + "'");
    std::vector<Window> windows = make_windows(rec, params);
    const double len = static_cast<double>(windows.front().samples.size()) / rec.sample_rate;
    std::optional<std::size_t> positive;
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const bool contains = t >= windows[i].t_start && t < windows[i].t_start + len;
        if (contains && !positive) positive = i;
    }
    if (!positive)
        throw DataError("event time " + std::to_string(t) + " s falls in the discarded tail of '" +
                        entry.path + "'");
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const bool contains = t >= windows[i].t_start && t < windows[i].t_start + len;
        if (i == *positive) out.push_back(std::move(windows[i]), entry.label, meta);
        else if (!contains) out.push_back(std::move(windows[i]), ClassLabel::Noise, meta);
    }
    return out;
}

LabeledDataset load_dataset(const std::vector<ManifestEntry>& manifest, const WindowParams& params,
                            const std::filesystem::path& base_dir) {
    LabeledDataset out;
    for (const auto& entry : manifest) {
        std::filesystem::path p = entry.path;
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        if (!std::filesystem::exists(p)) throw DataError("missing recording '" + p.string() + "'");
        const Recording rec = read_recording(p, entry.format);
        LabeledDataset part = label_recording(rec, entry, params);
        append(out, part);
    }
    return out;
}

}  // namespace falldet
