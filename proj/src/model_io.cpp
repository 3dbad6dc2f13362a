#include "falldet/model_io.hpp"

#include <limits>
#include <string>

#include "falldet/byteio.hpp"
#include "falldet/error.hpp"

namespace falldet {
namespace {

constexpr std::string_view kMagic = "FDM1";
constexpr std::uint16_t kVersion = 1;

void put_header(std::vector<std::uint8_t>& out, ModelKind kind) {
    byteio::put_bytes(out, kMagic);
    byteio::put(out, kVersion);
    byteio::put(out, static_cast<std::uint8_t>(kind));
}

ModelKind read_header(byteio::Reader& r) {
    if (r.remaining() < kMagic.size() || r.get_string(kMagic.size()) != kMagic)
        throw ParseError(ParseError::Kind::BadMagic, 0, "bad model magic at byte offset 0 (expected FDM1)");
    if (r.get<std::uint16_t>() != kVersion)
        throw ParseError(ParseError::Kind::BadHeader, 4, "unsupported model version at byte offset 4");
    const auto kind = r.get<std::uint8_t>();
    if (kind != 1 && kind != 2)
        throw ParseError(ParseError::Kind::BadHeader, 6, "unknown model kind at byte offset 6");
    return static_cast<ModelKind>(kind);
}

void put_all(std::vector<std::uint8_t>& out, const std::vector<double>& v) {
    for (double x : v) byteio::put(out, x);
}

void get_all(byteio::Reader& r, std::vector<double>& v, std::size_t n) {
    if (n > r.remaining() / sizeof(double)) r.require(r.remaining() + 1);
    v.resize(n);
    for (auto& x : v) x = r.get<double>();
}

void expect_end(const byteio::Reader& r) {
    if (!r.done())
        throw ParseError(ParseError::Kind::BadValue, r.offset(),
                         "trailing bytes at byte offset " + std::to_string(r.offset()));
}

std::uint32_t dim(std::size_t v) {
    if (v > std::numeric_limits<std::uint32_t>::max()) throw InvalidArgument("model dimension too large");
    return static_cast<std::uint32_t>(v);
}

}  // namespace

ModelKind peek_model_kind(std::span<const std::uint8_t> bytes) {
    byteio::Reader r(bytes);
    return read_header(r);
}

std::vector<std::uint8_t> write_model(const LogRegModel& model) {
    model.validate();
    std::vector<std::uint8_t> out;
    put_header(out, ModelKind::LogReg);
    byteio::put(out, dim(model.feature_count()));
    byteio::put(out, std::uint8_t{model.log_features});
    put_all(out, model.beta);
    put_all(out, model.feature_mean);
    put_all(out, model.feature_scale);
    return out;
}

std::vector<std::uint8_t> write_model(const CnnModel& model) {
    model.validate();
    std::vector<std::uint8_t> out;
    out.reserve(64 + 8 * model.shape.param_count());
    put_header(out, ModelKind::Cnn);
    const CnnShape& s = model.shape;
    for (std::size_t d : {s.in_h, s.in_w, s.filters, s.kernel_h, s.kernel_w, s.pool_h, s.pool_w})
        byteio::put(out, dim(d));
    byteio::put(out, model.input_mean);
    byteio::put(out, model.input_scale);
    byteio::put(out, model.threshold);
    put_all(out, model.conv_weights);
    put_all(out, model.conv_bias);
    put_all(out, model.dense_weights);
    byteio::put(out, model.dense_bias);
    return out;
}

LogRegModel parse_logreg_model(std::span<const std::uint8_t> bytes) {
    byteio::Reader r(bytes);
    if (read_header(r) != ModelKind::LogReg)
        throw ParseError(ParseError::Kind::BadHeader, 6, "model file holds a CNN, expected logistic regression");
    const auto p = r.get<std::uint32_t>();
    LogRegModel m;
    const std::size_t transform_at = r.offset();
    const auto transform = r.get<std::uint8_t>();
    if (transform > 1)
        throw ParseError(ParseError::Kind::BadValue, transform_at,
                         "bad feature transform at byte offset " + std::to_string(transform_at));
    m.log_features = transform == 1;
    get_all(r, m.beta, std::size_t{p} + 1);
    get_all(r, m.feature_mean, p);
    get_all(r, m.feature_scale, p);
    expect_end(r);
    m.validate();
    return m;
}

CnnModel parse_cnn_model(std::span<const std::uint8_t> bytes) {
    byteio::Reader r(bytes);
    if (read_header(r) != ModelKind::Cnn)
        throw ParseError(ParseError::Kind::BadHeader, 6, "model file holds a logistic model, expected a CNN");
    CnnShape s;
    for (std::size_t* d : {&s.in_h, &s.in_w, &s.filters, &s.kernel_h, &s.kernel_w, &s.pool_h, &s.pool_w})
        *d = r.get<std::uint32_t>();
    try {
        s.validate();
    } catch (const InvalidArgument& e) {
        throw ParseError(ParseError::Kind::BadHeader, 7, std::string("bad CNN shape: ") + e.what());
    }
    if (s.param_count() + 3 > r.remaining() / sizeof(double)) r.require(r.remaining() + 1);
    CnnModel m(s);
    m.input_mean = r.get<double>();
    m.input_scale = r.get<double>();
    m.threshold = r.get<double>();
    get_all(r, m.conv_weights, s.filters * s.kernel_size());
    get_all(r, m.conv_bias, s.filters);
    get_all(r, m.dense_weights, s.flat_len());
    m.dense_bias = r.get<double>();
    expect_end(r);
    return m;
}

}  // namespace falldet
