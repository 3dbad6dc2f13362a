#pragma once

// Little-endian encode/decode helpers shared by the binary file formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "falldet/error.hpp"

namespace falldet::byteio {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
    U bits = std::bit_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<std::uint8_t>(bits & 0xFFu));
        if constexpr (sizeof(T) > 1) bits = static_cast<U>(bits >> 8);
    }
}

inline void put_bytes(std::vector<std::uint8_t>& out, std::string_view s) {
    out.insert(out.end(), s.begin(), s.end());
}

/// Sequential reader over a byte span; every read is bounds-checked and
/// reports the failing offset.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    template <typename T>
    T get() {
        static_assert(std::is_trivially_copyable_v<T>);
        using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
                  std::conditional_t<sizeof(T) == 2, std::uint16_t,
                  std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>>;
        require(sizeof(T));
        U bits = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            bits = static_cast<U>(bits | (static_cast<U>(data_[pos_ + i]) << (8 * i)));
        pos_ += sizeof(T);
        return std::bit_cast<T>(bits);
    }

    std::string get_string(std::size_t n) {
        require(n);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    void require(std::size_t n) const {
        if (remaining() < n)
            throw ParseError(ParseError::Kind::Truncated, pos_,
                             "truncated input at byte offset " + std::to_string(pos_));
    }

private:
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace falldet::byteio
