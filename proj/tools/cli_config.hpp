#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "falldet/deploy.hpp"
#include "falldet/logreg.hpp"
#include "falldet/synth.hpp"
#include "falldet/train.hpp"

namespace falldet::cli {

/// Bad command line or configuration; exit status 64.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ValueType { Count, Real, Flag, Text, Choice };

struct KeySpec {
    std::string name;
    ValueType type = ValueType::Text;
    std::string default_value;
    std::string help;
    std::vector<std::string> choices;
    /// Empty string means "not set".
    bool optional = false;
};

/// Every configuration key, in help order.
const std::vector<KeySpec>& schema();
const KeySpec* find_key(std::string_view name);

/// Schema-validated key=value settings. Later sources override earlier ones:
/// defaults, then the config file, then command-line flags.
class Config {
public:
    Config();

    /// Throws UsageError for unknown keys and values that do not fit the key's type.
    void set(std::string_view key, std::string_view value, std::string_view origin = "command line");
    /// `key = value` lines; blank lines and `#` comments are ignored.
    void load_text(std::string_view text, std::string_view origin);

    const std::string& text(std::string_view key) const;
    bool has(std::string_view key) const { return !text(key).empty(); }
    double real(std::string_view key) const;
    std::size_t count(std::string_view key) const;
    bool flag(std::string_view key) const;
    std::uint64_t seed() const { return count("seed"); }

    WindowParams window_params() const;
    StftConfig stft() const;
    SynthConfig synth() const;
    CnnShape shape(std::size_t in_h, std::size_t in_w) const;
    TrainConfig train() const;
    LogRegTrainConfig logreg() const;
    DetectorConfig detector() const;

    /// `key = value` for every key, parseable by load_text.
    std::string dump() const;

private:
    std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace falldet::cli
