#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace falldet {

/// Bad or unusable input data (malformed files, impossible parameters for the
/// data at hand). Maps to the data-error exit status in the CLI.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input shorter than a single window / empty where data is required.
class EmptyInputError : public DataError {
public:
    using DataError::DataError;
};

/// Arguments that violate an operation's precondition (shape mismatch,
/// non-positive step, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parse failure at a byte offset (binary formats) or line (text formats).
class ParseError : public DataError {
public:
    enum class Kind { BadMagic, BadHeader, Truncated, NonMonotonic, BadValue, Jitter, Missing };

    ParseError(Kind kind, std::size_t where, const std::string& what)
        : DataError(what), kind_(kind), where_(where) {}

    Kind kind() const noexcept { return kind_; }
    /// Byte offset for binary input, 1-based line number for text input.
    std::size_t where() const noexcept { return where_; }

private:
    Kind kind_;
    std::size_t where_;
};

/// Training diverged or cannot proceed with the given data.
class TrainingError : public DataError {
public:
    using DataError::DataError;
};

}  // namespace falldet
