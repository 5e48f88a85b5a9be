#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sysrisk {

// Exit-code classes used by the CLI: config -> 1, data -> 2, numeric -> 3.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    enum class Kind { malformed, malformed_date, non_positive_price, duplicate_cell, empty_table, insufficient_data };

    DataError(Kind kind, const std::string& what, std::size_t row = 0)
        : std::runtime_error(row ? what + " (row " + std::to_string(row) + ")" : what), kind_(kind), row_(row) {}

    Kind kind() const noexcept { return kind_; }
    // 1-based line number in the source; 0 when not tied to a row.
    std::size_t row() const noexcept { return row_; }

private:
    Kind kind_;
    std::size_t row_;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonFiniteLikelihood : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace sysrisk
