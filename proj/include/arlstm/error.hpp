#pragma once

#include <stdexcept>
#include <string>

namespace arlstm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data: malformed CSV, unknown dates, alignment failures.
/// The CLI maps this family to exit code 2.
class InputError : public Error {
public:
    using Error::Error;
};

class FormatError : public InputError {
public:
    FormatError(const std::string& what, std::size_t line = 0)
        : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class AlignmentError : public InputError {
public:
    using InputError::InputError;
};

class LengthError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Degenerate numerical input, e.g. a constant series where a range or
/// a variance is required.
class DegenerateError : public Error {
public:
    using Error::Error;
};

class SingularError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or gradient during optimisation.
class TrainingError : public Error {
public:
    using Error::Error;
};

/// The differenced series failed the stationarity check under strict mode.
class StationarityError : public Error {
public:
    using Error::Error;
};

}  // namespace arlstm
