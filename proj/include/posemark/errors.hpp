#pragma once

#include <stdexcept>
#include <string>

namespace posemark {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix handed to a rotation routine is not in SO(3).
class InvalidRotation : public Error {
public:
    using Error::Error;
};

class UnknownMarker : public Error {
public:
    explicit UnknownMarker(int id)
        : Error("unknown marker id " + std::to_string(id)), id_(id) {}
    int id() const noexcept { return id_; }

private:
    int id_;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Input that must be time-ordered is not.
class OrderingError : public Error {
public:
    using Error::Error;
};

/// No cover event could be located in an RSSI stream.
class DetectionFailure : public Error {
public:
    using Error::Error;
};

/// A query time lies outside the span of a trajectory.
class ExtrapolationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed record in a text file. `line()` is 1-based; `file()` is empty
/// when the text did not come from a named file.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what) : ParseError(std::string(), line, what) {}
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error((file.empty() ? "" : file + ": ") + "line " + std::to_string(line) + ": " + what),
          file_(file),
          line_(line),
          detail_(what) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& file() const noexcept { return file_; }
    /// The message without file and line.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string file_;
    std::size_t line_;
    std::string detail_;
};

/// A parsed value lies outside its allowed range.
class RangeError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace posemark
