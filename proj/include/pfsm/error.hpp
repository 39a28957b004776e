#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pfsm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed regular expression. `offset` is the byte position in the pattern.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, std::string reason)
        : Error("syntax error at offset " + std::to_string(offset) + ": " + reason),
          offset_(offset), reason_(std::move(reason)) {}

    std::size_t offset() const noexcept { return offset_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t offset_;
    std::string reason_;
};

/// Subset construction would exceed the configured state ceiling.
class StateCeilingExceeded : public Error {
public:
    explicit StateCeilingExceeded(std::size_t ceiling)
        : Error("subset construction exceeded " + std::to_string(ceiling) + " states"),
          ceiling_(ceiling) {}

    std::size_t ceiling() const noexcept { return ceiling_; }

private:
    std::size_t ceiling_;
};

/// Malformed automaton, PFSM, or active-set file.
class FormatError : public Error {
public:
    FormatError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An ActiveSet does not belong to the PFSM generation it is used with.
class GenerationMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace pfsm
