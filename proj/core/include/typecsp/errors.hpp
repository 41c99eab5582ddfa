#pragma once

#include <stdexcept>
#include <string>

namespace typecsp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Formula text could not be parsed. `offset` is the 0-based byte offset of
/// the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Input violates a documented precondition or schema. `path` points into the
/// offending JSON document when the error comes from deserialization.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error(what) {}
    ValidationError(const std::string& what, const std::string& path)
        : Error(what + " [" + path + "]"), path_(path) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

/// A size guard was exceeded. Guards fail loudly instead of truncating.
class GuardError : public Error {
public:
    explicit GuardError(const std::string& what) : Error(what) {}
};

} // namespace typecsp
