#pragma once

#include <stdexcept>
#include <string>

namespace exitwalk {

/// Malformed input file or inconsistent user-supplied data (CLI exit 2).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// A configured resource cap was exceeded (CLI exit 3).
class CapExceeded : public std::runtime_error {
public:
    explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace exitwalk
