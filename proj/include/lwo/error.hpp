#pragma once

#include <stdexcept>
#include <string>

namespace lwo {

// Precondition violations on shapes and sizes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Parameters outside an operation's mathematical domain (e.g. mu > 1/2 where
// the Fourier identity is required).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A configured budget (support cap, enumeration cap, search budget) would be
// exceeded. Distinguished so callers can triage resource limits separately
// from mathematical failures.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed textual or JSON input.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lwo
