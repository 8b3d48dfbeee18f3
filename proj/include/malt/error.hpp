#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace malt {

// Base class for all errors raised by the library. Negative results
// (NotTrivial, NotTaylor, no loop, ...) are ordinary return values, never
// exceptions; exceptions mean the caller violated a precondition or an
// input could not be read.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by the s-expression reader; `position` is a byte offset into the
// input text.
struct ParseError : Error {
    std::size_t position;
    ParseError(const std::string& what, std::size_t pos)
        : Error(what + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};

// Raised when a search structure would exceed its configured cap. Callers
// that can degrade gracefully catch this and return a partial result.
struct CapExceeded : Error {
    using Error::Error;
};

}  // namespace malt
