#pragma once

#include <stdexcept>
#include <string>

namespace ct2bc {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Scheme parameters violate their invariants, or an input does not match them
// (wrong stream length, payload larger than instance, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Brute-force attack inputs exceed the configured caps.
class ResourceGuardError : public Error {
public:
    using Error::Error;
};

// Bytes do not form a well-framed, canonical wire message.
class FrameError : public Error {
public:
    using Error::Error;
};

} // namespace ct2bc
