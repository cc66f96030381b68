#pragma once

#include <stdexcept>
#include <string>

namespace navsim {

// Base for all recoverable artifact errors. CLI code maps these to exit
// code 2 plus an "error: <message>" line on stderr.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};
struct VersionMismatch : Error {
    using Error::Error;
};
struct LengthMismatch : Error {
    using Error::Error;
};
struct EmptyScan : Error {
    using Error::Error;
};
struct OutOfBounds : Error {
    using Error::Error;
};
struct GenerationFailed : Error {
    using Error::Error;
};
struct NoPath : Error {
    using Error::Error;
};
struct InsufficientHistory : Error {
    using Error::Error;
};
struct TooFewRuns : Error {
    using Error::Error;
};
struct SingularSystem : Error {
    using Error::Error;
};
struct MissingModel : Error {
    using Error::Error;
};
struct UnknownConfig : Error {
    using Error::Error;
};

}  // namespace navsim
