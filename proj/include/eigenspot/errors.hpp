#ifndef EIGENSPOT_ERRORS_HPP
#define EIGENSPOT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace eigenspot {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeMismatchError : public Error {
public:
    using Error::Error;
};

/// Singular vectors of an all-zero matrix are undefined.
class AllZeroMatrixError : public Error {
public:
    using Error::Error;
};

/// The dense oracle refuses matrices beyond its test-scale guard.
class OracleSizeExceededError : public Error {
public:
    using Error::Error;
};

class ZeroVectorError : public Error {
public:
    using Error::Error;
};

class LengthMismatchError : public Error {
public:
    using Error::Error;
};

class TooShortError : public Error {
public:
    using Error::Error;
};

class ZeroVarianceError : public Error {
public:
    using Error::Error;
};

class TooFewGroupsError : public Error {
public:
    using Error::Error;
};

class ZeroWithinVarianceError : public Error {
public:
    using Error::Error;
};

class EmptyFirstPeriodError : public Error {
public:
    using Error::Error;
};

class NonPositiveLambdaError : public Error {
public:
    using Error::Error;
};

/// Ratio detection needs strictly positive baseline cells; carries the first
/// offending coordinate.
class ZeroBaselineCellError : public Error {
public:
    ZeroBaselineCellError(std::size_t region, std::size_t period, const std::string& what)
        : Error(what), region(region), period(period) {}
    std::size_t region;
    std::size_t period;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace eigenspot

#endif
