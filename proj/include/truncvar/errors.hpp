#pragma once

#include <stdexcept>
#include <string>

namespace truncvar {

// Base class for all validation failures. `kind()` is a stable identifier
// suitable for one-line CLI diagnostics and exit-code mapping.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct OutOfDomain : Error {
    explicit OutOfDomain(const std::string& what) : Error("OutOfDomain", what) {}
};

struct NonIncreasingTimes : Error {
    explicit NonIncreasingTimes(const std::string& what) : Error("NonIncreasingTimes", what) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& what) : Error("LengthMismatch", what) {}
};

struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& what) : Error("NonFiniteValue", what) {}
};

struct HorizonMismatch : Error {
    explicit HorizonMismatch(const std::string& what) : Error("HorizonMismatch", what) {}
};

// Carries the first interleaved index where alpha > beta.
struct BoundaryOrderViolation : Error {
    BoundaryOrderViolation(std::size_t index, const std::string& what)
        : Error("BoundaryOrderViolation", what), index(index) {}
    std::size_t index;
};

// Carries the admissible starting interval [lo; hi].
struct StartOutOfBand : Error {
    StartOutOfBand(double lo, double hi, const std::string& what)
        : Error("StartOutOfBand", what), lo(lo), hi(hi) {}
    double lo;
    double hi;
};

struct OracleTooLarge : Error {
    explicit OracleTooLarge(const std::string& what) : Error("OracleTooLarge", what) {}
};

struct InvalidExponent : Error {
    explicit InvalidExponent(const std::string& what) : Error("InvalidExponent", what) {}
};

struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& what) : Error("InvalidSpec", what) {}
};

struct InvalidGrid : Error {
    explicit InvalidGrid(const std::string& what) : Error("InvalidGrid", what) {}
};

struct InsufficientData : Error {
    explicit InsufficientData(const std::string& what) : Error("InsufficientData", what) {}
};

struct KnotRequired : Error {
    explicit KnotRequired(const std::string& what) : Error("KnotRequired", what) {}
};

struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error("ParseError", what) {}
};

} // namespace truncvar
