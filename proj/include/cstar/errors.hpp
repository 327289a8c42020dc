#pragma once

#include <stdexcept>
#include <string>

namespace cstar {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation requested at z = 0, outside C*.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An intermediate value left the representable range of double.
class OverflowError : public Error {
public:
    using Error::Error;
};

/// An extended-range value left even the extended exponent range.
/// `sign` carries the sign of the real part of the offending exponent
/// (+1: the value tends to infinity, -1: it tends to zero, 0: unknown).
class BeyondRangeError : public OverflowError {
public:
    BeyondRangeError(const std::string& what, int sign)
        : OverflowError(what), sign_(sign) {}
    [[nodiscard]] int sign() const noexcept { return sign_; }

private:
    int sign_;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class NoCanonicalForm : public Error {
public:
    using Error::Error;
};

class VerificationFailed : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class DegenerateDerivative : public Error {
public:
    using Error::Error;
};

class NonClosure : public Error {
public:
    using Error::Error;
};

class RingFlagsUnavailable : public Error {
public:
    using Error::Error;
};

class UnknownPalette : public Error {
public:
    using Error::Error;
};

class InvalidRegion : public Error {
public:
    using Error::Error;
};

class LiftUnavailable : public Error {
public:
    using Error::Error;
};

class UnknownMap : public Error {
public:
    using Error::Error;
};

class UnknownParameter : public Error {
public:
    using Error::Error;
};

} // namespace cstar
