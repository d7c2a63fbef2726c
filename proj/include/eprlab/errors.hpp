#pragma once

#include <stdexcept>
#include <string>

namespace eprlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of an operation (non-positive width,
/// empty interval, window outside its cutoff, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operation's documented precondition on a combination of inputs does
/// not hold (e.g. a sweep grid too coarse for the state it probes).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace eprlab
