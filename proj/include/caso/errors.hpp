#pragma once

#include <stdexcept>
#include <string>

namespace caso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A pivot fell below the singularity threshold during factorization.
class SingularMatrix : public Error {
public:
    using Error::Error;
};

class KeyGenFailure : public Error {
public:
    using Error::Error;
};

/// A one-time key was presented to a second transform.
class KeyReuse : public Error {
public:
    using Error::Error;
};

/// A base function was evaluated outside its domain (log of a nonpositive
/// argument, reciprocal of zero).
class DomainError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class UnsupportedClass : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

}  // namespace caso
