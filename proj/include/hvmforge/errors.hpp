#pragma once

#include <stdexcept>
#include <string>

namespace hvmforge {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// pushforward: the map lacks a value for a point of the input alphabet.
class UndefinedOnSupport : public Error {
  public:
    using Error::Error;
};

// product/monotone coupling called with no factors.
class EmptyInput : public Error {
  public:
    using Error::Error;
};

// A key (projection index, property id, context id) does not resolve.
class UnknownKey : public Error {
  public:
    using Error::Error;
};

// A numeric argument is outside its admissible range (e.g. |e| > 1).
class OutOfRange : public Error {
  public:
    using Error::Error;
};

// Malformed input text: not JSON, wrong node type, missing field.
class SchemaError : public Error {
  public:
    using Error::Error;
};

// Well-formed input that violates a semantic rule (mass sums, duplicate
// ids, dangling references). The message names the offending path.
class ValidationError : public Error {
  public:
    using Error::Error;
};

// An HVM response table has no value for a hidden point in the support.
class ResponseUndefined : public Error {
  public:
    using Error::Error;
};

// HVM and system disagree on properties, contexts or alphabets.
class StructureMismatch : public Error {
  public:
    using Error::Error;
};

// The global-assignment enumeration would exceed the configured cap.
class SizeLimit : public Error {
  public:
    using Error::Error;
};

// cycle_functional/cycle_max called on a system that is not a single
// cycle of binary +/-1 properties.
class ShapeError : public Error {
  public:
    using Error::Error;
};

// Invariant breach inside the library itself (never expected to throw).
class InternalError : public Error {
  public:
    using Error::Error;
};

}  // namespace hvmforge
