#pragma once

#include <stdexcept>
#include <string>

namespace latwave {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// --- grid / operator errors ---
class GridMismatch : public Error {
 public:
  using Error::Error;
};
class OddGrid : public Error {
 public:
  using Error::Error;
};
class KOutOfRange : public Error {
 public:
  using Error::Error;
};
class MeanNotZero : public Error {
 public:
  using Error::Error;
};

// --- potential errors ---
class UnknownModel : public Error {
 public:
  using Error::Error;
};
class UnsupportedSide : public Error {
 public:
  using Error::Error;
};
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};
class RootBracketFailure : public Error {
 public:
  using Error::Error;
};
class RangeCap : public Error {
 public:
  using Error::Error;
};
class InvalidModel : public Error {
 public:
  using Error::Error;
};

// --- flow errors ---
class ZeroProfile : public Error {
 public:
  using Error::Error;
};
class StalledFlow : public Error {
 public:
  using Error::Error;
};
class DegenerateNewton : public Error {
 public:
  using Error::Error;
};
class InvalidParams : public Error {
 public:
  using Error::Error;
};

// --- wavetrain errors ---
class DegenerateWaveNumber : public Error {
 public:
  using Error::Error;
};
class NoClosedOrbit : public Error {
 public:
  using Error::Error;
};

// --- lattice errors ---
class IncommensurateK : public Error {
 public:
  using Error::Error;
};

// --- parsing / io ---
class ParseError : public Error {
 public:
  using Error::Error;
};
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace latwave
