#pragma once

#include <stdexcept>
#include <string>

namespace holetune {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(SourceLoc loc, const std::string &message)
      : Error(std::to_string(loc.line) + ":" + std::to_string(loc.column) +
              ": " + message),
        loc_(loc) {}
  SourceLoc location() const { return loc_; }

private:
  SourceLoc loc_;
};

/// Unbound variable, type mismatch, index out of bounds, stack budget.
class RuntimeError : public Error {
public:
  using Error::Error;
};

class AssertFailure : public Error {
public:
  using Error::Error;
};

class UnknownVertex : public Error {
public:
  using Error::Error;
};

class UnknownHole : public Error {
public:
  using Error::Error;
};

class InvalidPath : public Error {
public:
  using Error::Error;
};

class MalformedLog : public Error {
public:
  using Error::Error;
};

class MalformedTuneFile : public Error {
public:
  using Error::Error;
};

class IncompleteCoverage : public Error {
public:
  using Error::Error;
};

class RowFailed : public Error {
public:
  RowFailed(std::size_t row, const std::string &cause)
      : Error("row " + std::to_string(row) + " failed: " + cause), row_(row) {}
  std::size_t row() const { return row_; }

private:
  std::size_t row_;
};

} // namespace holetune
