#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace taskspace {

enum class ErrorKind {
  Parse,
  InvalidSystem,
  NotCompact,
  InitNotCompact,
  Singular,
  Critical,
  IterationCap,
  InconsistentCriticality,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + msg), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The initial type is removed by compaction; its completion space is then at
// most ell = number of removed types, and no further analysis is needed.
class InitNotCompactError : public Error {
 public:
  explicit InitNotCompactError(std::size_t ell)
      : Error(ErrorKind::InitNotCompact,
              "initial type is not compact; completion space is at most " + std::to_string(ell)),
        ell_(ell) {}

  std::size_t ell() const noexcept { return ell_; }

 private:
  std::size_t ell_;
};

}  // namespace taskspace
