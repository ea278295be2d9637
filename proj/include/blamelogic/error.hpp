#pragma once

#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>

namespace blamelogic {

// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::set<std::string> expected, const std::string& found)
      : Error(compose(offset, expected, found)), offset_(offset), expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::set<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string compose(std::size_t offset, const std::set<std::string>& expected,
                             const std::string& found) {
    std::string msg = "syntax error at offset " + std::to_string(offset) + ": expected ";
    bool first = true;
    for (const auto& e : expected) {
      if (!first) msg += ", ";
      msg += e;
      first = false;
    }
    msg += " but found " + found;
    return msg;
  }

  std::size_t offset_;
  std::set<std::string> expected_;
};

// Malformed document (game file or proof file). line() is 1-based, 0 when unknown.
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownAgent : public Error {
 public:
  explicit UnknownAgent(const std::string& agent) : Error("unknown agent '" + agent + "'") {}
};

class UnknownState : public Error {
 public:
  explicit UnknownState(const std::string& state) : Error("unknown state '" + state + "'") {}
};

class PlayNotInGame : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class AtomBudgetExceeded : public Error {
 public:
  AtomBudgetExceeded(std::size_t atoms, std::size_t limit)
      : Error("formula has " + std::to_string(atoms) + " modal atoms, limit is " +
              std::to_string(limit)) {}
};

class PhiNotPremise : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace blamelogic
