#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dlf {

using Vertex = std::uint32_t;
using ArcId = std::uint32_t;

// Colors are opaque tokens; only identity and ordering are ever used.
using Color = std::uint32_t;

enum class Direction : std::uint8_t { In = 0, Out = 1 };

inline const char* to_string(Direction d) { return d == Direction::In ? "in" : "out"; }

enum class Profile : std::uint8_t { Paper, Desk };

inline const char* to_string(Profile p) { return p == Profile::Paper ? "paper" : "desk"; }

/// Base of every error the library throws. `module()` names the component
/// that raised it so the CLI can tag diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error(what), module_(std::move(module)) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t offset)
      : Error("digraph", what + " (line " + std::to_string(line) + ", offset " +
                             std::to_string(offset) + ")"),
        line_(line),
        offset_(offset) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t line_;
  std::size_t offset_;
};

/// A randomized construction or search ran out of its retry/node budget.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

/// A suspicious-path query found more paths than its cap allows.
class PathOverflow : public Error {
 public:
  using Error::Error;
};

/// A coin probability left [0,1] in the paper profile.
class ProbabilityRange : public Error {
 public:
  using Error::Error;
};

/// A post-iteration invariant of the single coloring step failed.
class ClaimViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace dlf
