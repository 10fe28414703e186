#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace probisim {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A LabelledPTS broke one of its structural invariants.
class ValidationError : public Error {
 public:
  enum class Kind { NegativeEntry, EntryOutOfRange, RowSumInvalid, EmptyActionSet, EmptyStateSet, BadShape, NonFinite };

  ValidationError(Kind kind, std::string msg, std::optional<std::size_t> state = {},
                  std::string action = {}, double sum = 0.0)
      : Error(std::move(msg)), kind_(kind), state_(state), action_(std::move(action)), sum_(sum) {}

  Kind kind() const { return kind_; }
  std::optional<std::size_t> state() const { return state_; }
  const std::string& action() const { return action_; }
  double sum() const { return sum_; }

 private:
  Kind kind_;
  std::optional<std::size_t> state_;
  std::string action_;
  double sum_;
};

class NonSurjective : public Error {
 public:
  explicit NonSurjective(std::size_t empty_class)
      : Error("class " + std::to_string(empty_class) + " has no members"), empty_class_(empty_class) {}
  std::size_t empty_class() const { return empty_class_; }

 private:
  std::size_t empty_class_;
};

class InvalidPartition : public Error {
 public:
  using Error::Error;
};

class InvalidStructure : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class NotClassificationMatrix : public Error {
 public:
  using Error::Error;
};

class NotLumpable : public Error {
 public:
  NotLumpable(std::string action, const std::string& details)
      : Error("not lumpable under action '" + action + "': " + details), action_(std::move(action)) {}
  const std::string& action() const { return action_; }

 private:
  std::string action_;
};

class InvalidRange : public Error {
 public:
  using Error::Error;
};

class ClassCountMismatch : public Error {
 public:
  ClassCountMismatch(std::size_t m1, std::size_t m2)
      : Error("class counts differ: " + std::to_string(m1) + " vs " + std::to_string(m2)) {}
};

class BudgetExceeded : public Error {
 public:
  explicit BudgetExceeded(double count)
      : Error("exhaustive search needs about " + std::to_string(count) + " classification pairs"),
        count_(count) {}
  double count() const { return count_; }

 private:
  double count_;
};

class CarrierTooLarge : public Error {
 public:
  CarrierTooLarge(std::size_t n, std::size_t cap)
      : Error("powerset of " + std::to_string(n) + " states exceeds cap of " + std::to_string(cap)) {}
};

class NotALattice : public Error {
 public:
  using Error::Error;
};

/// Text-format errors carry the 1-based line they were raised on (0 = whole file).
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownName, Validation, NotALattice };

  ParseError(Kind kind, std::size_t line, const std::string& msg)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), kind_(kind), line_(line) {}

  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

}  // namespace probisim
