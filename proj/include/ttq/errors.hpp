#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttq {

/// Base class for every error raised by the library.
class TtqError : public std::runtime_error {
 public:
  explicit TtqError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Lexing or parsing failure. `column` is 1-based within the query text.
class ParseError : public TtqError {
 public:
  ParseError(const std::string& msg, std::size_t column,
             std::vector<std::string> expected = {})
      : TtqError(msg + " (column " + std::to_string(column) + ")"),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t column_;
  std::vector<std::string> expected_;
};

/// File, stream, format or charset problem.
class IoError : public TtqError {
 public:
  using TtqError::TtqError;
};

/// Malformed XML input. Line and column are 1-based.
class XmlError : public IoError {
 public:
  XmlError(const std::string& msg, std::size_t line, std::size_t column)
      : IoError("line " + std::to_string(line) + ", column " +
                std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// A thread whose target name cannot be resolved to exactly one node.
class ThreadError : public TtqError {
 public:
  ThreadError(const std::string& msg, std::string target_name)
      : TtqError(msg), target_name_(std::move(target_name)) {}

  const std::string& target_name() const { return target_name_; }

 private:
  std::string target_name_;
};

/// Threads of one type form a cycle; carries one node on the cycle.
class CyclicThreadError : public TtqError {
 public:
  CyclicThreadError(const std::string& msg, std::string node_name)
      : TtqError(msg), node_name_(std::move(node_name)) {}

  const std::string& node_name() const { return node_name_; }

 private:
  std::string node_name_;
};

/// Runtime evaluation failure: unbound alias, arity mismatch, key
/// evaluation too deep, missing default thread type, unknown source.
class EvalError : public TtqError {
 public:
  using TtqError::TtqError;
};

/// Structural mutation failure (root move/delete, bad target).
class TransformError : public TtqError {
 public:
  using TtqError::TtqError;
};

/// Attempt to move a node underneath its own subtree.
class CycleError : public TransformError {
 public:
  using TransformError::TransformError;
};

/// A mutation changed the base text of a sentence while the guard was on.
class GuardViolation : public TtqError {
 public:
  GuardViolation(int sentence_index, std::string before, std::string after)
      : TtqError("base-text guard violated in sentence " +
                 std::to_string(sentence_index) + ": \"" + before +
                 "\" became \"" + after + "\""),
        sentence_index_(sentence_index),
        before_(std::move(before)),
        after_(std::move(after)) {}

  int sentence_index() const { return sentence_index_; }
  const std::string& before() const { return before_; }
  const std::string& after() const { return after_; }

 private:
  int sentence_index_;
  std::string before_;
  std::string after_;
};

/// Command name not present in the registry.
class CommandError : public TtqError {
 public:
  using TtqError::TtqError;
};

}  // namespace ttq
