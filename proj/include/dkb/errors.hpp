#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dkb {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Raised by the model and formula parsers.
class SyntaxError : public ParseError {
public:
  using ParseError::ParseError;
};

class DuplicateCaseId : public Error {
public:
  explicit DuplicateCaseId(const std::string& case_id)
      : Error("duplicate case id '" + case_id + "'"), case_id_(case_id) {}
  const std::string& case_id() const noexcept { return case_id_; }

private:
  std::string case_id_;
};

class TraceKeyConflict : public Error {
public:
  TraceKeyConflict(const std::string& case_id, const std::string& key)
      : Error("trace '" + case_id + "': conflicting values for trace key '" + key + "'"),
        case_id_(case_id), key_(key) {}
  const std::string& case_id() const noexcept { return case_id_; }
  const std::string& key() const noexcept { return key_; }

private:
  std::string case_id_;
  std::string key_;
};

class UnknownHierNode : public Error {
public:
  explicit UnknownHierNode(const std::string& node)
      : Error("unknown hierarchy node '" + node + "'") {}
};

class HierarchyCycle : public Error {
public:
  explicit HierarchyCycle(const std::string& node)
      : Error("hierarchy is not acyclic (cycle through '" + node + "')") {}
};

class UnknownKey : public Error {
public:
  explicit UnknownKey(const std::string& key) : Error("unknown payload key '" + key + "'") {}
};

class BadOffset : public Error {
public:
  explicit BadOffset(std::size_t offset)
      : Error("Act offset " + std::to_string(offset) + " out of range") {}
};

class DisjointnessViolation : public Error {
public:
  explicit DisjointnessViolation(std::size_t trace_id)
      : Error("weighted union operands share trace " + std::to_string(trace_id)),
        trace_id_(trace_id) {}
  std::size_t trace_id() const noexcept { return trace_id_; }

private:
  std::size_t trace_id_;
};

class UnsupportedTemplate : public Error {
public:
  explicit UnsupportedTemplate(const std::string& name)
      : Error("unsupported Declare template '" + name + "'") {}
};

}  // namespace dkb
