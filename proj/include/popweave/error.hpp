#pragma once

#include <stdexcept>
#include <string>

namespace popweave {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evidence with probability zero under the network.
class ImpossibleEvidence : public Error {
 public:
  using Error::Error;
};

/// The parent relation is not a DAG.
class CycleError : public Error {
 public:
  CycleError(std::string member, const std::string& what)
      : Error(what), member_(std::move(member)) {}
  const std::string& member() const noexcept { return member_; }

 private:
  std::string member_;
};

/// Malformed network or scenario document. `context` locates the problem
/// (a JSON path such as `variables[2].cpt[1]`, or a byte offset).
class ParseError : public Error {
 public:
  ParseError(std::string context, const std::string& message)
      : Error(context.empty() ? message : context + ": " + message),
        context_(std::move(context)),
        message_(message) {}
  const std::string& context() const noexcept { return context_; }
  const std::string& message() const noexcept { return message_; }

 private:
  std::string context_;
  std::string message_;
};

/// A well-formed document that breaks a cross-file contract.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A matching network in which the link variable can never be "yes".
class UnsatisfiableLinkType : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration refused because the state space is too large.
class CapacityExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace popweave
