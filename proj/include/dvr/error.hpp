#pragma once

#include <stdexcept>
#include <string>

namespace dvr {

// Every failure raised by the library derives from Error so callers can
// catch domain problems separately from std::bad_alloc and friends.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownCategory : public Error {
 public:
  explicit UnknownCategory(const std::string& name)
      : Error("unknown constraint category: '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ArityError : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class UnsupportedType : public Error {
 public:
  explicit UnsupportedType(const std::string& what, std::size_t tool_index = 0)
      : Error(what), tool_index_(tool_index) {}
  std::size_t tool_index() const noexcept { return tool_index_; }

 private:
  std::size_t tool_index_;
};

class NotApplicable : public Error {
 public:
  using Error::Error;
};

class MissingTemplate : public Error {
 public:
  using Error::Error;
};

class MissingSlot : public Error {
 public:
  using Error::Error;
};

class IOFailure : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class GatewayError : public Error {
 public:
  using Error::Error;
};

class TransportError : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class EndpointRejection : public GatewayError {
 public:
  EndpointRejection(int status, std::string body)
      : GatewayError("endpoint rejected request with HTTP " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

class ScriptExhausted : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class UnknownLabel : public GatewayError {
 public:
  using GatewayError::GatewayError;
};

class ToolsetEmpty : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace dvr
