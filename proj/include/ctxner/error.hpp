#pragma once

#include <stdexcept>
#include <string>

namespace ctxner {

enum class ErrorKind {
  Input,        // missing or unreadable input, bad arguments
  EmptyResult,  // a stage produced nothing to work with
  Malformed,    // a data or model file failed to parse
  Domain,       // a formula was called outside its domain
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ctxner
