#pragma once

#include <stdexcept>
#include <string>

namespace tweakboost {

// Failure categories; the CLI maps them onto stable exit codes.
enum class ErrorKind { Usage = 1, Data = 2, Train = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline Error usage_error(const std::string& what) { return {ErrorKind::Usage, what}; }
inline Error data_error(const std::string& what) { return {ErrorKind::Data, what}; }
inline Error train_error(const std::string& what) { return {ErrorKind::Train, what}; }

} // namespace tweakboost
