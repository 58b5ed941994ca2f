#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bohm2p {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NotNormalizable,
  NodeProximity,
  MaxStepsExceeded,
  UnsupportedModel,
  QuadratureNotConverged,
  EmptyEnsemble,
  Config,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define BOHM2P_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what)                          \
        : Error(ErrorKind::Name, what) {}                           \
  };

BOHM2P_DEFINE_ERROR(InvalidArgument)
BOHM2P_DEFINE_ERROR(DimensionMismatch)
BOHM2P_DEFINE_ERROR(NotNormalizable)
BOHM2P_DEFINE_ERROR(NodeProximity)
BOHM2P_DEFINE_ERROR(MaxStepsExceeded)
BOHM2P_DEFINE_ERROR(UnsupportedModel)
BOHM2P_DEFINE_ERROR(QuadratureNotConverged)
BOHM2P_DEFINE_ERROR(EmptyEnsemble)

#undef BOHM2P_DEFINE_ERROR

/// Raised while reading a scenario; `field` names the offending JSON path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(ErrorKind::Config, field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace bohm2p
