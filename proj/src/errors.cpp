#include "bohm2p/errors.hpp"

namespace bohm2p {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotNormalizable: return "NotNormalizable";
    case ErrorKind::NodeProximity: return "NodeProximity";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorKind::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace bohm2p
