#include "riemkit/errors.hpp"

namespace riemkit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::DegeneratePlane: return "DegeneratePlane";
    case ErrorCode::RankDeficiency: return "RankDeficiency";
    case ErrorCode::FrameExtensionFailure: return "FrameExtensionFailure";
    case ErrorCode::AuditFailure: return "AuditFailure";
    case ErrorCode::StructureMissing: return "StructureMissing";
    case ErrorCode::UnsupportedClass: return "UnsupportedClass";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

static std::string decorate(ErrorCode code, const std::string& message, std::size_t offset) {
  std::string out = std::string(error_code_name(code)) + ": " + message;
  if (offset != Error::no_offset) out += " (at offset " + std::to_string(offset) + ")";
  return out;
}

Error::Error(ErrorCode code, const std::string& message, std::size_t offset)
    : std::runtime_error(decorate(code, message, offset)), code_(code), offset_(offset), message_(message) {}

}  // namespace riemkit
