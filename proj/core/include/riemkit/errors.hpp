#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riemkit {

enum class ErrorCode {
  DegenerateInput,
  SyntaxError,
  UnknownIdentifier,
  ArityError,
  DomainError,
  Overflow,
  SingularMetric,
  DegeneratePlane,
  RankDeficiency,
  FrameExtensionFailure,
  AuditFailure,
  StructureMissing,
  UnsupportedClass,
  UnknownId,
  BadParams,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  static constexpr std::size_t no_offset = static_cast<std::size_t>(-1);

  Error(ErrorCode code, const std::string& message, std::size_t offset = no_offset);

  ErrorCode code() const { return code_; }
  // message without the code prefix and offset suffix
  const std::string& message() const { return message_; }
  // byte offset into the source text, parser errors only
  std::size_t offset() const { return offset_; }
  bool has_offset() const { return offset_ != no_offset; }

 private:
  ErrorCode code_;
  std::size_t offset_;
  std::string message_;
};

}  // namespace riemkit
