#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lyrica {

enum class ErrorCode {
  kInput,
  kConfiguration,
  kEmptyCorpus,
  kTraining,
  kValidation,
  kConstraintUnsatisfiable,
  kBackendUnavailable,
  kInternalInvariant,
  kNotFound,
  kGenerationExhausted,
  kTimeout,
};

/// Stable machine-readable name, e.g. "constraint_unsatisfiable".
std::string_view error_code_name(ErrorCode code);

/// The single exception type thrown by the library. `field` names the
/// offending request field for validation failures and is empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

}  // namespace lyrica
