#include "lyrica/error.h"

namespace lyrica {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInput: return "input_error";
    case ErrorCode::kConfiguration: return "configuration_error";
    case ErrorCode::kEmptyCorpus: return "empty_corpus";
    case ErrorCode::kTraining: return "training_error";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kConstraintUnsatisfiable: return "constraint_unsatisfiable";
    case ErrorCode::kBackendUnavailable: return "backend_unavailable";
    case ErrorCode::kInternalInvariant: return "internal_invariant";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kGenerationExhausted: return "generation_exhausted";
    case ErrorCode::kTimeout: return "timeout";
  }
  return "unknown";
}

}  // namespace lyrica
