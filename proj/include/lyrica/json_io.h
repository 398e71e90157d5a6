#pragma once

#include "json.hpp"
#include "lyrica/decode.h"
#include "lyrica/pipeline.h"
#include "lyrica/rank.h"
#include "lyrica/store.h"

namespace lyrica {

/// Parses the wire form of a ControlSpec. `acrostic` may be a string (split
/// into graphemes) or an array; `words_per_line` a number or an array.
/// Throws kValidation with the field name on any shape error.
ControlSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ControlSpec& spec);

nlohmann::json violation_to_json(const Violation& v);
nlohmann::json candidate_to_json(const Candidate& c);
nlohmann::json version_to_json(const Version& v);
nlohmann::json summary_to_json(const DraftSummary& s);

}  // namespace lyrica
