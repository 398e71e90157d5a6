#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lyrica {

/// A model token: either a single grapheme, a control sentinel, or an
/// attribute tag. Sentinels and tags are bracketed multi-character strings, so
/// no grapheme cluster can ever collide with them.
using Token = std::string;
using TokenSeq = std::vector<Token>;

inline constexpr std::string_view kSep = "[SEP]";
inline constexpr std::string_view kEos = "[EOS]";
inline constexpr std::string_view kMask = "[MASK]";
inline constexpr std::string_view kBos = "[BOS]";
inline constexpr std::string_view kUnk = "[UNK]";

bool is_sentinel(std::string_view token);

/// Attribute tags look like "<Pop>" or "<negative>".
Token attribute_tag(std::string_view name);
bool is_attribute_tag(std::string_view token);

/// Renders a token sequence as a space-separated string for display.
std::string render(const TokenSeq& tokens);

}  // namespace lyrica
