#include "lyrica/tokens.h"

namespace lyrica {

bool is_sentinel(std::string_view token) {
  return token == kSep || token == kEos || token == kMask || token == kBos || token == kUnk;
}

Token attribute_tag(std::string_view name) { return "<" + std::string(name) + ">"; }

bool is_attribute_tag(std::string_view token) {
  return token.size() >= 3 && token.front() == '<' && token.back() == '>';
}

std::string render(const TokenSeq& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace lyrica
