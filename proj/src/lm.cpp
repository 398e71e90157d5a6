#include "lyrica/lm.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "lyrica/error.h"

namespace lyrica {

namespace {

const std::vector<Token>& sentinels() {
  static const std::vector<Token> s = {Token(kSep), Token(kEos), Token(kMask), Token(kBos),
                                       Token(kUnk)};
  return s;
}

}  // namespace

Vocabulary::Vocabulary() : tokens_(sentinels()) {
  for (TokenId i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

Vocabulary Vocabulary::from_tokens(const std::vector<Token>& tokens) {
  std::set<Token> rest;
  for (const auto& t : tokens) {
    if (!is_sentinel(t)) rest.insert(t);
  }
  std::vector<Token> ordered = sentinels();
  ordered.insert(ordered.end(), rest.begin(), rest.end());
  return from_ordered(std::move(ordered));
}

Vocabulary Vocabulary::from_ordered(std::vector<Token> tokens) {
  const auto& s = sentinels();
  if (tokens.size() < s.size() || !std::equal(s.begin(), s.end(), tokens.begin())) {
    throw Error(ErrorCode::kConfiguration, "vocabulary must start with the sentinel tokens");
  }
  Vocabulary v;
  v.tokens_ = std::move(tokens);
  v.index_.clear();
  for (TokenId i = 0; i < v.tokens_.size(); ++i) {
    if (!v.index_.emplace(v.tokens_[i], i).second) {
      throw Error(ErrorCode::kConfiguration, "duplicate vocabulary token: " + v.tokens_[i]);
    }
  }
  return v;
}

const Token& Vocabulary::token(TokenId id) const {
  if (id >= tokens_.size()) throw Error(ErrorCode::kInput, "token id out of range");
  return tokens_[id];
}

std::optional<TokenId> Vocabulary::find(const Token& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::encode(const Token& token) const { return find(token).value_or(kUnkId); }

std::vector<TokenId> Vocabulary::encode(const TokenSeq& tokens) const {
  std::vector<TokenId> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(encode(t));
  return out;
}

TokenSeq Vocabulary::decode(std::span<const TokenId> ids) const {
  TokenSeq out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(token(id));
  return out;
}

bool Vocabulary::is_text(TokenId id) const {
  return id > kUnkId && id < tokens_.size() && !is_attribute_tag(tokens_[id]);
}

std::string Vocabulary::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0x0a;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double LmBackend::token_probability(std::span<const TokenId> context, TokenId token) const {
  const auto dist = next_distribution(context);
  if (token >= dist.size()) throw Error(ErrorCode::kInput, "token id out of range");
  return dist[token];
}

void check_ids(const Vocabulary& vocab, std::span<const TokenId> ids) {
  for (auto id : ids) {
    if (id >= vocab.size()) {
      throw Error(ErrorCode::kInput, "unknown token id " + std::to_string(id));
    }
  }
}

double score_sequence(const LmBackend& model, std::span<const TokenId> tokens) {
  if (tokens.empty()) throw Error(ErrorCode::kInput, "cannot score an empty sequence");
  check_ids(model.vocabulary(), tokens);
  double total = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    total += std::log(model.token_probability(tokens.first(i), tokens[i]));
  }
  return total;
}

}  // namespace lyrica
