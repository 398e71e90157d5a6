/**
 * @file lm.h
 * @brief Vocabulary and the next-token distribution interface.
 *
 * Every generation mode only ever asks a backend for P(next | context), where
 * the context is the source attributes, [BOS], and the target produced so far
 * as one sequence.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lyrica/tokens.h"

namespace lyrica {

using TokenId = std::uint32_t;

class Vocabulary {
 public:
  static constexpr TokenId kSepId = 0;
  static constexpr TokenId kEosId = 1;
  static constexpr TokenId kMaskId = 2;
  static constexpr TokenId kBosId = 3;
  static constexpr TokenId kUnkId = 4;

  Vocabulary();
  /// Sentinels first, then the remaining distinct tokens in sorted order.
  static Vocabulary from_tokens(const std::vector<Token>& tokens);
  /// Exact id order, e.g. when loading an artifact. Sentinels must lead.
  static Vocabulary from_ordered(std::vector<Token> tokens);

  std::size_t size() const { return tokens_.size(); }
  const Token& token(TokenId id) const;
  std::optional<TokenId> find(const Token& token) const;
  /// Unknown text tokens map to [UNK].
  TokenId encode(const Token& token) const;
  std::vector<TokenId> encode(const TokenSeq& tokens) const;
  TokenSeq decode(std::span<const TokenId> ids) const;
  const std::vector<Token>& tokens() const { return tokens_; }

  /// True for ids that can appear inside a lyric line.
  bool is_text(TokenId id) const;

  /// FNV-1a over the id-ordered token list; agreed at remote handshake.
  std::string hash() const;

 private:
  std::vector<Token> tokens_;
  std::unordered_map<Token, TokenId> index_;
};

class LmBackend {
 public:
  virtual ~LmBackend() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  /// Probability vector over vocabulary(); non-negative, sums to 1.
  /// Throws kInput for ids outside the vocabulary.
  virtual std::vector<double> next_distribution(std::span<const TokenId> context) const = 0;
  virtual double token_probability(std::span<const TokenId> context, TokenId token) const;
};

void check_ids(const Vocabulary& vocab, std::span<const TokenId> ids);

/// Sum over positions of log P(tokens[i] | tokens[0..i)).
double score_sequence(const LmBackend& model, std::span<const TokenId> tokens);

}  // namespace lyrica
