#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lyrica/corpus.h"
#include "lyrica/lm.h"

namespace lyrica {

/// Interpolated Witten-Bell n-gram model over the prefix-LM sequence
/// "source ++ [BOS] ++ target". The lowest level interpolates the unigram
/// with the uniform distribution, so every token has non-zero probability.
///
///   P(w | h) = (c(h, w) + N1+(h) * P(w | h')) / (c(h) + N1+(h))
///
/// where h' drops the oldest token of h, and a history with c(h) = 0 falls
/// straight through to P(w | h').
class NgramModel final : public LmBackend {
 public:
  struct History {
    std::uint64_t total = 0;
    std::vector<std::pair<TokenId, std::uint32_t>> followers;  // sorted by id
  };

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> next_distribution(std::span<const TokenId> context) const override;
  double token_probability(std::span<const TokenId> context, TokenId token) const override;

  int order() const { return order_; }
  /// nullptr if the history was never observed.
  const History* history(std::span<const TokenId> h) const;
  std::size_t history_count() const { return table_.size(); }

  void save(const std::string& path) const;
  static NgramModel load(const std::string& path);

  friend NgramModel fit_ngram(const std::vector<TrainingExample>& examples, int order,
                              const std::vector<Token>& extra_tokens);

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<TokenId>& k) const noexcept;
  };

  int order_ = 4;
  Vocabulary vocab_;
  std::unordered_map<std::vector<TokenId>, History, KeyHash> table_;
};

/// The training sequence for one example.
TokenSeq prefix_lm_sequence(const TrainingExample& example);

/// `extra_tokens` join the vocabulary without counts (e.g. rhyme-table graphemes
/// and attribute tags that must be encodable at inference time).
NgramModel fit_ngram(const std::vector<TrainingExample>& examples, int order,
                     const std::vector<Token>& extra_tokens = {});

}  // namespace lyrica
