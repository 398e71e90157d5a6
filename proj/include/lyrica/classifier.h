#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "lyrica/tokens.h"

namespace lyrica {

struct LabeledDoc {
  TokenSeq tokens;
  std::string label;
  double weight = 1.0;
};

/// Multinomial naive Bayes with add-one smoothing over the training vocabulary.
/// Tokens never seen in training are ignored at prediction time.
class TextClassifier {
 public:
  TextClassifier() = default;

  const std::vector<std::string>& classes() const { return classes_; }
  bool has_class(const std::string& label) const;

  /// Posterior over classes(), same order. Sums to 1.
  std::vector<double> posterior(const TokenSeq& doc) const;
  double probability(const TokenSeq& doc, const std::string& label) const;
  std::string predict(const TokenSeq& doc) const;

  double log_prior(const std::string& label) const;
  /// Smoothed log P(token | label); tokens outside the vocabulary return 0.
  double log_likelihood(const std::string& label, const Token& token) const;
  std::size_t vocabulary_size() const { return vocab_size_; }

  nlohmann::json to_json() const;
  static TextClassifier from_json(const nlohmann::json& j);

  friend TextClassifier train_classifier(const std::vector<LabeledDoc>& docs);

 private:
  std::vector<std::string> classes_;
  std::vector<double> log_priors_;
  std::vector<std::map<Token, double>> log_likelihoods_;  // per class, seen tokens only
  std::vector<double> log_unseen_;                        // per class, in-vocab token with 0 count
  std::set<Token> vocab_;
  std::size_t vocab_size_ = 0;

  std::size_t index_of(const std::string& label) const;
};

/// Throws kTraining unless there are at least two classes.
TextClassifier train_classifier(const std::vector<LabeledDoc>& docs);

/// Classification features of lyric text: graphemes, minus whitespace and
/// punctuation.
TokenSeq document_tokens(const std::vector<std::string>& lines);

}  // namespace lyrica
