/**
 * @file rank.h
 * @brief Candidate re-ranking.
 *
 * Candidates that reuse three or more corpus lines are rejected outright.
 * Survivors are scored by keyword hits (n / n_max over survivors), style
 * relevance (classifier posterior of the target style) and diversity
 * (1 - repeated lines / lines), combined as a weighted sum and sorted
 * descending with decode order breaking ties.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lyrica/classifier.h"
#include "lyrica/corpus.h"
#include "lyrica/decode.h"
#include "lyrica/text.h"

namespace lyrica {

struct RankWeights {
  double keyword_hit = 1.0;
  double style = 1.0;
  double diversity = 1.0;
};

struct Candidate {
  LyricsText lyrics;
  double s_kh = 0.0;
  double s_sr = 0.0;
  double s_div = 0.0;
  double s_rank = 0.0;
  std::optional<std::string> rejected;
  std::vector<std::string> overlapping_lines;
  std::size_t decode_index = 0;
  std::vector<Violation> violations;
};

struct DuplicateCheck {
  bool rejected = false;
  std::vector<std::string> overlapping;
};

inline constexpr std::size_t kDuplicateLineLimit = 3;

DuplicateCheck duplicate_check(const LyricsText& candidate, const LineIndex& index);

std::vector<double> keyword_hit(const std::vector<LyricsText>& candidates,
                                const std::vector<std::string>& keywords);

/// Throws kInput if `target_style` is not a classifier class.
double style_relevance(const LyricsText& candidate, const TextClassifier& clf,
                       const std::string& target_style);

double diversity(const LyricsText& candidate);

double combine(double s_kh, double s_sr, double s_div, const RankWeights& w);

struct RankContext {
  const LineIndex& line_index;
  const TextClassifier& style_classifier;
};

/// Survivors first (by s_rank, stable), then rejected candidates in decode
/// order with their reasons.
std::vector<Candidate> rerank(const std::vector<LyricsText>& candidates, const ControlSpec& spec,
                              const RankContext& ctx, const RankWeights& weights = {});

}  // namespace lyrica
