/**
 * @file pipeline.h
 * @brief Full-text generation, interactive continuation and revision.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyrica/bundle.h"
#include "lyrica/decode.h"
#include "lyrica/error.h"
#include "lyrica/rank.h"

namespace lyrica {

struct GenerationOptions {
  DecodeParams decode;
  RankWeights weights;
  std::size_t oversample = 3;
  std::size_t max_retries = 2;
  std::size_t theme_keyword_count = 4;
};

struct GenerationRequest {
  ControlSpec spec;
  std::optional<LyricsText> preceding;  // continuation only
  std::size_t k_lines = 1;
  std::size_t n_candidates = 3;
};

struct GenerationResult {
  TokenSeq source;
  std::vector<std::string> keywords;  // user keywords then sampled theme keywords
  std::vector<Candidate> candidates;  // best first, at most n_candidates
  std::vector<Candidate> rejected;
  std::uint64_t seed = 0;
  std::size_t rounds = 0;
};

/// Thrown when every candidate of every round was rejected.
class GenerationExhausted : public Error {
 public:
  GenerationExhausted(const std::string& message, std::vector<Candidate> rejected)
      : Error(ErrorCode::kGenerationExhausted, message), rejected_(std::move(rejected)) {}
  const std::vector<Candidate>& rejected() const { return rejected_; }

 private:
  std::vector<Candidate> rejected_;
};

/// Checks the spec against the bundle (known style, emotion, theme, rhyme
/// group) on top of validate_shape. Throws kValidation.
void validate_spec(const ControlSpec& spec, const TrainedBundle& bundle);

/// User keywords, then theme keywords sampled once per request, deduplicated.
std::vector<std::string> request_keywords(const ControlSpec& spec, const TrainedBundle& bundle,
                                          std::size_t theme_keyword_count, std::uint64_t rng_seed);

TokenSeq assemble_source(const ControlSpec& spec, const TrainedBundle& bundle,
                         std::uint64_t rng_seed, std::size_t theme_keyword_count = 4);

GenerationResult generate_full(const GenerationRequest& request, const TrainedBundle& bundle,
                               const GenerationOptions& options, std::uint64_t rng_seed);

/// "source [BOS] line_0' [SEP] ... line_i' [SEP]" with each preceding line
/// in last-char-first order.
TokenSeq continuation_context(const GenerationRequest& request, const TrainedBundle& bundle,
                              std::uint64_t rng_seed, std::size_t theme_keyword_count = 4);

/// Candidates hold only the new lines.
GenerationResult generate_continuation(const GenerationRequest& request, const TrainedBundle& bundle,
                                       const GenerationOptions& options, std::uint64_t rng_seed);

struct RevisionRequest {
  LyricsText lyrics;
  std::size_t line = 0;
  /// Grapheme range [begin, end) within the line for word-level revision;
  /// absent for sentence-level.
  std::optional<std::pair<std::size_t, std::size_t>> range;
  std::string style;
  std::size_t n_candidates = 3;
};

struct RevisionOptions {
  DecodeParams decode;
  std::size_t oversample = 3;
  std::size_t length_delta = 0;  // sentence level
  std::size_t word_length_slack = 1;
};

struct Suggestion {
  Line fill;
  LyricsText lyrics;  // request lyrics with the span replaced
  double score = 0.0;
};

struct RevisionResult {
  std::vector<Suggestion> suggestions;  // best first; empty means "no suggestions"
  std::uint64_t seed = 0;
};

void validate_revision(const RevisionRequest& request, const TrainedBundle& bundle);

/// Token sequence a revision candidate is scored on:
/// "<style> [BOS] line_0' [SEP] ... line_n' [EOS]".
TokenSeq revision_sequence(const std::string& style, const LyricsText& lyrics);

/// Replaces the span of `request` with `fill`.
LyricsText splice(const RevisionRequest& request, const Line& fill);

RevisionResult revise(const RevisionRequest& request, const TrainedBundle& bundle,
                      const RevisionOptions& options, std::uint64_t rng_seed);

/// One sentence-level and (when the song has words) one word-level masked
/// example per song: source "style [SEP] masked lyrics", target the span.
std::vector<TrainingExample> build_revision_examples(const std::vector<AnnotatedSong>& songs,
                                                     const Segmenter& segmenter,
                                                     std::uint64_t rng_seed);

}  // namespace lyrica
