/**
 * @file decode.h
 * @brief Format-constrained top-k sampling.
 *
 * Lines are decoded in last-char-first order: within a line, position 0 is the
 * line-final (rhyming) grapheme, position 1 the line-initial grapheme, and
 * the rest follow left to right. Constraints are hard masks in probability
 * space:
 *
 *  - [SEP]/[EOS] are impossible until the line reaches its target length and
 *    forced once it does;
 *  - at position 0 only graphemes of the requested rhyme group survive;
 *  - at the acrostic position (1, or 0 for one-grapheme lines) the acrostic
 *    grapheme is forced. On a one-grapheme line the acrostic wins over the
 *    rhyme and the conflict is recorded as a violation.
 */
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyrica/lm.h"
#include "lyrica/rhyme.h"
#include "lyrica/rng.h"
#include "lyrica/text.h"

namespace lyrica {

struct ControlSpec {
  std::string style;
  std::string emotion;
  std::optional<std::string> theme;
  std::vector<std::string> keywords;
  std::optional<std::vector<Grapheme>> acrostic;
  std::optional<std::string> rhyme_group;
  std::size_t num_lines = 4;
  /// One entry means "every line"; otherwise exactly num_lines entries.
  std::vector<std::size_t> words_per_line{5};

  std::size_t line_length(std::size_t line) const {
    return words_per_line.size() == 1 ? words_per_line.front() : words_per_line.at(line);
  }
  std::size_t max_line_length() const;
};

/// Structural checks only (counts, list lengths). Throws kValidation naming
/// the offending field.
void validate_shape(const ControlSpec& spec);

struct Violation {
  std::size_t line = 0;
  std::string constraint;  // "rhyme"
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct DecodeState {
  std::vector<TokenId> emitted;  // transformed order, this decode only
  std::size_t line_index = 0;
  std::size_t pos_in_line = 0;
  /// Lines [first_line, end_line) are decoded. end_line == num_lines means
  /// the lyric ends with [EOS]; otherwise the last decoded line ends with [SEP].
  std::size_t end_line = 0;
  bool done = false;
};

struct Constrained {
  std::vector<double> probs;
  std::optional<Violation> violation;
};

/// Precomputed masks for one (spec, rhyme table, vocabulary). Construction
/// throws kConstraintUnsatisfiable if a requested rhyme group or acrostic
/// grapheme has no counterpart in the vocabulary.
class FormatConstraints {
 public:
  FormatConstraints(const ControlSpec& spec, const RhymeTable& rhyme, const Vocabulary& vocab);

  Constrained apply(const DecodeState& state, const std::vector<double>& dist) const;
  const ControlSpec& spec() const { return spec_; }

 private:
  ControlSpec spec_;
  const Vocabulary* vocab_;
  std::vector<char> text_;        // id can appear inside a line
  std::vector<char> edge_ok_;     // id can be a line's first or last grapheme
  std::vector<char> rhyme_ok_;    // empty when no rhyme group
  std::vector<TokenId> acrostic_;
  std::string rhyme_group_;
};

Constrained constrain_logits(const DecodeState& state, const ControlSpec& spec,
                             const RhymeTable& rhyme, const Vocabulary& vocab,
                             const std::vector<double>& dist);

struct DecodeParams {
  std::size_t top_k = 16;
  double temperature = 1.0;
  std::size_t n_candidates = 3;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct Decoded {
  TokenSeq tokens;  // transformed order, terminated by [EOS] or [SEP]
  std::vector<Violation> violations;
};

/// Full-lyric decoding from "source ++ [BOS]". Candidate i uses seed + i.
std::vector<Decoded> sample_constrained(const LmBackend& model, const TokenSeq& source,
                                        const ControlSpec& spec, const RhymeTable& rhyme,
                                        const DecodeParams& params, std::uint64_t rng_seed);

/// Decodes lines [first_line, end_line) after an arbitrary context (which
/// must already end where a new line starts).
std::vector<Decoded> sample_lines(const LmBackend& model, const TokenSeq& context,
                                  const ControlSpec& spec, const RhymeTable& rhyme,
                                  std::size_t first_line, std::size_t end_line,
                                  const DecodeParams& params, std::uint64_t rng_seed);

/// Picks one id from a constrained distribution: top-k by probability (ties
/// by lower id), temperature, renormalize, sample. Zero-probability ids are
/// never returned.
TokenId sample_top_k(const std::vector<double>& probs, std::size_t k, double temperature, Rng& rng);

/// Inverts the line transform on an [EOS]-terminated candidate.
LyricsText untransform(const TokenSeq& candidate);
/// Same, also accepting a trailing [SEP] (partial continuation output).
LyricsText untransform_segments(const TokenSeq& candidate);

/// Checks natural-order lines against the format part of `spec`, for lines
/// numbered from `first_line`.
std::vector<Violation> check_format(const LyricsText& lyrics, const ControlSpec& spec,
                                    const RhymeTable& rhyme, std::size_t first_line = 0);

}  // namespace lyrica
