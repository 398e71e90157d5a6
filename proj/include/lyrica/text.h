/**
 * @file text.h
 * @brief Grapheme tokenization, line normalization and word segmentation.
 *
 * Lyric text is tokenized into extended grapheme clusters. Concatenating the
 * clusters of a string reproduces it byte for byte, so every transformation
 * that works on graphemes can be undone exactly.
 */
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace lyrica {

using Grapheme = std::string;
using Line = std::vector<Grapheme>;

/// Splits UTF-8 text into grapheme clusters. Throws kInput on invalid UTF-8.
std::vector<Grapheme> graphemes(std::string_view text);

std::string join(const std::vector<Grapheme>& tokens);

bool is_whitespace(std::string_view grapheme);
bool is_punctuation(std::string_view grapheme);

/// Trims, collapses internal whitespace, strips punctuation and case-folds.
/// Two lines are "the same line" for duplicate and repetition checks iff
/// their normalized forms are equal.
std::string normalize_line(std::string_view line);

std::string trim(std::string_view text);

/// A word located inside a line, as a half-open grapheme range.
struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string text;
};

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  /// Words in order of appearance. Whitespace and punctuation never belong
  /// to a word.
  virtual std::vector<WordSpan> segment(const Line& line) const = 0;

  std::vector<std::string> words(const Line& line) const;
};

/// Maximal runs of non-whitespace, non-punctuation graphemes.
class WhitespaceSegmenter final : public Segmenter {
 public:
  std::vector<WordSpan> segment(const Line& line) const override;
};

/// Greedy longest match against a lexicon inside each whitespace run.
/// Graphemes not covered by any entry become single-grapheme words.
class LexiconSegmenter final : public Segmenter {
 public:
  explicit LexiconSegmenter(const std::vector<std::string>& entries);

  std::vector<WordSpan> segment(const Line& line) const override;

 private:
  std::unordered_set<std::string> entries_;
  std::size_t max_len_ = 1;
};

/// A lyric as lines of graphemes, in natural reading order.
struct LyricsText {
  std::vector<Line> lines;

  static LyricsText from_strings(const std::vector<std::string>& lines);
  std::vector<std::string> to_strings() const;
  bool operator==(const LyricsText&) const = default;
};

/// One UTF-8 entry per line; blank lines and lines starting with '#' skipped.
std::vector<std::string> read_word_list(const std::string& path);

}  // namespace lyrica
