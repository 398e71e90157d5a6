/**
 * @file corpus.h
 * @brief Corpus ingestion, annotation and training-example construction.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lyrica/text.h"
#include "lyrica/tokens.h"

namespace lyrica {

class TextClassifier;

inline const std::vector<std::string> kDefaultStyles = {"Pop", "Hip-hop", "Chinese Neo-traditional",
                                                        "Folk"};
inline const std::vector<std::string> kEmotions = {"positive", "negative", "neutral"};

struct Song {
  std::string id;
  std::string style;
  std::optional<std::string> emotion;
  std::vector<std::string> lines;
};

struct AnnotatedSong {
  Song song;
  std::string emotion;
  std::vector<std::string> keywords;
};

/// Seq2seq-shaped example: source is "style [SEP] emotion [SEP] kw ...",
/// target is the lines in last-char-first order joined by [SEP] plus [EOS].
struct TrainingExample {
  TokenSeq source;
  TokenSeq target;

  bool operator==(const TrainingExample&) const = default;
};

struct CorpusLoad {
  std::vector<Song> songs;
  std::vector<std::string> diagnostics;  // one entry per rejected record
};

/// Reads a JSON-lines corpus. Records with unknown style, invalid emotion or
/// malformed shape are rejected with a diagnostic; the rest keep file order.
/// `require_emotion` is used for the emotion seed-label file.
CorpusLoad load_corpus(const std::string& path,
                       const std::vector<std::string>& styles = kDefaultStyles,
                       bool require_emotion = false);

/// Parses one corpus record. Throws kInput describing the defect.
Song parse_song(std::string_view json_line, const std::vector<std::string>& styles,
                bool require_emotion);

std::string song_to_json_line(const Song& song);

std::vector<AnnotatedSong> annotate(const std::vector<Song>& songs,
                                    const TextClassifier* emotion_clf, const Segmenter& segmenter,
                                    const std::unordered_set<std::string>& stoplist);

std::string annotated_to_json_line(const AnnotatedSong& song);
std::vector<AnnotatedSong> load_annotated(const std::string& path);

struct KeywordCountRange {
  std::size_t min = 1;
  std::size_t max = 8;
};

std::vector<TrainingExample> build_examples(const std::vector<AnnotatedSong>& annotated,
                                            std::size_t samples_per_song,
                                            KeywordCountRange keyword_counts,
                                            std::uint64_t rng_seed);

/// Moves the last token to the front: [a,b,c,d] -> [d,a,b,c].
TokenSeq transform_line(const TokenSeq& line);
/// Inverse of transform_line: [d,a,b,c] -> [a,b,c,d].
TokenSeq invert_line(const TokenSeq& line);

TokenSeq source_tokens(std::string_view style, std::string_view emotion,
                       const std::vector<std::string>& keywords);
TokenSeq target_tokens(const std::vector<std::string>& lines);

/// Membership over normalized corpus lines.
class LineIndex {
 public:
  LineIndex() = default;
  explicit LineIndex(std::unordered_set<std::string> normalized) : lines_(std::move(normalized)) {}

  bool contains(std::string_view line) const;
  std::size_t size() const { return lines_.size(); }
  const std::unordered_set<std::string>& normalized_lines() const { return lines_; }

 private:
  std::unordered_set<std::string> lines_;
};

LineIndex build_line_index(const std::vector<Song>& songs);

}  // namespace lyrica
