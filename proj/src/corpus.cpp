#include "lyrica/corpus.h"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "lyrica/classifier.h"
#include "lyrica/error.h"
#include "lyrica/rng.h"

namespace lyrica {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

Song parse_song(std::string_view json_line, const std::vector<std::string>& styles,
                bool require_emotion) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInput, std::string("malformed record: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kInput, "record is not an object");

  Song song;
  if (!j.contains("id") || !j["id"].is_string()) throw Error(ErrorCode::kInput, "missing id");
  song.id = j["id"].get<std::string>();
  if (!j.contains("style") || !j["style"].is_string()) {
    throw Error(ErrorCode::kInput, "song " + song.id + ": missing style");
  }
  song.style = j["style"].get<std::string>();
  if (!contains(styles, song.style)) {
    throw Error(ErrorCode::kInput, "song " + song.id + ": unknown style '" + song.style + "'");
  }
  if (j.contains("emotion") && !j["emotion"].is_null()) {
    if (!j["emotion"].is_string() || !contains(kEmotions, j["emotion"].get<std::string>())) {
      throw Error(ErrorCode::kInput, "song " + song.id + ": invalid emotion");
    }
    song.emotion = j["emotion"].get<std::string>();
  } else if (require_emotion) {
    throw Error(ErrorCode::kInput, "song " + song.id + ": emotion label required");
  }
  if (!j.contains("lines") || !j["lines"].is_array() || j["lines"].empty()) {
    throw Error(ErrorCode::kInput, "song " + song.id + ": lines must be a non-empty array");
  }
  for (const auto& l : j["lines"]) {
    if (!l.is_string()) throw Error(ErrorCode::kInput, "song " + song.id + ": non-string line");
    auto t = trim(l.get<std::string>());
    if (t.empty()) throw Error(ErrorCode::kInput, "song " + song.id + ": empty line");
    song.lines.push_back(std::move(t));
  }
  return song;
}

CorpusLoad load_corpus(const std::string& path, const std::vector<std::string>& styles,
                       bool require_emotion) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot read corpus: " + path);
  CorpusLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.songs.push_back(parse_song(line, styles, require_emotion));
    } catch (const Error& e) {
      out.diagnostics.push_back(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (out.songs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no valid songs in " + path);
  return out;
}

std::string song_to_json_line(const Song& song) {
  nlohmann::json j;
  j["id"] = song.id;
  j["style"] = song.style;
  if (song.emotion) j["emotion"] = *song.emotion;
  j["lines"] = song.lines;
  return j.dump();
}

std::vector<AnnotatedSong> annotate(const std::vector<Song>& songs,
                                    const TextClassifier* emotion_clf, const Segmenter& segmenter,
                                    const std::unordered_set<std::string>& stoplist) {
  std::vector<AnnotatedSong> out;
  out.reserve(songs.size());
  for (const auto& song : songs) {
    AnnotatedSong a;
    a.song = song;
    if (song.emotion) {
      a.emotion = *song.emotion;
    } else if (emotion_clf != nullptr) {
      a.emotion = emotion_clf->predict(document_tokens(song.lines));
    } else {
      throw Error(ErrorCode::kConfiguration,
                  "song " + song.id + " has no emotion label and no emotion classifier is configured");
    }
    std::unordered_set<std::string> seen;
    for (const auto& line : song.lines) {
      for (auto& w : segmenter.words(graphemes(line))) {
        if (stoplist.contains(w) || seen.contains(w)) continue;
        const auto gs = graphemes(w);
        if (std::all_of(gs.begin(), gs.end(), [](const Grapheme& g) {
              return is_punctuation(g) || is_whitespace(g);
            })) {
          continue;
        }
        seen.insert(w);
        a.keywords.push_back(std::move(w));
      }
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::string annotated_to_json_line(const AnnotatedSong& song) {
  auto j = nlohmann::json::parse(song_to_json_line(song.song));
  j["emotion"] = song.emotion;
  j["keywords"] = song.keywords;
  return j.dump();
}

std::vector<AnnotatedSong> load_annotated(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot read annotated corpus: " + path);
  std::vector<AnnotatedSong> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    AnnotatedSong a;
    a.song.id = j.at("id").get<std::string>();
    a.song.style = j.at("style").get<std::string>();
    a.song.lines = j.at("lines").get<std::vector<std::string>>();
    a.emotion = j.at("emotion").get<std::string>();
    a.song.emotion = a.emotion;
    a.keywords = j.at("keywords").get<std::vector<std::string>>();
    out.push_back(std::move(a));
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyCorpus, "no songs in " + path);
  return out;
}

TokenSeq transform_line(const TokenSeq& line) {
  if (line.empty()) throw Error(ErrorCode::kInput, "cannot transform an empty line");
  TokenSeq out;
  out.reserve(line.size());
  out.push_back(line.back());
  out.insert(out.end(), line.begin(), line.end() - 1);
  return out;
}

TokenSeq invert_line(const TokenSeq& line) {
  if (line.empty()) throw Error(ErrorCode::kInput, "cannot invert an empty line");
  TokenSeq out(line.begin() + 1, line.end());
  out.push_back(line.front());
  return out;
}

TokenSeq source_tokens(std::string_view style, std::string_view emotion,
                       const std::vector<std::string>& keywords) {
  TokenSeq out{attribute_tag(style), Token(kSep), attribute_tag(emotion)};
  for (const auto& kw : keywords) {
    out.emplace_back(kSep);
    for (auto& g : graphemes(kw)) out.push_back(std::move(g));
  }
  return out;
}

TokenSeq target_tokens(const std::vector<std::string>& lines) {
  TokenSeq out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.emplace_back(kSep);
    const auto t = transform_line(graphemes(lines[i]));
    out.insert(out.end(), t.begin(), t.end());
  }
  out.emplace_back(kEos);
  return out;
}

std::vector<TrainingExample> build_examples(const std::vector<AnnotatedSong>& annotated,
                                            std::size_t samples_per_song,
                                            KeywordCountRange keyword_counts,
                                            std::uint64_t rng_seed) {
  if (samples_per_song == 0) throw Error(ErrorCode::kInput, "samples_per_song must be >= 1");
  Rng rng(rng_seed);
  std::vector<TrainingExample> out;
  out.reserve(annotated.size() * samples_per_song);
  for (const auto& a : annotated) {
    const auto target = target_tokens(a.song.lines);
    const std::size_t n = a.keywords.size();
    const std::size_t hi = std::min(keyword_counts.max, n);
    const std::size_t lo = std::min(keyword_counts.min, hi);
    for (std::size_t s = 0; s < samples_per_song; ++s) {
      const std::size_t count = static_cast<std::size_t>(rng.between(lo, hi));
      // Selection sampling keeps first-occurrence order.
      std::vector<std::string> picked;
      std::size_t needed = count;
      for (std::size_t i = 0; i < n && needed > 0; ++i) {
        if (rng.below(n - i) < needed) {
          picked.push_back(a.keywords[i]);
          --needed;
        }
      }
      out.push_back({source_tokens(a.song.style, a.emotion, picked), target});
    }
  }
  return out;
}

bool LineIndex::contains(std::string_view line) const {
  return lines_.contains(normalize_line(line));
}

LineIndex build_line_index(const std::vector<Song>& songs) {
  std::unordered_set<std::string> lines;
  for (const auto& s : songs) {
    for (const auto& l : s.lines) {
      auto n = normalize_line(l);
      if (!n.empty()) lines.insert(std::move(n));
    }
  }
  return LineIndex(std::move(lines));
}

}  // namespace lyrica
