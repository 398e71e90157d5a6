/**
 * @file bundle.h
 * @brief The immutable set of trained artifacts a generator runs against.
 *
 * On disk a bundle is a directory:
 *
 *   manifest.json   format/version, attribute sets, classifiers, PMI table,
 *                   themes and their mined keyword lists, rhyme table, corpus
 *                   line index and word lexicon
 *   model.ngram     the n-gram model (see NgramModel::save)
 */
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lyrica/classifier.h"
#include "lyrica/corpus.h"
#include "lyrica/lm.h"
#include "lyrica/ngram.h"
#include "lyrica/pmi.h"
#include "lyrica/rhyme.h"

namespace lyrica {

struct TrainConfig {
  int order = 4;
  std::size_t samples_per_song = 4;
  KeywordCountRange keyword_counts{};
  std::uint64_t seed = 1;
  std::size_t pmi_min_count = 3;
  double pmi_threshold = 1.0;
};

struct TrainedBundle {
  std::vector<std::string> styles;
  std::vector<std::string> emotions;
  std::shared_ptr<const NgramModel> ngram;
  /// What generation uses; the n-gram unless a remote backend is attached.
  std::shared_ptr<const LmBackend> lm;
  TextClassifier style_classifier;
  TextClassifier emotion_classifier;
  PmiTable pmi;
  ThemeConfig themes;
  std::map<std::string, std::vector<std::string>> theme_keyword_lists;
  RhymeTable rhyme;
  LineIndex line_index;
  std::vector<std::string> lexicon;  // distinct corpus words, sorted
  TrainConfig config;

  const Vocabulary& vocabulary() const { return lm->vocabulary(); }
  /// Rhyme groups with at least one member grapheme in the vocabulary.
  std::vector<std::string> usable_rhyme_groups() const;
};

/// Trains on the songs that carry an emotion label; the rest are skipped.
TextClassifier train_emotion_classifier(const std::vector<Song>& labeled);

/// `emotion_clf` is stored in the bundle when given; otherwise an emotion
/// classifier is trained on the annotated songs.
TrainedBundle train_bundle(const std::vector<AnnotatedSong>& songs, const Segmenter& segmenter,
                           const ThemeConfig& themes, const RhymeTable& rhyme,
                           const TrainConfig& config, const TextClassifier* emotion_clf = nullptr,
                           const std::vector<std::string>& styles = kDefaultStyles);

void save_bundle(const TrainedBundle& bundle, const std::string& dir);
/// Throws kConfiguration on a missing or version-mismatched artifact.
TrainedBundle load_bundle(const std::string& dir);

}  // namespace lyrica
