#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lyrica/corpus.h"

namespace lyrica {

/// Song-level pointwise mutual information between content words:
///
///   PMI(a, b) = log( p(a, b) / (p(a) * p(b)) )
///
/// with p(w) the fraction of songs containing w and p(a, b) the fraction
/// containing both. Only words in at least `min_count` songs take part, and
/// only pairs with PMI >= threshold are stored (in both directions).
class PmiTable {
 public:
  PmiTable() = default;

  double threshold() const { return threshold_; }
  std::size_t min_count() const { return min_count_; }
  std::size_t song_count() const { return songs_; }
  const std::map<std::string, std::size_t>& document_frequency() const { return df_; }

  std::optional<double> pmi(const std::string& a, const std::string& b) const;
  const std::map<std::string, double>& neighbors(const std::string& w) const;
  std::size_t pair_count() const;  // unordered pairs

  nlohmann::json to_json() const;
  static PmiTable from_json(const nlohmann::json& j);

  friend PmiTable build_pmi(const std::vector<AnnotatedSong>& songs, std::size_t min_count,
                            double threshold);

 private:
  double threshold_ = 1.0;
  std::size_t min_count_ = 3;
  std::size_t songs_ = 0;
  std::map<std::string, std::size_t> df_;  // words meeting min_count
  std::map<std::string, std::map<std::string, double>> pairs_;
};

/// Uses each song's keyword set as its content words. Throws kTraining on an
/// empty corpus.
PmiTable build_pmi(const std::vector<AnnotatedSong>& songs, std::size_t min_count = 3,
                   double threshold = 1.0);

/// theme name -> seed words
using ThemeConfig = std::map<std::string, std::vector<std::string>>;

/// {"themes": {"name": ["seed", ...], ...}}
ThemeConfig load_themes(const std::string& path);
ThemeConfig parse_themes(const nlohmann::json& j);

/// Union of PMI partners of the seed words, seeds removed, ordered by
/// descending best PMI then by word.
std::vector<std::string> theme_keywords(const PmiTable& table, const std::vector<std::string>& seeds);

/// Shuffles deterministically and keeps the first min(m, |list|).
std::vector<std::string> sample_theme_keywords(const std::vector<std::string>& list, std::size_t m,
                                               std::uint64_t rng_seed);

}  // namespace lyrica
