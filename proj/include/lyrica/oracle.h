/**
 * @file oracle.h
 * @brief Slow, direct reference implementations for cross-checking the
 * n-gram model and the PMI table. They share no code with the real ones:
 * counts are recomputed by scanning the raw data for every query.
 */
#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lyrica::oracle {

/// Interpolated Witten-Bell estimate of every token in `vocab` after
/// `context`, counting n-grams by scanning `sequences` for each history.
std::vector<double> ngram_distribution(const std::vector<std::vector<std::string>>& sequences,
                                       const std::vector<std::string>& vocab, int order,
                                       const std::vector<std::string>& context);

/// PMI of every pair of words (a < b) that co-occur in at least one
/// document, with both words present in at least `min_count` documents.
/// Enumerates all word pairs and scans every document for each.
std::map<std::pair<std::string, std::string>, double> pmi_all_pairs(
    const std::vector<std::vector<std::string>>& documents, std::size_t min_count);

}  // namespace lyrica::oracle
