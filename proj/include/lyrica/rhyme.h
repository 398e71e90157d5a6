#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "lyrica/text.h"

namespace lyrica {

/// Grapheme -> rhyme group. Each grapheme belongs to at most one group.
class RhymeTable {
 public:
  RhymeTable() = default;

  /// Throws kConfiguration if `grapheme` is already mapped to another group.
  void add(const Grapheme& grapheme, const std::string& group);

  bool has_group(const std::string& group) const { return groups_.contains(group); }
  const std::set<std::string>& groups() const { return groups_; }
  /// Empty string if unmapped.
  std::string group_of(const Grapheme& grapheme) const;
  std::vector<Grapheme> members(const std::string& group) const;
  const std::map<Grapheme, std::string>& entries() const { return map_; }

  /// Rows "grapheme<TAB>group_id"; '#' comments and blank rows are skipped.
  static RhymeTable load(const std::string& path);
  static RhymeTable parse(const std::string& tsv);
  std::string to_tsv() const;

 private:
  std::map<Grapheme, std::string> map_;
  std::set<std::string> groups_;
};

}  // namespace lyrica
