#include "lyrica/rhyme.h"

#include <fstream>
#include <sstream>

#include "lyrica/error.h"

namespace lyrica {

void RhymeTable::add(const Grapheme& grapheme, const std::string& group) {
  if (graphemes(grapheme).size() != 1) {
    throw Error(ErrorCode::kConfiguration, "rhyme entry '" + grapheme + "' is not a single grapheme");
  }
  if (group.empty()) throw Error(ErrorCode::kConfiguration, "empty rhyme group id");
  const auto [it, inserted] = map_.emplace(grapheme, group);
  if (!inserted && it->second != group) {
    throw Error(ErrorCode::kConfiguration, "grapheme '" + grapheme + "' is in both rhyme groups " +
                                               it->second + " and " + group);
  }
  groups_.insert(group);
}

std::string RhymeTable::group_of(const Grapheme& grapheme) const {
  const auto it = map_.find(grapheme);
  return it == map_.end() ? std::string() : it->second;
}

std::vector<Grapheme> RhymeTable::members(const std::string& group) const {
  std::vector<Grapheme> out;
  for (const auto& [g, grp] : map_) {
    if (grp == group) out.push_back(g);
  }
  return out;
}

RhymeTable RhymeTable::parse(const std::string& tsv) {
  RhymeTable table;
  std::istringstream in(tsv);
  std::string row;
  std::size_t row_no = 0;
  while (std::getline(in, row)) {
    ++row_no;
    if (!row.empty() && row.back() == '\r') row.pop_back();
    if (row.empty() || row.front() == '#') continue;
    const auto tab = row.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kConfiguration, "rhyme table row " + std::to_string(row_no) + " has no tab");
    }
    table.add(row.substr(0, tab), trim(row.substr(tab + 1)));
  }
  return table;
}

RhymeTable RhymeTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot read rhyme table: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RhymeTable::to_tsv() const {
  std::string out;
  for (const auto& [g, grp] : map_) out += g + "\t" + grp + "\n";
  return out;
}

}  // namespace lyrica
