#include "lyrica/pmi.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "lyrica/error.h"
#include "lyrica/rng.h"

namespace lyrica {

PmiTable build_pmi(const std::vector<AnnotatedSong>& songs, std::size_t min_count, double threshold) {
  if (songs.empty()) throw Error(ErrorCode::kTraining, "cannot build PMI table from an empty corpus");
  if (min_count < 1) throw Error(ErrorCode::kTraining, "min_count must be >= 1");

  std::vector<std::set<std::string>> docs;
  std::map<std::string, std::size_t> df;
  for (const auto& s : songs) {
    std::set<std::string> words(s.keywords.begin(), s.keywords.end());
    for (const auto& w : words) ++df[w];
    docs.push_back(std::move(words));
  }

  PmiTable table;
  table.threshold_ = threshold;
  table.min_count_ = min_count;
  table.songs_ = songs.size();
  for (const auto& [w, n] : df) {
    if (n >= min_count) table.df_.emplace(w, n);
  }

  std::map<std::pair<std::string, std::string>, std::size_t> joint;
  for (const auto& d : docs) {
    std::vector<const std::string*> kept;
    for (const auto& w : d) {
      if (table.df_.contains(w)) kept.push_back(&w);
    }
    for (std::size_t i = 0; i < kept.size(); ++i) {
      for (std::size_t j = i + 1; j < kept.size(); ++j) ++joint[{*kept[i], *kept[j]}];
    }
  }

  const double n = static_cast<double>(songs.size());
  for (const auto& [pair, c] : joint) {
    const double p_ab = static_cast<double>(c) / n;
    const double p_a = static_cast<double>(table.df_.at(pair.first)) / n;
    const double p_b = static_cast<double>(table.df_.at(pair.second)) / n;
    const double value = std::log(p_ab / (p_a * p_b));
    if (value >= threshold) {
      table.pairs_[pair.first][pair.second] = value;
      table.pairs_[pair.second][pair.first] = value;
    }
  }
  return table;
}

std::optional<double> PmiTable::pmi(const std::string& a, const std::string& b) const {
  const auto it = pairs_.find(a);
  if (it == pairs_.end()) return std::nullopt;
  const auto jt = it->second.find(b);
  if (jt == it->second.end()) return std::nullopt;
  return jt->second;
}

const std::map<std::string, double>& PmiTable::neighbors(const std::string& w) const {
  static const std::map<std::string, double> empty;
  const auto it = pairs_.find(w);
  return it == pairs_.end() ? empty : it->second;
}

std::size_t PmiTable::pair_count() const {
  std::size_t n = 0;
  for (const auto& [w, m] : pairs_) n += m.size();
  return n / 2;
}

nlohmann::json PmiTable::to_json() const {
  nlohmann::json j;
  j["threshold"] = threshold_;
  j["min_count"] = min_count_;
  j["songs"] = songs_;
  j["df"] = df_;
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, m] : pairs_) {
    for (const auto& [b, v] : m) {
      if (a < b) pairs.push_back({a, b, v});
    }
  }
  j["pairs"] = std::move(pairs);
  return j;
}

PmiTable PmiTable::from_json(const nlohmann::json& j) {
  PmiTable t;
  t.threshold_ = j.at("threshold").get<double>();
  t.min_count_ = j.at("min_count").get<std::size_t>();
  t.songs_ = j.at("songs").get<std::size_t>();
  t.df_ = j.at("df").get<std::map<std::string, std::size_t>>();
  for (const auto& p : j.at("pairs")) {
    const auto a = p.at(0).get<std::string>();
    const auto b = p.at(1).get<std::string>();
    const auto v = p.at(2).get<double>();
    t.pairs_[a][b] = v;
    t.pairs_[b][a] = v;
  }
  return t;
}

ThemeConfig parse_themes(const nlohmann::json& j) {
  ThemeConfig out;
  const auto& themes = j.at("themes");
  if (!themes.is_object()) throw Error(ErrorCode::kConfiguration, "themes must be an object");
  for (const auto& [name, seeds] : themes.items()) {
    auto list = seeds.get<std::vector<std::string>>();
    if (list.empty()) throw Error(ErrorCode::kConfiguration, "theme '" + name + "' has no seed words");
    out.emplace(name, std::move(list));
  }
  return out;
}

ThemeConfig load_themes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot read theme config: " + path);
  try {
    return parse_themes(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, "malformed theme config " + path + ": " + e.what());
  }
}

std::vector<std::string> theme_keywords(const PmiTable& table, const std::vector<std::string>& seeds) {
  const std::set<std::string> seed_set(seeds.begin(), seeds.end());
  std::map<std::string, double> best;
  for (const auto& s : seed_set) {
    for (const auto& [w, v] : table.neighbors(s)) {
      if (seed_set.contains(w)) continue;
      auto [it, inserted] = best.emplace(w, v);
      if (!inserted) it->second = std::max(it->second, v);
    }
  }
  std::vector<std::pair<std::string, double>> ranked(best.begin(), best.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> out;
  out.reserve(ranked.size());
  for (auto& [w, v] : ranked) out.push_back(std::move(w));
  return out;
}

std::vector<std::string> sample_theme_keywords(const std::vector<std::string>& list, std::size_t m,
                                               std::uint64_t rng_seed) {
  std::vector<std::string> out = list;
  Rng rng(rng_seed);
  rng.shuffle(out);
  out.resize(std::min(m, out.size()));
  return out;
}

}  // namespace lyrica
