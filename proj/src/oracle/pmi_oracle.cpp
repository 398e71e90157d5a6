#include <algorithm>
#include <cmath>
#include <set>

#include "lyrica/oracle.h"

namespace lyrica::oracle {

namespace {

bool has(const std::vector<std::string>& doc, const std::string& w) {
  return std::find(doc.begin(), doc.end(), w) != doc.end();
}

}  // namespace

std::map<std::pair<std::string, std::string>, double> pmi_all_pairs(
    const std::vector<std::vector<std::string>>& documents, std::size_t min_count) {
  std::set<std::string> words;
  for (const auto& d : documents) words.insert(d.begin(), d.end());
  const std::vector<std::string> vocab(words.begin(), words.end());
  const double n = static_cast<double>(documents.size());

  auto df = [&](const std::string& w) {
    return static_cast<double>(
        std::count_if(documents.begin(), documents.end(), [&](const auto& d) { return has(d, w); }));
  };

  std::map<std::pair<std::string, std::string>, double> out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    for (std::size_t j = i + 1; j < vocab.size(); ++j) {
      const double da = df(vocab[i]);
      const double db = df(vocab[j]);
      if (da < static_cast<double>(min_count) || db < static_cast<double>(min_count)) continue;
      double both = 0.0;
      for (const auto& d : documents) {
        if (has(d, vocab[i]) && has(d, vocab[j])) both += 1.0;
      }
      if (both == 0.0) continue;
      out[{vocab[i], vocab[j]}] = std::log((both / n) / ((da / n) * (db / n)));
    }
  }
  return out;
}

}  // namespace lyrica::oracle
