#include <algorithm>
#include <map>

#include "lyrica/oracle.h"

namespace lyrica::oracle {

namespace {

bool ends_with_at(const std::vector<std::string>& seq, std::size_t pos,
                  const std::vector<std::string>& hist) {
  if (pos < hist.size()) return false;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    if (seq[pos - hist.size() + k] != hist[k]) return false;
  }
  return true;
}

}  // namespace

std::vector<double> ngram_distribution(const std::vector<std::vector<std::string>>& sequences,
                                       const std::vector<std::string>& vocab, int order,
                                       const std::vector<std::string>& context) {
  std::vector<double> p(vocab.size(), 1.0 / static_cast<double>(vocab.size()));
  const std::size_t longest = std::min(static_cast<std::size_t>(order - 1), context.size());
  for (std::size_t h = 0; h <= longest; ++h) {
    const std::vector<std::string> hist(context.end() - static_cast<std::ptrdiff_t>(h), context.end());
    std::map<std::string, double> follow;
    double total = 0.0;
    for (const auto& seq : sequences) {
      for (std::size_t i = 0; i < seq.size(); ++i) {
        if (ends_with_at(seq, i, hist)) {
          follow[seq[i]] += 1.0;
          total += 1.0;
        }
      }
    }
    if (total == 0.0) break;
    const double types = static_cast<double>(follow.size());
    for (std::size_t w = 0; w < vocab.size(); ++w) {
      const auto it = follow.find(vocab[w]);
      const double c = it == follow.end() ? 0.0 : it->second;
      p[w] = (c + types * p[w]) / (total + types);
    }
  }
  return p;
}

}  // namespace lyrica::oracle
