#include "lyrica/rank.h"

#include <algorithm>
#include <unordered_set>

#include "lyrica/error.h"

namespace lyrica {

DuplicateCheck duplicate_check(const LyricsText& candidate, const LineIndex& index) {
  DuplicateCheck out;
  for (const auto& line : candidate.lines) {
    const auto text = join(line);
    if (index.contains(text)) out.overlapping.push_back(text);
  }
  out.rejected = out.overlapping.size() >= kDuplicateLineLimit;
  return out;
}

namespace {

bool contains_run(const Line& haystack, const std::vector<Grapheme>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

std::size_t hits(const LyricsText& candidate, const std::vector<std::vector<Grapheme>>& keywords) {
  std::size_t n = 0;
  for (const auto& kw : keywords) {
    const bool found = std::any_of(candidate.lines.begin(), candidate.lines.end(),
                                   [&](const Line& l) { return contains_run(l, kw); });
    if (found) ++n;
  }
  return n;
}

}  // namespace

std::vector<double> keyword_hit(const std::vector<LyricsText>& candidates,
                                const std::vector<std::string>& keywords) {
  std::vector<std::vector<Grapheme>> distinct;
  std::unordered_set<std::string> seen;
  for (const auto& k : keywords) {
    if (k.empty() || !seen.insert(k).second) continue;
    distinct.push_back(graphemes(k));
  }
  std::vector<std::size_t> n;
  n.reserve(candidates.size());
  for (const auto& c : candidates) n.push_back(hits(c, distinct));
  const std::size_t n_max = n.empty() ? 0 : *std::max_element(n.begin(), n.end());
  std::vector<double> out;
  out.reserve(n.size());
  for (auto x : n) {
    out.push_back(n_max == 0 ? 0.0 : static_cast<double>(x) / static_cast<double>(n_max));
  }
  return out;
}

double style_relevance(const LyricsText& candidate, const TextClassifier& clf,
                       const std::string& target_style) {
  if (!clf.has_class(target_style)) {
    throw Error(ErrorCode::kInput, "style '" + target_style + "' unknown to the style classifier", "style");
  }
  return clf.probability(document_tokens(candidate.to_strings()), target_style);
}

double diversity(const LyricsText& candidate) {
  if (candidate.lines.empty()) throw Error(ErrorCode::kInput, "candidate has no lines");
  std::unordered_set<std::string> seen;
  std::size_t repeats = 0;
  for (const auto& line : candidate.lines) {
    if (!seen.insert(normalize_line(join(line))).second) ++repeats;
  }
  return 1.0 - static_cast<double>(repeats) / static_cast<double>(candidate.lines.size());
}

double combine(double s_kh, double s_sr, double s_div, const RankWeights& w) {
  return w.keyword_hit * s_kh + w.style * s_sr + w.diversity * s_div;
}

std::vector<Candidate> rerank(const std::vector<LyricsText>& candidates, const ControlSpec& spec,
                              const RankContext& ctx, const RankWeights& weights) {
  if (weights.keyword_hit < 0 || weights.style < 0 || weights.diversity < 0) {
    throw Error(ErrorCode::kValidation, "rank weights must be non-negative", "weights");
  }
  std::vector<Candidate> survivors;
  std::vector<Candidate> rejected;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    Candidate c;
    c.lyrics = candidates[i];
    c.decode_index = i;
    auto dup = duplicate_check(c.lyrics, ctx.line_index);
    c.overlapping_lines = std::move(dup.overlapping);
    if (dup.rejected) {
      c.rejected = std::to_string(c.overlapping_lines.size()) + " lines overlap the training corpus";
      rejected.push_back(std::move(c));
    } else {
      survivors.push_back(std::move(c));
    }
  }

  std::vector<LyricsText> texts;
  for (const auto& c : survivors) texts.push_back(c.lyrics);
  const auto kh = keyword_hit(texts, spec.keywords);
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    auto& c = survivors[i];
    c.s_kh = kh[i];
    c.s_sr = style_relevance(c.lyrics, ctx.style_classifier, spec.style);
    c.s_div = diversity(c.lyrics);
    c.s_rank = combine(c.s_kh, c.s_sr, c.s_div, weights);
  }
  std::stable_sort(survivors.begin(), survivors.end(),
                   [](const Candidate& a, const Candidate& b) { return a.s_rank > b.s_rank; });
  for (auto& r : rejected) survivors.push_back(std::move(r));
  return survivors;
}

}  // namespace lyrica
