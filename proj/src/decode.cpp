#include "lyrica/decode.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lyrica/corpus.h"
#include "lyrica/error.h"

namespace lyrica {

std::size_t ControlSpec::max_line_length() const {
  return *std::max_element(words_per_line.begin(), words_per_line.end());
}

void validate_shape(const ControlSpec& spec) {
  if (spec.num_lines < 1) throw Error(ErrorCode::kValidation, "num_lines must be >= 1", "num_lines");
  if (spec.words_per_line.empty()) {
    throw Error(ErrorCode::kValidation, "words_per_line must not be empty", "words_per_line");
  }
  if (spec.words_per_line.size() != 1 && spec.words_per_line.size() != spec.num_lines) {
    throw Error(ErrorCode::kValidation, "words_per_line list must have num_lines entries",
                "words_per_line");
  }
  for (auto n : spec.words_per_line) {
    if (n < 1) throw Error(ErrorCode::kValidation, "every line length must be >= 1", "words_per_line");
  }
  if (spec.acrostic) {
    if (spec.acrostic->size() != spec.num_lines) {
      throw Error(ErrorCode::kValidation, "acrostic must have one grapheme per line", "acrostic");
    }
    for (const auto& g : *spec.acrostic) {
      if (graphemes(g).size() != 1 || is_whitespace(g)) {
        throw Error(ErrorCode::kValidation, "acrostic entries must be single visible graphemes",
                    "acrostic");
      }
    }
  }
}

FormatConstraints::FormatConstraints(const ControlSpec& spec, const RhymeTable& rhyme,
                                     const Vocabulary& vocab)
    : spec_(spec), vocab_(&vocab) {
  validate_shape(spec_);
  const std::size_t v = vocab.size();
  text_.assign(v, 0);
  edge_ok_.assign(v, 0);
  for (TokenId id = 0; id < v; ++id) {
    if (!vocab.is_text(id)) continue;
    text_[id] = 1;
    edge_ok_[id] = is_whitespace(vocab.token(id)) ? 0 : 1;
  }
  if (spec_.rhyme_group) {
    rhyme_group_ = *spec_.rhyme_group;
    if (!rhyme.has_group(rhyme_group_)) {
      throw Error(ErrorCode::kConstraintUnsatisfiable, "unknown rhyme group '" + rhyme_group_ + "'",
                  "rhyme_group");
    }
    rhyme_ok_.assign(v, 0);
    bool any = false;
    for (const auto& g : rhyme.members(rhyme_group_)) {
      const auto id = vocab.find(g);
      if (id && edge_ok_[*id]) {
        rhyme_ok_[*id] = 1;
        any = true;
      }
    }
    if (!any) {
      throw Error(ErrorCode::kConstraintUnsatisfiable,
                  "rhyme group '" + rhyme_group_ + "' has no graphemes in the model vocabulary",
                  "rhyme_group");
    }
  }
  if (spec_.acrostic) {
    for (const auto& g : *spec_.acrostic) {
      const auto id = vocab.find(g);
      if (!id || !edge_ok_[*id]) {
        throw Error(ErrorCode::kConstraintUnsatisfiable,
                    "acrostic grapheme '" + g + "' is not in the model vocabulary", "acrostic");
      }
      acrostic_.push_back(*id);
    }
  }
}

Constrained FormatConstraints::apply(const DecodeState& state, const std::vector<double>& dist) const {
  if (state.done) throw Error(ErrorCode::kInternalInvariant, "decode state already finished");
  if (dist.size() != vocab_->size()) {
    throw Error(ErrorCode::kInternalInvariant, "distribution size does not match vocabulary");
  }
  Constrained out;
  out.probs.assign(dist.size(), 0.0);
  const std::size_t len = spec_.line_length(state.line_index);

  if (state.pos_in_line == len) {
    const bool last_decoded = state.line_index + 1 >= state.end_line;
    const bool lyric_ends = last_decoded && state.end_line >= spec_.num_lines;
    out.probs[lyric_ends ? Vocabulary::kEosId : Vocabulary::kSepId] = 1.0;
    return out;
  }

  const std::size_t acrostic_pos = len >= 2 ? 1 : 0;
  if (!acrostic_.empty() && state.pos_in_line == acrostic_pos) {
    const TokenId forced = acrostic_.at(state.line_index);
    out.probs[forced] = 1.0;
    if (!rhyme_ok_.empty() && state.pos_in_line == 0 && !rhyme_ok_[forced]) {
      out.violation = Violation{state.line_index, "rhyme",
                                "acrostic grapheme '" + vocab_->token(forced) +
                                    "' is outside rhyme group " + rhyme_group_};
    }
    return out;
  }

  const bool at_edge = state.pos_in_line == 0 || state.pos_in_line == acrostic_pos;
  const bool rhyme_here = !rhyme_ok_.empty() && state.pos_in_line == 0;
  double sum = 0.0;
  for (std::size_t id = 0; id < dist.size(); ++id) {
    const bool allowed = rhyme_here ? rhyme_ok_[id] : (at_edge ? edge_ok_[id] : text_[id]);
    if (allowed && dist[id] > 0.0) {
      out.probs[id] = dist[id];
      sum += dist[id];
    }
  }
  if (!(sum > 0.0)) {
    throw Error(ErrorCode::kConstraintUnsatisfiable,
                "no token satisfies the constraints at line " + std::to_string(state.line_index));
  }
  for (auto& p : out.probs) p /= sum;
  return out;
}

Constrained constrain_logits(const DecodeState& state, const ControlSpec& spec,
                             const RhymeTable& rhyme, const Vocabulary& vocab,
                             const std::vector<double>& dist) {
  return FormatConstraints(spec, rhyme, vocab).apply(state, dist);
}

TokenId sample_top_k(const std::vector<double>& probs, std::size_t k, double temperature, Rng& rng) {
  std::vector<TokenId> ids;
  for (TokenId id = 0; id < probs.size(); ++id) {
    if (probs[id] > 0.0) ids.push_back(id);
  }
  if (ids.empty()) throw Error(ErrorCode::kInternalInvariant, "empty distribution");
  if (ids.size() == 1) return ids.front();
  const auto by_prob = [&](TokenId a, TokenId b) {
    return probs[a] != probs[b] ? probs[a] > probs[b] : a < b;
  };
  const std::size_t keep = std::min(std::max<std::size_t>(k, 1), ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(keep), ids.end(), by_prob);
  ids.resize(keep);
  if (keep == 1) return ids.front();

  std::vector<double> w(keep);
  const double inv_t = 1.0 / temperature;
  // Scale by the top probability before the power to stay away from underflow.
  const double top = probs[ids.front()];
  for (std::size_t i = 0; i < keep; ++i) w[i] = std::pow(probs[ids[i]] / top, inv_t);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  double r = rng.unit() * total;
  for (std::size_t i = 0; i < keep; ++i) {
    r -= w[i];
    if (r < 0.0 && w[i] > 0.0) return ids[i];
  }
  for (std::size_t i = keep; i-- > 0;) {
    if (w[i] > 0.0) return ids[i];
  }
  return ids.front();
}

std::vector<Decoded> sample_lines(const LmBackend& model, const TokenSeq& context,
                                  const ControlSpec& spec, const RhymeTable& rhyme,
                                  std::size_t first_line, std::size_t end_line,
                                  const DecodeParams& params, std::uint64_t rng_seed) {
  if (params.top_k < 1) throw Error(ErrorCode::kValidation, "top_k must be >= 1", "k");
  if (params.n_candidates < 1) {
    throw Error(ErrorCode::kValidation, "n_candidates must be >= 1", "n_candidates");
  }
  if (!(params.temperature > 0.0)) {
    throw Error(ErrorCode::kValidation, "temperature must be > 0", "temperature");
  }
  if (first_line >= end_line || end_line > spec.num_lines) {
    throw Error(ErrorCode::kValidation, "requested lines are outside the lyric", "k_lines");
  }
  const auto& vocab = model.vocabulary();
  const FormatConstraints constraints(spec, rhyme, vocab);
  const auto prefix = vocab.encode(context);
  const std::size_t guard = spec.num_lines * (spec.max_line_length() + 1) + 8;

  std::vector<Decoded> out;
  out.reserve(params.n_candidates);
  for (std::size_t c = 0; c < params.n_candidates; ++c) {
    Rng rng(rng_seed + c);
    DecodeState state;
    state.line_index = first_line;
    state.end_line = end_line;
    std::vector<TokenId> seq = prefix;
    Decoded dec;
    while (!state.done) {
      if (params.deadline && std::chrono::steady_clock::now() > *params.deadline) {
        throw Error(ErrorCode::kTimeout, "generation exceeded its time budget");
      }
      if (state.emitted.size() > guard) {
        throw Error(ErrorCode::kInternalInvariant, "runaway decode exceeded length guard");
      }
      const auto adjusted = constraints.apply(state, model.next_distribution(seq));
      if (adjusted.violation) dec.violations.push_back(*adjusted.violation);
      const TokenId id = sample_top_k(adjusted.probs, params.top_k, params.temperature, rng);
      seq.push_back(id);
      state.emitted.push_back(id);
      if (id == Vocabulary::kEosId) {
        state.done = true;
      } else if (id == Vocabulary::kSepId) {
        ++state.line_index;
        state.pos_in_line = 0;
        if (state.line_index >= state.end_line) state.done = true;
      } else {
        ++state.pos_in_line;
      }
    }
    dec.tokens = vocab.decode(state.emitted);
    out.push_back(std::move(dec));
  }
  return out;
}

std::vector<Decoded> sample_constrained(const LmBackend& model, const TokenSeq& source,
                                        const ControlSpec& spec, const RhymeTable& rhyme,
                                        const DecodeParams& params, std::uint64_t rng_seed) {
  TokenSeq context = source;
  context.emplace_back(kBos);
  validate_shape(spec);
  return sample_lines(model, context, spec, rhyme, 0, spec.num_lines, params, rng_seed);
}

namespace {

LyricsText split_segments(const TokenSeq& candidate, bool allow_sep_end) {
  if (candidate.empty()) throw Error(ErrorCode::kInput, "empty candidate");
  const auto& last = candidate.back();
  if (last != kEos && !(allow_sep_end && last == kSep)) {
    throw Error(ErrorCode::kInput, "candidate is not terminated");
  }
  LyricsText out;
  TokenSeq seg;
  for (std::size_t i = 0; i + 1 < candidate.size(); ++i) {
    const auto& t = candidate[i];
    if (t == kSep) {
      if (seg.empty()) throw Error(ErrorCode::kInput, "empty line segment in candidate");
      out.lines.push_back(invert_line(seg));
      seg.clear();
    } else if (is_sentinel(t) || is_attribute_tag(t)) {
      throw Error(ErrorCode::kInput, "unexpected control token " + t + " inside candidate");
    } else {
      seg.push_back(t);
    }
  }
  if (seg.empty()) throw Error(ErrorCode::kInput, "empty line segment in candidate");
  out.lines.push_back(invert_line(seg));
  return out;
}

}  // namespace

LyricsText untransform(const TokenSeq& candidate) { return split_segments(candidate, false); }

LyricsText untransform_segments(const TokenSeq& candidate) { return split_segments(candidate, true); }

std::vector<Violation> check_format(const LyricsText& lyrics, const ControlSpec& spec,
                                    const RhymeTable& rhyme, std::size_t first_line) {
  std::vector<Violation> out;
  if (first_line == 0 && lyrics.lines.size() != spec.num_lines) {
    out.push_back({0, "line_count",
                   std::to_string(lyrics.lines.size()) + " lines, expected " +
                       std::to_string(spec.num_lines)});
  }
  for (std::size_t i = 0; i < lyrics.lines.size(); ++i) {
    const std::size_t abs = first_line + i;
    if (abs >= spec.num_lines) {
      out.push_back({abs, "line_count", "line beyond num_lines"});
      continue;
    }
    const auto& line = lyrics.lines[i];
    if (line.size() != spec.line_length(abs)) {
      out.push_back({abs, "length", std::to_string(line.size()) + " graphemes, expected " +
                                        std::to_string(spec.line_length(abs))});
      continue;
    }
    if (spec.rhyme_group && rhyme.group_of(line.back()) != *spec.rhyme_group) {
      out.push_back({abs, "rhyme", "final grapheme '" + line.back() + "' not in group " +
                                       *spec.rhyme_group});
    }
    if (spec.acrostic && line.front() != spec.acrostic->at(abs)) {
      out.push_back({abs, "acrostic", "line starts with '" + line.front() + "'"});
    }
  }
  return out;
}

}  // namespace lyrica
