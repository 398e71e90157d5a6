#include "lyrica/pipeline.h"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "lyrica/error.h"
#include "lyrica/rng.h"

namespace lyrica {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::uint64_t decode_seed(std::uint64_t seed) { return Rng::mix(seed ^ 0x6c797269636131ULL); }

void check_lines(const LyricsText& lyrics, const char* field) {
  for (const auto& line : lyrics.lines) {
    if (line.empty()) throw Error(ErrorCode::kValidation, "lines must not be empty", field);
  }
}

TokenSeq transformed_lines(const LyricsText& lyrics) {
  TokenSeq out;
  for (const auto& line : lyrics.lines) {
    const auto t = transform_line(line);
    out.insert(out.end(), t.begin(), t.end());
    out.emplace_back(kSep);
  }
  return out;
}

struct Pool {
  std::vector<LyricsText> texts;
  std::vector<std::vector<Violation>> violations;
};

GenerationResult rank_rounds(const GenerationRequest& request, const TrainedBundle& bundle,
                             const GenerationOptions& options, std::uint64_t rng_seed,
                             const TokenSeq& context, std::size_t first_line, std::size_t end_line,
                             bool partial) {
  if (request.n_candidates < 1) {
    throw Error(ErrorCode::kValidation, "n_candidates must be >= 1", "n_candidates");
  }
  DecodeParams params = options.decode;
  params.n_candidates = request.n_candidates * std::max<std::size_t>(options.oversample, 1);
  const std::uint64_t base = decode_seed(rng_seed);
  const RankContext ctx{bundle.line_index, bundle.style_classifier};

  Pool pool;
  std::vector<Candidate> ranked;
  std::size_t rounds = 0;
  for (std::size_t round = 0; round <= options.max_retries; ++round) {
    ++rounds;
    const auto decoded = sample_lines(*bundle.lm, context, request.spec, bundle.rhyme, first_line,
                                      end_line, params, base + round * params.n_candidates);
    for (const auto& d : decoded) {
      pool.texts.push_back(partial ? untransform_segments(d.tokens) : untransform(d.tokens));
      pool.violations.push_back(d.violations);
    }
    ranked = rerank(pool.texts, request.spec, ctx, options.weights);
    std::vector<const LyricsText*> distinct;
    for (const auto& c : ranked) {
      if (c.rejected) continue;
      if (std::none_of(distinct.begin(), distinct.end(),
                       [&](const LyricsText* t) { return *t == c.lyrics; })) {
        distinct.push_back(&c.lyrics);
      }
    }
    const std::size_t survivors = distinct.size();
    if (survivors >= request.n_candidates) break;
  }

  GenerationResult out;
  out.seed = rng_seed;
  out.rounds = rounds;
  for (auto& c : ranked) {
    c.violations = pool.violations[c.decode_index];
    if (c.rejected) {
      out.rejected.push_back(std::move(c));
    } else if (out.candidates.size() < request.n_candidates &&
               std::none_of(out.candidates.begin(), out.candidates.end(),
                            [&](const Candidate& kept) { return kept.lyrics == c.lyrics; })) {
      out.candidates.push_back(std::move(c));
    }
  }
  if (out.candidates.empty()) {
    throw GenerationExhausted("all " + std::to_string(out.rejected.size()) + " candidates in " +
                                  std::to_string(rounds) +
                                  " rounds were rejected as duplicates of the training corpus",
                              out.rejected);
  }
  return out;
}

}  // namespace

void validate_spec(const ControlSpec& spec, const TrainedBundle& bundle) {
  validate_shape(spec);
  if (!contains(bundle.styles, spec.style)) {
    throw Error(ErrorCode::kValidation, "unknown style '" + spec.style + "'", "style");
  }
  if (!contains(bundle.emotions, spec.emotion)) {
    throw Error(ErrorCode::kValidation, "unknown emotion '" + spec.emotion + "'", "emotion");
  }
  if (spec.theme && !bundle.themes.contains(*spec.theme)) {
    throw Error(ErrorCode::kValidation, "unknown theme '" + *spec.theme + "'", "theme");
  }
  if (spec.rhyme_group && !bundle.rhyme.has_group(*spec.rhyme_group)) {
    throw Error(ErrorCode::kValidation, "unknown rhyme group '" + *spec.rhyme_group + "'", "rhyme_group");
  }
  for (const auto& k : spec.keywords) {
    if (trim(k).empty()) throw Error(ErrorCode::kValidation, "keywords must not be blank", "keywords");
  }
}

std::vector<std::string> request_keywords(const ControlSpec& spec, const TrainedBundle& bundle,
                                          std::size_t theme_keyword_count, std::uint64_t rng_seed) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& k : spec.keywords) {
    if (seen.insert(k).second) out.push_back(k);
  }
  if (spec.theme) {
    const auto it = bundle.theme_keyword_lists.find(*spec.theme);
    if (it == bundle.theme_keyword_lists.end()) {
      throw Error(ErrorCode::kInput, "unknown theme '" + *spec.theme + "'", "theme");
    }
    for (auto& k : sample_theme_keywords(it->second, theme_keyword_count, rng_seed)) {
      if (seen.insert(k).second) out.push_back(std::move(k));
    }
  }
  return out;
}

TokenSeq assemble_source(const ControlSpec& spec, const TrainedBundle& bundle,
                         std::uint64_t rng_seed, std::size_t theme_keyword_count) {
  return source_tokens(spec.style, spec.emotion,
                       request_keywords(spec, bundle, theme_keyword_count, rng_seed));
}

GenerationResult generate_full(const GenerationRequest& request, const TrainedBundle& bundle,
                               const GenerationOptions& options, std::uint64_t rng_seed) {
  if (request.preceding) {
    throw Error(ErrorCode::kValidation, "full-text generation takes no preceding context", "preceding");
  }
  validate_spec(request.spec, bundle);
  const auto keywords = request_keywords(request.spec, bundle, options.theme_keyword_count, rng_seed);
  TokenSeq context = source_tokens(request.spec.style, request.spec.emotion, keywords);
  const TokenSeq source = context;
  context.emplace_back(kBos);

  // Keyword hits count the sampled theme keywords as well as the user's.
  GenerationRequest scoring = request;
  scoring.spec.keywords = keywords;
  auto out = rank_rounds(scoring, bundle, options, rng_seed, context, 0, request.spec.num_lines, false);
  out.source = source;
  out.keywords = keywords;
  return out;
}

TokenSeq continuation_context(const GenerationRequest& request, const TrainedBundle& bundle,
                              std::uint64_t rng_seed, std::size_t theme_keyword_count) {
  TokenSeq context = assemble_source(request.spec, bundle, rng_seed, theme_keyword_count);
  context.emplace_back(kBos);
  if (request.preceding) {
    const auto body = transformed_lines(*request.preceding);
    context.insert(context.end(), body.begin(), body.end());
  }
  return context;
}

GenerationResult generate_continuation(const GenerationRequest& request, const TrainedBundle& bundle,
                                       const GenerationOptions& options, std::uint64_t rng_seed) {
  validate_spec(request.spec, bundle);
  if (!request.preceding || request.preceding->lines.empty()) {
    throw Error(ErrorCode::kValidation, "continuation requires preceding lines", "preceding");
  }
  check_lines(*request.preceding, "preceding");
  if (request.k_lines < 1) throw Error(ErrorCode::kValidation, "k_lines must be >= 1", "k_lines");
  const std::size_t first = request.preceding->lines.size();
  if (first + request.k_lines > request.spec.num_lines) {
    throw Error(ErrorCode::kValidation, "preceding lines plus k_lines exceed num_lines", "k_lines");
  }
  const auto keywords = request_keywords(request.spec, bundle, options.theme_keyword_count, rng_seed);
  TokenSeq context = source_tokens(request.spec.style, request.spec.emotion, keywords);
  const TokenSeq source = context;
  context.emplace_back(kBos);
  const auto body = transformed_lines(*request.preceding);
  context.insert(context.end(), body.begin(), body.end());

  GenerationRequest scoring = request;
  scoring.spec.keywords = keywords;
  auto out = rank_rounds(scoring, bundle, options, rng_seed, context, first, first + request.k_lines,
                         first + request.k_lines < request.spec.num_lines);
  out.source = source;
  out.keywords = keywords;
  return out;
}

void validate_revision(const RevisionRequest& request, const TrainedBundle& bundle) {
  if (!contains(bundle.styles, request.style)) {
    throw Error(ErrorCode::kValidation, "unknown style '" + request.style + "'", "style");
  }
  if (request.lyrics.lines.empty()) throw Error(ErrorCode::kValidation, "lyrics are empty", "lyrics");
  check_lines(request.lyrics, "lyrics");
  if (request.line >= request.lyrics.lines.size()) {
    throw Error(ErrorCode::kValidation, "span line is out of bounds", "span");
  }
  if (request.range) {
    const auto [b, e] = *request.range;
    if (b >= e || e > request.lyrics.lines[request.line].size()) {
      throw Error(ErrorCode::kValidation, "span grapheme range is empty or out of bounds", "span");
    }
  }
  if (request.n_candidates < 1) {
    throw Error(ErrorCode::kValidation, "n_candidates must be >= 1", "n_candidates");
  }
}

TokenSeq revision_sequence(const std::string& style, const LyricsText& lyrics) {
  TokenSeq out{attribute_tag(style), Token(kBos)};
  auto body = transformed_lines(lyrics);
  body.back() = Token(kEos);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

LyricsText splice(const RevisionRequest& request, const Line& fill) {
  LyricsText out = request.lyrics;
  auto& line = out.lines.at(request.line);
  if (!request.range) {
    line = fill;
  } else {
    const auto [b, e] = *request.range;
    Line spliced(line.begin(), line.begin() + static_cast<std::ptrdiff_t>(b));
    spliced.insert(spliced.end(), fill.begin(), fill.end());
    spliced.insert(spliced.end(), line.begin() + static_cast<std::ptrdiff_t>(e), line.end());
    line = std::move(spliced);
  }
  return out;
}

namespace {

std::vector<Line> sentence_fills(const RevisionRequest& request, const TrainedBundle& bundle,
                                 const RevisionOptions& options, std::uint64_t rng_seed) {
  const auto& lines = request.lyrics.lines;
  const std::size_t original = lines[request.line].size();
  std::vector<std::size_t> lengths;
  const std::size_t lo = original > options.length_delta ? original - options.length_delta : 1;
  for (std::size_t len = lo; len <= original + options.length_delta; ++len) lengths.push_back(len);

  TokenSeq context{attribute_tag(request.style), Token(kBos)};
  for (std::size_t i = 0; i < request.line; ++i) {
    const auto t = transform_line(lines[i]);
    context.insert(context.end(), t.begin(), t.end());
    context.emplace_back(kSep);
  }

  const std::size_t total = request.n_candidates * std::max<std::size_t>(options.oversample, 1);
  const std::size_t per_length = (total + lengths.size() - 1) / lengths.size();
  const bool last_line = request.line + 1 == lines.size();
  std::vector<Line> fills;
  for (std::size_t li = 0; li < lengths.size(); ++li) {
    ControlSpec spec;
    spec.num_lines = lines.size();
    spec.words_per_line.clear();
    for (const auto& l : lines) spec.words_per_line.push_back(l.size());
    spec.words_per_line[request.line] = lengths[li];
    DecodeParams params = options.decode;
    params.n_candidates = per_length;
    const auto decoded = sample_lines(*bundle.lm, context, spec, bundle.rhyme, request.line,
                                      request.line + 1, params, rng_seed + li * per_length);
    for (const auto& d : decoded) {
      auto text = last_line ? untransform(d.tokens) : untransform_segments(d.tokens);
      fills.push_back(std::move(text.lines.front()));
    }
  }
  return fills;
}

std::vector<Line> word_fills(const RevisionRequest& request, const TrainedBundle& bundle,
                             const RevisionOptions& options) {
  const auto [b, e] = *request.range;
  const std::size_t original = e - b;
  const std::size_t lo = original > options.word_length_slack ? original - options.word_length_slack : 1;
  const std::size_t hi = original + options.word_length_slack;
  std::vector<Line> fills;
  for (const auto& w : bundle.lexicon) {
    auto g = graphemes(w);
    if (g.size() < lo || g.size() > hi) continue;
    if (std::any_of(g.begin(), g.end(), [](const Grapheme& x) { return is_whitespace(x); })) continue;
    fills.push_back(std::move(g));
  }
  return fills;
}

}  // namespace

RevisionResult revise(const RevisionRequest& request, const TrainedBundle& bundle,
                      const RevisionOptions& options, std::uint64_t rng_seed) {
  validate_revision(request, bundle);
  const auto& line = request.lyrics.lines[request.line];
  const Line original = request.range
                            ? Line(line.begin() + static_cast<std::ptrdiff_t>(request.range->first),
                                   line.begin() + static_cast<std::ptrdiff_t>(request.range->second))
                            : line;

  const auto fills = request.range ? word_fills(request, bundle, options)
                                   : sentence_fills(request, bundle, options, decode_seed(rng_seed));

  std::set<Line> seen{original};
  std::vector<Suggestion> scored;
  const auto& vocab = bundle.vocabulary();
  for (const auto& fill : fills) {
    if (options.decode.deadline && std::chrono::steady_clock::now() > *options.decode.deadline) {
      throw Error(ErrorCode::kTimeout, "revision exceeded its time budget");
    }
    if (!seen.insert(fill).second) continue;
    Suggestion s;
    s.fill = fill;
    s.lyrics = splice(request, fill);
    s.score = score_sequence(*bundle.lm, vocab.encode(revision_sequence(request.style, s.lyrics)));
    scored.push_back(std::move(s));
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Suggestion& a, const Suggestion& b) { return a.score > b.score; });
  if (scored.size() > request.n_candidates) scored.resize(request.n_candidates);
  return {std::move(scored), rng_seed};
}

std::vector<TrainingExample> build_revision_examples(const std::vector<AnnotatedSong>& songs,
                                                     const Segmenter& segmenter,
                                                     std::uint64_t rng_seed) {
  if (songs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no songs for revision examples");
  Rng rng(rng_seed);
  std::vector<TrainingExample> out;
  for (const auto& s : songs) {
    const auto lyrics = LyricsText::from_strings(s.song.lines);
    const auto masked_source = [&](std::size_t line, std::size_t b, std::size_t e) {
      TokenSeq src{attribute_tag(s.song.style), Token(kSep)};
      for (std::size_t i = 0; i < lyrics.lines.size(); ++i) {
        if (i) src.emplace_back(kSep);
        const auto& l = lyrics.lines[i];
        if (i != line) {
          src.insert(src.end(), l.begin(), l.end());
          continue;
        }
        src.insert(src.end(), l.begin(), l.begin() + static_cast<std::ptrdiff_t>(b));
        src.emplace_back(kMask);
        src.insert(src.end(), l.begin() + static_cast<std::ptrdiff_t>(e), l.end());
      }
      return src;
    };

    const auto line = static_cast<std::size_t>(rng.below(lyrics.lines.size()));
    out.push_back({masked_source(line, 0, lyrics.lines[line].size()), lyrics.lines[line]});

    std::vector<std::pair<std::size_t, WordSpan>> words;
    for (std::size_t i = 0; i < lyrics.lines.size(); ++i) {
      for (auto& w : segmenter.segment(lyrics.lines[i])) words.emplace_back(i, std::move(w));
    }
    if (words.empty()) continue;
    const auto& [wl, span] = words[static_cast<std::size_t>(rng.below(words.size()))];
    const auto& l = lyrics.lines[wl];
    out.push_back({masked_source(wl, span.begin, span.end),
                   TokenSeq(l.begin() + static_cast<std::ptrdiff_t>(span.begin),
                            l.begin() + static_cast<std::ptrdiff_t>(span.end))});
  }
  return out;
}

}  // namespace lyrica
