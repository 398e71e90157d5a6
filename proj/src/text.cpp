#include "lyrica/text.h"

#include <unicode/brkiter.h>
#include <unicode/uchar.h>
#include <unicode/utext.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include <memory>

#include "lyrica/error.h"

namespace lyrica {

namespace {

std::vector<UChar32> code_points(std::string_view text) {
  std::vector<UChar32> out;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) {
      throw Error(ErrorCode::kInput, "invalid UTF-8 in text");
    }
    out.push_back(c);
  }
  return out;
}

icu::BreakIterator& character_iterator() {
  thread_local std::unique_ptr<icu::BreakIterator> iter = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> it(
        icu::BreakIterator::createCharacterInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status)) {
      throw Error(ErrorCode::kInternalInvariant, "ICU character break iterator unavailable");
    }
    return it;
  }();
  return *iter;
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
  if (error) throw Error(ErrorCode::kInput, "code point cannot be encoded as UTF-8");
  out.append(buf, static_cast<std::size_t>(len));
}

}  // namespace

std::vector<Grapheme> graphemes(std::string_view text) {
  std::vector<Grapheme> out;
  if (text.empty()) return out;
  code_points(text);  // validates

  UErrorCode status = U_ZERO_ERROR;
  UText* ut = utext_openUTF8(nullptr, text.data(), static_cast<int64_t>(text.size()), &status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInput, "cannot open text for segmentation");
  }
  auto& it = character_iterator();
  it.setText(ut, status);
  if (U_FAILURE(status)) {
    utext_close(ut);
    throw Error(ErrorCode::kInput, "cannot segment text");
  }
  int32_t start = it.first();
  for (int32_t end = it.next(); end != icu::BreakIterator::DONE; start = end, end = it.next()) {
    out.emplace_back(text.substr(static_cast<std::size_t>(start),
                                 static_cast<std::size_t>(end - start)));
  }
  utext_close(ut);
  return out;
}

std::string join(const std::vector<Grapheme>& tokens) {
  std::string out;
  for (const auto& t : tokens) out += t;
  return out;
}

bool is_whitespace(std::string_view grapheme) {
  if (grapheme.empty()) return false;
  for (UChar32 c : code_points(grapheme)) {
    if (!u_isUWhiteSpace(c)) return false;
  }
  return true;
}

bool is_punctuation(std::string_view grapheme) {
  if (grapheme.empty()) return false;
  const auto cps = code_points(grapheme);
  return u_ispunct(cps.front()) != 0;
}

std::string trim(std::string_view text) {
  const auto gs = graphemes(text);
  std::size_t b = 0;
  std::size_t e = gs.size();
  while (b < e && is_whitespace(gs[b])) ++b;
  while (e > b && is_whitespace(gs[e - 1])) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) out += gs[i];
  return out;
}

std::string normalize_line(std::string_view line) {
  std::string out;
  bool pending_space = false;
  for (const auto& g : graphemes(line)) {
    if (is_punctuation(g)) continue;
    if (is_whitespace(g)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    for (UChar32 c : code_points(g)) {
      append_utf8(out, u_foldCase(c, U_FOLD_CASE_DEFAULT));
    }
  }
  return out;
}

std::vector<std::string> Segmenter::words(const Line& line) const {
  std::vector<std::string> out;
  for (auto& w : segment(line)) out.push_back(std::move(w.text));
  return out;
}

namespace {

bool is_separator(const Grapheme& g) { return is_whitespace(g) || is_punctuation(g); }

std::string range_text(const Line& line, std::size_t b, std::size_t e) {
  std::string out;
  for (std::size_t i = b; i < e; ++i) out += line[i];
  return out;
}

}  // namespace

std::vector<WordSpan> WhitespaceSegmenter::segment(const Line& line) const {
  std::vector<WordSpan> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (is_separator(line[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < line.size() && !is_separator(line[j])) ++j;
    out.push_back({i, j, range_text(line, i, j)});
    i = j;
  }
  return out;
}

LexiconSegmenter::LexiconSegmenter(const std::vector<std::string>& entries) {
  for (const auto& e : entries) {
    const auto gs = graphemes(e);
    if (gs.empty()) continue;
    entries_.insert(e);
    max_len_ = std::max(max_len_, gs.size());
  }
}

std::vector<WordSpan> LexiconSegmenter::segment(const Line& line) const {
  std::vector<WordSpan> out;
  std::size_t i = 0;
  while (i < line.size()) {
    if (is_separator(line[i])) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < line.size() && !is_separator(line[run_end])) ++run_end;
    while (i < run_end) {
      std::size_t best = i + 1;
      for (std::size_t len = std::min(max_len_, run_end - i); len > 1; --len) {
        if (entries_.contains(range_text(line, i, i + len))) {
          best = i + len;
          break;
        }
      }
      out.push_back({i, best, range_text(line, i, best)});
      i = best;
    }
  }
  return out;
}

LyricsText LyricsText::from_strings(const std::vector<std::string>& lines) {
  LyricsText out;
  for (const auto& l : lines) out.lines.push_back(graphemes(l));
  return out;
}

std::vector<std::string> LyricsText::to_strings() const {
  std::vector<std::string> out;
  for (const auto& l : lines) out.push_back(join(l));
  return out;
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kInput, "cannot read word list: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace lyrica
