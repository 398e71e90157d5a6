#include <gtest/gtest.h>

#include <fstream>

#include "lyrica/error.h"
#include "lyrica/text.h"
#include "lyrica/tokens.h"
#include "test_support.h"

using namespace lyrica;

TEST(Graphemes, SplitsCjkOnePerCharacter) {
  EXPECT_EQ(graphemes("月光洒在"), (std::vector<Grapheme>{"月", "光", "洒", "在"}));
}

TEST(Graphemes, KeepsCombiningSequencesTogether) {
  // "e" + combining acute, then a flag made of two regional indicators.
  const auto g = graphemes("e\xCC\x81x\xF0\x9F\x87\xAF\xF0\x9F\x87\xB5");
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], "e\xCC\x81");
  EXPECT_EQ(g[1], "x");
  EXPECT_EQ(g[2], "\xF0\x9F\x87\xAF\xF0\x9F\x87\xB5");
}

TEST(Graphemes, ConcatenationRestoresInput) {
  const std::string s = "Not a footprint, 脚印 to be seen!";
  EXPECT_EQ(join(graphemes(s)), s);
}

TEST(Graphemes, EmptyInputGivesNoGraphemes) { EXPECT_TRUE(graphemes("").empty()); }

TEST(Graphemes, RejectsInvalidUtf8) {
  try {
    graphemes("ab\xFF");
    FAIL() << "expected an input error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
  }
}

TEST(Classify, WhitespaceAndPunctuation) {
  EXPECT_TRUE(is_whitespace(" "));
  EXPECT_TRUE(is_whitespace("\xE3\x80\x80"));  // ideographic space
  EXPECT_FALSE(is_whitespace("a"));
  EXPECT_TRUE(is_punctuation(","));
  EXPECT_TRUE(is_punctuation("\xEF\xBC\x8C"));  // fullwidth comma
  EXPECT_TRUE(is_punctuation("\xE3\x80\x82"));  // ideographic full stop
  EXPECT_FALSE(is_punctuation("月"));
}

TEST(NormalizeLine, StripsPunctuationCollapsesSpaceAndFoldsCase) {
  EXPECT_EQ(normalize_line("Not a footprint to be seen"), normalize_line("not a footprint to be seen."));
  EXPECT_EQ(normalize_line("  Not   a footprint,to be seen "), "not a footprintto be seen");
  EXPECT_EQ(normalize_line("月光，洒在城墙。"), "月光洒在城墙");
}

TEST(Trim, RemovesOuterWhitespace) {
  EXPECT_EQ(trim("  ab c \t\n"), "ab c");
  EXPECT_EQ(trim("   "), "");
}

TEST(WhitespaceSegmenter, SplitsOnSpaces) {
  const WhitespaceSegmenter seg;
  const auto spans = seg.segment(graphemes("not a  footprint"));
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[0].text, "not");
  EXPECT_EQ(spans[2].text, "footprint");
  EXPECT_EQ(spans[2].begin, 7u);
  EXPECT_EQ(spans[2].end, 16u);
}

TEST(LexiconSegmenter, GreedyLongestMatchWithSingleGraphemeFallback) {
  const LexiconSegmenter seg({"月光", "月", "城墙", "旧城"});
  EXPECT_EQ(seg.words(graphemes("月光洒在旧城墙")),
            (std::vector<std::string>{"月光", "洒", "在", "旧城", "墙"}));
}

TEST(LexiconSegmenter, SpansCoverTheirGraphemes) {
  const LexiconSegmenter seg({"故乡", "远方"});
  const auto line = graphemes("故乡在远方");
  for (const auto& s : seg.segment(line)) {
    const std::vector<Grapheme> part(line.begin() + static_cast<std::ptrdiff_t>(s.begin),
                                     line.begin() + static_cast<std::ptrdiff_t>(s.end));
    EXPECT_EQ(join(part), s.text);
  }
}

TEST(LyricsText, StringRoundTrip) {
  const std::vector<std::string> lines{"清晨的阳光", "照进窗"};
  const auto t = LyricsText::from_strings(lines);
  EXPECT_EQ(t.lines[1].size(), 3u);
  EXPECT_EQ(t.to_strings(), lines);
}

TEST(WordList, SkipsBlankLines) {
  lyrica::testing::TempDir dir;
  const auto path = dir.str() + "/w.txt";
  std::ofstream(path) << "a\n\n  b  \n";
  EXPECT_EQ(read_word_list(path), (std::vector<std::string>{"a", "b"}));
}

TEST(Tokens, SentinelsAndTags) {
  EXPECT_TRUE(is_sentinel("[SEP]"));
  EXPECT_TRUE(is_sentinel("[MASK]"));
  EXPECT_FALSE(is_sentinel("SEP"));
  EXPECT_EQ(attribute_tag("Pop"), "<Pop>");
  EXPECT_TRUE(is_attribute_tag("<negative>"));
  EXPECT_FALSE(is_attribute_tag("<"));
  EXPECT_EQ(render({"<Pop>", "[SEP]", "月"}), "<Pop> [SEP] 月");
}
