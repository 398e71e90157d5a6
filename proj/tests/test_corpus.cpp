#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>

#include "lyrica/classifier.h"
#include "lyrica/corpus.h"
#include "lyrica/error.h"
#include "lyrica/rng.h"
#include "test_support.h"

using namespace lyrica;
using lyrica::testing::fixture;

namespace {

AnnotatedSong song_with(std::vector<std::string> lines, std::vector<std::string> keywords) {
  AnnotatedSong a;
  a.song.id = "s";
  a.song.style = "Pop";
  a.song.lines = std::move(lines);
  a.emotion = "neutral";
  a.keywords = std::move(keywords);
  return a;
}

std::string text_of(const TokenSeq& seq) {
  std::string out;
  for (const auto& t : seq) out += t;
  return out;
}

}  // namespace

TEST(LoadCorpus, FixtureLoadsInFileOrder) {
  const auto load = load_corpus(fixture("corpus.jsonl"));
  ASSERT_EQ(load.songs.size(), 24u);
  EXPECT_TRUE(load.diagnostics.empty());
  EXPECT_EQ(load.songs.front().id, "p01");
  EXPECT_EQ(load.songs.back().id, "f06");
  EXPECT_FALSE(load.songs[5].emotion.has_value());
}

TEST(LoadCorpus, UnknownStyleIsRejectedOthersKept) {
  const auto load = load_corpus(fixture("corpus_with_bad.jsonl"));
  ASSERT_EQ(load.songs.size(), 2u);
  EXPECT_EQ(load.songs[0].id, "ok1");
  EXPECT_EQ(load.songs[1].id, "ok2");
  ASSERT_EQ(load.diagnostics.size(), 4u);
  EXPECT_NE(load.diagnostics[0].find("Jazz"), std::string::npos);
}

TEST(LoadCorpus, EmptyFileIsEmptyCorpusError) {
  lyrica::testing::TempDir dir;
  const auto path = dir.str() + "/empty.jsonl";
  std::ofstream(path).close();
  try {
    load_corpus(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(LoadCorpus, MissingFileIsInputError) {
  try {
    load_corpus("/nonexistent/corpus.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
  }
}

TEST(LoadCorpus, SeedFileRequiresEmotion) {
  EXPECT_THROW(parse_song(R"({"id":"x","style":"Pop","lines":["a"]})", kDefaultStyles, true), Error);
  EXPECT_NO_THROW(parse_song(R"({"id":"x","style":"Pop","lines":["a"]})", kDefaultStyles, false));
}

TEST(LoadCorpus, BlankLineInSongIsRejected) {
  EXPECT_THROW(parse_song(R"({"id":"x","style":"Pop","lines":["a","  "]})", kDefaultStyles, false), Error);
}

TEST(LoadCorpus, SongJsonRoundTrip) {
  const auto s = parse_song(R"({"id":"x","style":"Folk","emotion":"negative","lines":["一","二"]})",
                            kDefaultStyles, false);
  const auto back = parse_song(song_to_json_line(s), kDefaultStyles, false);
  EXPECT_EQ(back.id, s.id);
  EXPECT_EQ(back.emotion, s.emotion);
  EXPECT_EQ(back.lines, s.lines);
}

TEST(Annotate, LabelledEmotionPassesThrough) {
  const auto docs = lyrica::testing::disjoint_corpus({"positive", "negative"}, 10, 6, 5, 1);
  const auto clf = train_classifier(docs);
  Song s{"a", "Pop", "positive", {"negative:1 negative:2"}};
  const WhitespaceSegmenter seg;
  const auto out = annotate({s}, &clf, seg, {});
  EXPECT_EQ(out[0].emotion, "positive");
}

TEST(Annotate, StoplistOnlySongHasNoKeywords) {
  Song s{"a", "Pop", "neutral", {"the a of", "a the"}};
  const WhitespaceSegmenter seg;
  const auto out = annotate({s}, nullptr, seg, {"the", "a", "of"});
  EXPECT_TRUE(out[0].keywords.empty());
}

TEST(Annotate, KeywordsDedupedInFirstOccurrenceOrder) {
  Song s{"a", "Pop", "neutral", {"moon night sky", "sky moon river"}};
  const WhitespaceSegmenter seg;
  const auto out = annotate({s}, nullptr, seg, {"night"});
  EXPECT_EQ(out[0].keywords, (std::vector<std::string>{"moon", "sky", "river"}));
}

TEST(Annotate, KeywordsComeFromSegmentedWords) {
  for (const auto& a : lyrica::testing::fixture_annotated()) {
    const LexiconSegmenter seg(read_word_list(fixture("lexicon.txt")));
    std::vector<std::string> words;
    for (const auto& l : a.song.lines) {
      for (auto& w : seg.words(graphemes(l))) words.push_back(std::move(w));
    }
    for (const auto& k : a.keywords) {
      EXPECT_NE(std::find(words.begin(), words.end(), k), words.end()) << a.song.id << " " << k;
    }
  }
}

TEST(Annotate, UnlabelledSongGetsGeneratingClass) {
  // Oracle: the class whose (disjoint) grapheme set the song was drawn from.
  // annotate() classifies on the song's graphemes, so the classes use
  // single-grapheme tokens.
  const std::map<std::string, std::vector<std::string>> alphabet{
      {"positive", {"春", "花", "笑", "暖", "晴"}},
      {"negative", {"泪", "雨", "哭", "冷", "伤"}},
      {"neutral", {"山", "水", "门", "路", "桥"}}};
  Rng rng(99);
  std::vector<LabeledDoc> train;
  for (int d = 0; d < 20; ++d) {
    for (const auto& [c, letters] : alphabet) {
      LabeledDoc doc;
      doc.label = c;
      for (int t = 0; t < 8; ++t) doc.tokens.push_back(letters[rng.below(letters.size())]);
      train.push_back(std::move(doc));
    }
  }
  const auto clf = train_classifier(train);
  const WhitespaceSegmenter seg;
  for (int i = 0; i < 30; ++i) {
    for (const auto& [c, letters] : alphabet) {
      std::string line;
      for (int t = 0; t < 6; ++t) line += letters[rng.below(letters.size())];
      const auto out = annotate({Song{"u", "Pop", std::nullopt, {line + "，"}}}, &clf, seg, {});
      EXPECT_EQ(out[0].emotion, c) << line;
    }
  }
}

TEST(Annotate, MissingClassifierIsConfigurationError) {
  const WhitespaceSegmenter seg;
  try {
    annotate({Song{"u", "Pop", std::nullopt, {"x"}}}, nullptr, seg, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
  }
}

TEST(Annotate, AnnotatedJsonRoundTrip) {
  lyrica::testing::TempDir dir;
  const auto path = dir.str() + "/a.jsonl";
  {
    std::ofstream out(path);
    for (const auto& a : lyrica::testing::fixture_annotated()) out << annotated_to_json_line(a) << '\n';
  }
  const auto back = load_annotated(path);
  ASSERT_EQ(back.size(), lyrica::testing::fixture_annotated().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].keywords, lyrica::testing::fixture_annotated()[i].keywords);
    EXPECT_EQ(back[i].emotion, lyrica::testing::fixture_annotated()[i].emotion);
    EXPECT_EQ(back[i].song.lines, lyrica::testing::fixture_annotated()[i].song.lines);
  }
}

TEST(Transform, MovesLastTokenToFront) {
  EXPECT_EQ(transform_line({"a", "b", "c", "d"}), (TokenSeq{"d", "a", "b", "c"}));
  EXPECT_EQ(transform_line({"x"}), (TokenSeq{"x"}));
  EXPECT_EQ(invert_line({"d", "a", "b", "c"}), (TokenSeq{"a", "b", "c", "d"}));
}

TEST(Transform, EmptyLineIsInputError) {
  EXPECT_THROW(transform_line({}), Error);
  EXPECT_THROW(invert_line({}), Error);
}

TEST(Transform, RoundTripOnRandomLines) {
  Rng rng(5);
  const std::vector<std::string> alphabet{"a", "月", "光", " ", "e\xCC\x81", "，"};
  for (int i = 0; i < 2000; ++i) {
    TokenSeq line(1 + rng.below(12));
    for (auto& t : line) t = alphabet[rng.below(alphabet.size())];
    const auto t = transform_line(line);
    EXPECT_EQ(t.size(), line.size());
    EXPECT_EQ(invert_line(t), line);
  }
}

TEST(BuildExamples, SourceAndTargetShape) {
  const auto a = song_with({"abcd", "efg"}, {"k1", "k2", "k3", "k4"});
  const auto ex = build_examples({a}, 3, {1, 8}, 11);
  ASSERT_EQ(ex.size(), 3u);
  for (const auto& e : ex) {
    ASSERT_GE(e.source.size(), 3u);
    EXPECT_EQ(e.source[0], "<Pop>");
    EXPECT_EQ(e.source[1], "[SEP]");
    EXPECT_EQ(e.source[2], "<neutral>");
    // Keywords appear as [SEP]-separated grapheme runs, a subset in song order.
    std::vector<std::string> kws;
    for (std::size_t i = 3; i < e.source.size(); ++i) {
      if (e.source[i] == "[SEP]") {
        kws.emplace_back();
      } else {
        ASSERT_FALSE(kws.empty());
        kws.back() += e.source[i];
      }
    }
    EXPECT_GE(kws.size(), 1u);
    std::size_t at = 0;
    for (const auto& k : kws) {
      const auto it = std::find(a.keywords.begin() + static_cast<std::ptrdiff_t>(at), a.keywords.end(), k);
      ASSERT_NE(it, a.keywords.end()) << k;
      at = static_cast<std::size_t>(it - a.keywords.begin()) + 1;
    }
    EXPECT_EQ(e.target, (TokenSeq{"d", "a", "b", "c", "[SEP]", "g", "e", "f", "[EOS]"}));
  }
}

TEST(BuildExamples, DeterministicUnderSeed) {
  const auto& songs = lyrica::testing::fixture_annotated();
  EXPECT_EQ(build_examples(songs, 4, {1, 8}, 3), build_examples(songs, 4, {1, 8}, 3));
  EXPECT_NE(build_examples(songs, 4, {1, 8}, 3), build_examples(songs, 4, {1, 8}, 4));
}

TEST(BuildExamples, SongWithoutKeywordsGetsEmptyKeywordSegment) {
  const auto ex = build_examples({song_with({"ab"}, {})}, 2, {1, 8}, 1);
  ASSERT_EQ(ex.size(), 2u);
  EXPECT_EQ(ex[0].source, (TokenSeq{"<Pop>", "[SEP]", "<neutral>"}));
}

TEST(BuildExamples, TargetInvertsToSongText) {
  for (const auto& e : build_examples(lyrica::testing::fixture_annotated(), 1, {1, 8}, 2)) {
    ASSERT_EQ(e.target.back(), "[EOS]");
    std::vector<std::string> lines;
    TokenSeq seg;
    for (const auto& t : e.target) {
      if (t == "[SEP]" || t == "[EOS]") {
        lines.push_back(text_of(invert_line(seg)));
        seg.clear();
      } else {
        seg.push_back(t);
      }
    }
    const bool found = std::any_of(
        lyrica::testing::fixture_annotated().begin(), lyrica::testing::fixture_annotated().end(),
        [&](const AnnotatedSong& a) { return a.song.lines == lines; });
    EXPECT_TRUE(found);
  }
}

TEST(BuildExamples, KeywordCountRangeIsClamped) {
  const auto a = song_with({"ab"}, {"x", "y"});
  for (const auto& e : build_examples({a}, 20, {5, 8}, 9)) {
    EXPECT_EQ(std::count(e.source.begin(), e.source.end(), "[SEP]"), 3);
  }
}

TEST(LineIndex, MembershipUnderNormalization) {
  const auto idx = build_line_index({Song{"a", "Pop", std::nullopt, {"Not a footprint to be seen"}}});
  EXPECT_TRUE(idx.contains("Not a footprint to be seen"));
  EXPECT_TRUE(idx.contains("not a footprint to be seen."));
  EXPECT_TRUE(idx.contains("  not a  footprint to be seen "));
  EXPECT_FALSE(idx.contains("not a footprint"));
}
