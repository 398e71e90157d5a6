#include <gtest/gtest.h>

#include <cmath>

#include "lyrica/error.h"
#include "lyrica/lm.h"

using namespace lyrica;

namespace {

// Fixed table: P(next | last token) with a uniform fallback for short contexts.
class TableLm final : public LmBackend {
 public:
  TableLm() : vocab_(Vocabulary::from_tokens({"a", "b"})) {}
  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> next_distribution(std::span<const TokenId> context) const override {
    check_ids(vocab_, context);
    std::vector<double> p(vocab_.size(), 0.1 / static_cast<double>(vocab_.size() - 2));
    const auto a = *vocab_.find("a");
    const auto b = *vocab_.find("b");
    p[a] = 0.0;
    p[b] = 0.0;
    const double rest = 0.9;
    if (!context.empty() && context.back() == a) {
      p[b] += rest;
    } else {
      p[a] += rest * 0.5;
      p[b] += rest * 0.5;
    }
    return p;
  }

 private:
  Vocabulary vocab_;
};

}  // namespace

TEST(Vocabulary, SentinelsComeFirst) {
  const auto v = Vocabulary::from_tokens({"b", "a", "b", "[SEP]"});
  EXPECT_EQ(v.token(Vocabulary::kSepId), "[SEP]");
  EXPECT_EQ(v.token(Vocabulary::kEosId), "[EOS]");
  EXPECT_EQ(v.token(Vocabulary::kMaskId), "[MASK]");
  EXPECT_EQ(v.token(Vocabulary::kBosId), "[BOS]");
  EXPECT_EQ(v.token(Vocabulary::kUnkId), "[UNK]");
  EXPECT_EQ(v.size(), 7u);
  EXPECT_EQ(v.token(5), "a");
  EXPECT_EQ(v.token(6), "b");
}

TEST(Vocabulary, EncodeDecode) {
  const auto v = Vocabulary::from_tokens({"月", "光"});
  const auto ids = v.encode(TokenSeq{"光", "月", "zzz"});
  EXPECT_EQ(ids.back(), Vocabulary::kUnkId);
  EXPECT_EQ(v.decode(ids), (TokenSeq{"光", "月", "[UNK]"}));
  EXPECT_FALSE(v.find("zzz").has_value());
}

TEST(Vocabulary, TextExcludesSentinelsAndTags) {
  const auto v = Vocabulary::from_tokens({"<Pop>", "月"});
  EXPECT_FALSE(v.is_text(Vocabulary::kSepId));
  EXPECT_FALSE(v.is_text(Vocabulary::kUnkId));
  EXPECT_FALSE(v.is_text(*v.find("<Pop>")));
  EXPECT_TRUE(v.is_text(*v.find("月")));
}

TEST(Vocabulary, HashTracksContentAndOrder) {
  const auto a = Vocabulary::from_tokens({"a", "b"});
  EXPECT_EQ(a.hash(), Vocabulary::from_tokens({"b", "a"}).hash());
  EXPECT_NE(a.hash(), Vocabulary::from_tokens({"a", "c"}).hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(Vocabulary::from_ordered(a.tokens()).hash(), a.hash());
}

TEST(CheckIds, OutOfRangeIsInputError) {
  const auto v = Vocabulary::from_tokens({"a"});
  const std::vector<TokenId> bad{0, 99};
  try {
    check_ids(v, bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInput);
  }
}

TEST(ScoreSequence, SingleTokenIsLogProbAfterEmptyContext) {
  const TableLm lm;
  const std::vector<TokenId> seq{*lm.vocabulary().find("a")};
  EXPECT_DOUBLE_EQ(score_sequence(lm, seq), std::log(0.45));
}

TEST(ScoreSequence, ChainRule) {
  const TableLm lm;
  const auto a = *lm.vocabulary().find("a");
  const auto b = *lm.vocabulary().find("b");
  const std::vector<TokenId> x{b, a};
  const std::vector<TokenId> xy{b, a, b};
  EXPECT_NEAR(score_sequence(lm, xy), score_sequence(lm, x) + std::log(lm.next_distribution(x)[b]), 1e-12);
}

TEST(ScoreSequence, AppendingNeverIncreases) {
  const TableLm lm;
  std::vector<TokenId> seq;
  double last = 0.0;
  for (TokenId t : {5u, 6u, 5u, 0u, 6u, 6u}) {
    seq.push_back(t);
    const double s = score_sequence(lm, seq);
    EXPECT_LE(s, last);
    last = s;
  }
}

TEST(ScoreSequence, EmptySequenceIsInputError) {
  const TableLm lm;
  EXPECT_THROW(score_sequence(lm, std::vector<TokenId>{}), Error);
}

TEST(TokenProbability, DefaultMatchesDistribution) {
  const TableLm lm;
  const std::vector<TokenId> ctx{5};
  EXPECT_DOUBLE_EQ(lm.token_probability(ctx, 6), lm.next_distribution(ctx)[6]);
}
