#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include "lyrica/error.h"
#include "lyrica/ngram.h"
#include "lyrica/oracle.h"
#include "lyrica/rng.h"
#include "test_support.h"

using namespace lyrica;

namespace {

std::vector<TrainingExample> fixture_examples() {
  const auto tc = lyrica::testing::fixture_train_config();
  return build_examples(lyrica::testing::fixture_annotated(), tc.samples_per_song, tc.keyword_counts, tc.seed);
}

std::vector<TokenSeq> sequences_of(const std::vector<TrainingExample>& ex) {
  std::vector<TokenSeq> out;
  for (const auto& e : ex) out.push_back(prefix_lm_sequence(e));
  return out;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST(PrefixLm, SourceBosTarget) {
  const TrainingExample ex{{"<Pop>", "[SEP]", "<positive>"}, {"b", "a", "[EOS]"}};
  EXPECT_EQ(prefix_lm_sequence(ex), (TokenSeq{"<Pop>", "[SEP]", "<positive>", "[BOS]", "b", "a", "[EOS]"}));
}

TEST(FitNgram, EmptyExamplesIsTrainingError) {
  try {
    fit_ngram({}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTraining);
  }
}

TEST(FitNgram, VocabularyIsSeenTokensPlusSentinelsAndExtras) {
  const auto m = fit_ngram({{{"<Pop>"}, {"x", "[EOS]"}}}, 2, {"<Folk>"});
  EXPECT_EQ(m.vocabulary().size(), 5u + 3u);
  EXPECT_TRUE(m.vocabulary().find("<Folk>"));
}

TEST(Ngram, MatchesOracleOnFixtureContexts) {
  const auto ex = fixture_examples();
  const auto model = fit_ngram(ex, 4);
  const auto seqs = sequences_of(ex);
  const auto& vocab = model.vocabulary();
  Rng rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto& seq = seqs[rng.below(seqs.size())];
    TokenSeq ctx(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(rng.below(seq.size() + 1)));
    if (i % 3 == 0 && !ctx.empty()) ctx[rng.below(ctx.size())] = vocab.tokens()[rng.below(vocab.size())];
    const auto got = model.next_distribution(vocab.encode(ctx));
    const auto want = oracle::ngram_distribution(seqs, vocab.tokens(), 4, ctx);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t w = 0; w < got.size(); ++w) ASSERT_NEAR(got[w], want[w], 1e-9) << i << " " << w;
    EXPECT_NEAR(sum(got), 1.0, 1e-9);
  }
}

TEST(Ngram, TokenProbabilityAgreesWithDistribution) {
  const auto model = fit_ngram(fixture_examples(), 4);
  const auto ctx = model.vocabulary().encode(TokenSeq{"<Pop>", "[SEP]", "<positive>", "[BOS]"});
  const auto dist = model.next_distribution(ctx);
  for (TokenId t = 0; t < dist.size(); ++t) EXPECT_NEAR(model.token_probability(ctx, t), dist[t], 1e-15);
}

TEST(Ngram, AlwaysFollowingTokenIsTheMode) {
  std::vector<TrainingExample> ex;
  for (const auto& first : {"x", "y", "z", "x"}) ex.push_back({{"<Pop>"}, {"t", first, "[EOS]"}});
  const auto model = fit_ngram(ex, 3);
  const auto& v = model.vocabulary();
  const auto dist = model.next_distribution(v.encode(TokenSeq{"[BOS]"}));
  const auto best = std::max_element(dist.begin(), dist.end()) - dist.begin();
  EXPECT_EQ(v.token(static_cast<TokenId>(best)), "t");
}

TEST(Ngram, BosDistributionMatchesHandCount) {
  // Two sequences; after [BOS] we see "a" twice. Unigram counts over the
  // eight tokens: <P>:2 [BOS]:2 a:2 b:1 [EOS]:2 (+ c:1), N1+ at empty history = 6.
  const std::vector<TrainingExample> ex{{{"<P>"}, {"a", "b", "[EOS]"}}, {{"<P>"}, {"a", "c", "[EOS]"}}};
  const auto model = fit_ngram(ex, 2);
  const auto& v = model.vocabulary();
  const double V = static_cast<double>(v.size());  // 5 sentinels + <P> a b c = 9
  ASSERT_EQ(V, 9.0);
  const double total = 10.0, types = 6.0;
  auto uni = [&](double c) { return (c + types / V) / (total + types); };
  // History [BOS]: total 2, one type ("a").
  auto bi = [&](double c, double pu) { return (c + 1.0 * pu) / (2.0 + 1.0); };
  const auto dist = model.next_distribution(v.encode(TokenSeq{"[BOS]"}));
  EXPECT_NEAR(dist[*v.find("a")], bi(2, uni(2)), 1e-15);
  EXPECT_NEAR(dist[*v.find("b")], bi(0, uni(1)), 1e-15);
  EXPECT_NEAR(dist[Vocabulary::kMaskId], bi(0, uni(0)), 1e-15);
}

TEST(Ngram, UnseenContextFallsBackToUnigram) {
  const auto model = fit_ngram(fixture_examples(), 4);
  const auto& v = model.vocabulary();
  const std::vector<TokenId> unseen{Vocabulary::kMaskId, Vocabulary::kMaskId, Vocabulary::kMaskId};
  EXPECT_EQ(model.next_distribution(unseen), model.next_distribution(std::vector<TokenId>{}));
  (void)v;
}

TEST(Ngram, OrderOneIgnoresContext) {
  const auto model = fit_ngram(fixture_examples(), 1);
  const auto& v = model.vocabulary();
  const auto a = model.next_distribution(v.encode(TokenSeq{"[BOS]"}));
  const auto b = model.next_distribution(v.encode(TokenSeq{"<Folk>", "[SEP]", "月"}));
  EXPECT_EQ(a, b);
}

TEST(Ngram, DeterministicAndEveryTokenPositive) {
  const auto model = fit_ngram(fixture_examples(), 4);
  const auto ctx = model.vocabulary().encode(TokenSeq{"[BOS]", "光"});
  const auto a = model.next_distribution(ctx);
  EXPECT_EQ(a, model.next_distribution(ctx));
  for (double p : a) EXPECT_GT(p, 0.0);
}

TEST(Ngram, UnknownIdIsInputError) {
  const auto model = fit_ngram(fixture_examples(), 2);
  const std::vector<TokenId> bad{static_cast<TokenId>(model.vocabulary().size())};
  EXPECT_THROW(model.next_distribution(bad), Error);
}

TEST(Ngram, ScoreSequenceMatchesOracleChain) {
  const auto ex = fixture_examples();
  const auto model = fit_ngram(ex, 3);
  const auto seqs = sequences_of(ex);
  const auto& seq = seqs[5];
  double want = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const TokenSeq ctx(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(i));
    const auto p = oracle::ngram_distribution(seqs, model.vocabulary().tokens(), 3, ctx);
    want += std::log(p[model.vocabulary().encode(seq[i])]);
  }
  EXPECT_NEAR(score_sequence(model, model.vocabulary().encode(seq)), want, 1e-9);
}

TEST(Ngram, SaveLoadRoundTrip) {
  lyrica::testing::TempDir dir;
  const auto model = fit_ngram(fixture_examples(), 4);
  const auto path = dir.str() + "/m.ngram";
  model.save(path);
  const auto back = NgramModel::load(path);
  EXPECT_EQ(back.order(), 4);
  EXPECT_EQ(back.vocabulary().tokens(), model.vocabulary().tokens());
  EXPECT_EQ(back.history_count(), model.history_count());
  const auto ctx = model.vocabulary().encode(TokenSeq{"<Pop>", "[SEP]", "<positive>", "[BOS]", "光"});
  EXPECT_EQ(back.next_distribution(ctx), model.next_distribution(ctx));
}

TEST(Ngram, VersionMismatchFailsLoudly) {
  lyrica::testing::TempDir dir;
  const auto path = dir.str() + "/m.ngram";
  fit_ngram(fixture_examples(), 2).save(path);
  std::string text;
  {
    std::ifstream in(path);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  text.replace(text.find("lyrica-ngram 1"), 14, "lyrica-ngram 9");
  std::ofstream(path, std::ios::trunc) << text;
  try {
    NgramModel::load(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfiguration);
  }
}
