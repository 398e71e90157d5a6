#include "test_support.h"

#include <mutex>
#include <random>

#include "lyrica/rng.h"

namespace lyrica::testing {

namespace fs = std::filesystem;

std::string fixture(const std::string& name) { return std::string(LYRICA_FIXTURE_DIR) + "/" + name; }

const std::vector<AnnotatedSong>& fixture_annotated() {
  static const std::vector<AnnotatedSong> songs = [] {
    const auto load = load_corpus(fixture("corpus.jsonl"));
    const auto seeds = load_corpus(fixture("emotion_seeds.jsonl"), kDefaultStyles, true);
    const auto clf = train_emotion_classifier(seeds.songs);
    std::unordered_set<std::string> stop;
    for (auto& w : read_word_list(fixture("stoplist.txt"))) stop.insert(std::move(w));
    const LexiconSegmenter seg(read_word_list(fixture("lexicon.txt")));
    return annotate(load.songs, &clf, seg, stop);
  }();
  return songs;
}

TrainConfig fixture_train_config() { return TrainConfig{}; }

std::shared_ptr<const TrainedBundle> fixture_bundle() {
  static std::shared_ptr<const TrainedBundle> bundle;
  static std::once_flag once;
  std::call_once(once, [] {
    const auto seeds = load_corpus(fixture("emotion_seeds.jsonl"), kDefaultStyles, true);
    const auto clf = train_emotion_classifier(seeds.songs);
    const LexiconSegmenter seg(read_word_list(fixture("lexicon.txt")));
    bundle = std::make_shared<const TrainedBundle>(
        train_bundle(fixture_annotated(), seg, load_themes(fixture("themes.json")),
                     RhymeTable::load(fixture("rhyme.tsv")), fixture_train_config(), &clf));
  });
  return bundle;
}

TempDir::TempDir() {
  static std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    auto p = fs::temp_directory_path() / ("lyrica-test-" + std::to_string(rng()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::vector<LabeledDoc> disjoint_corpus(const std::vector<std::string>& classes,
                                        std::size_t docs_per_class, std::size_t doc_length,
                                        std::size_t vocab_per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledDoc> out;
  for (std::size_t d = 0; d < docs_per_class; ++d) {
    for (const auto& c : classes) {
      LabeledDoc doc;
      doc.label = c;
      for (std::size_t i = 0; i < doc_length; ++i) {
        doc.tokens.push_back(c + ":" + std::to_string(rng.below(vocab_per_class)));
      }
      out.push_back(std::move(doc));
    }
  }
  return out;
}

}  // namespace lyrica::testing
