#include "lyrica/bundle.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "json.hpp"
#include "lyrica/error.h"

namespace lyrica {

namespace {

constexpr const char* kBundleFormat = "lyrica-bundle";
constexpr int kBundleVersion = 1;

std::vector<Song> plain_songs(const std::vector<AnnotatedSong>& songs) {
  std::vector<Song> out;
  out.reserve(songs.size());
  for (const auto& s : songs) out.push_back(s.song);
  return out;
}

}  // namespace

std::vector<std::string> TrainedBundle::usable_rhyme_groups() const {
  std::vector<std::string> out;
  const auto& vocab = vocabulary();
  for (const auto& g : rhyme.groups()) {
    for (const auto& m : rhyme.members(g)) {
      const auto id = vocab.find(m);
      if (id && vocab.is_text(*id)) {
        out.push_back(g);
        break;
      }
    }
  }
  return out;
}

TextClassifier train_emotion_classifier(const std::vector<Song>& labeled) {
  std::vector<LabeledDoc> docs;
  for (const auto& s : labeled) {
    if (!s.emotion) continue;
    docs.push_back({document_tokens(s.lines), *s.emotion});
  }
  return train_classifier(docs);
}

TrainedBundle train_bundle(const std::vector<AnnotatedSong>& songs, const Segmenter& segmenter,
                           const ThemeConfig& themes, const RhymeTable& rhyme,
                           const TrainConfig& config, const TextClassifier* emotion_clf,
                           const std::vector<std::string>& styles) {
  if (songs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no songs to train on");
  TrainedBundle b;
  b.styles = styles;
  b.emotions = kEmotions;
  b.config = config;

  std::vector<Token> extra;
  for (const auto& s : b.styles) extra.push_back(attribute_tag(s));
  for (const auto& e : b.emotions) extra.push_back(attribute_tag(e));
  const auto examples =
      build_examples(songs, config.samples_per_song, config.keyword_counts, config.seed);
  b.ngram = std::make_shared<const NgramModel>(fit_ngram(examples, config.order, extra));
  b.lm = b.ngram;

  std::vector<LabeledDoc> style_docs;
  std::vector<LabeledDoc> emotion_docs;
  for (const auto& s : songs) {
    auto tokens = document_tokens(s.song.lines);
    style_docs.push_back({tokens, s.song.style});
    emotion_docs.push_back({std::move(tokens), s.emotion});
  }
  b.style_classifier = train_classifier(style_docs);
  b.emotion_classifier = emotion_clf ? *emotion_clf : train_classifier(emotion_docs);

  b.pmi = build_pmi(songs, config.pmi_min_count, config.pmi_threshold);
  b.themes = themes;
  for (const auto& [name, seeds] : themes) {
    b.theme_keyword_lists[name] = theme_keywords(b.pmi, seeds);
  }
  b.rhyme = rhyme;
  b.line_index = build_line_index(plain_songs(songs));

  std::set<std::string> lexicon;
  for (const auto& s : songs) {
    for (const auto& line : s.song.lines) {
      for (const auto& span : segmenter.segment(graphemes(line))) {
        const auto& w = span.text;
        const auto gs = graphemes(w);
        if (std::any_of(gs.begin(), gs.end(),
                        [](const Grapheme& g) { return is_punctuation(g) || is_whitespace(g); })) {
          continue;
        }
        lexicon.insert(w);
      }
    }
  }
  b.lexicon.assign(lexicon.begin(), lexicon.end());
  return b;
}

void save_bundle(const TrainedBundle& bundle, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  nlohmann::json j;
  j["format"] = kBundleFormat;
  j["version"] = kBundleVersion;
  j["styles"] = bundle.styles;
  j["emotions"] = bundle.emotions;
  j["style_classifier"] = bundle.style_classifier.to_json();
  j["emotion_classifier"] = bundle.emotion_classifier.to_json();
  j["pmi"] = bundle.pmi.to_json();
  j["themes"] = bundle.themes;
  j["theme_keywords"] = bundle.theme_keyword_lists;
  j["rhyme_table"] = bundle.rhyme.to_tsv();
  std::vector<std::string> lines(bundle.line_index.normalized_lines().begin(),
                                 bundle.line_index.normalized_lines().end());
  std::sort(lines.begin(), lines.end());
  j["corpus_lines"] = lines;
  j["lexicon"] = bundle.lexicon;
  j["train"] = {{"order", bundle.config.order},
                {"samples_per_song", bundle.config.samples_per_song},
                {"keyword_min", bundle.config.keyword_counts.min},
                {"keyword_max", bundle.config.keyword_counts.max},
                {"seed", bundle.config.seed},
                {"pmi_min_count", bundle.config.pmi_min_count},
                {"pmi_threshold", bundle.config.pmi_threshold}};

  std::ofstream out(fs::path(dir) / "manifest.json", std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInput, "cannot write bundle manifest in " + dir);
  out << j.dump(1) << '\n';
  bundle.ngram->save((fs::path(dir) / "model.ngram").string());
}

TrainedBundle load_bundle(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto manifest = fs::path(dir) / "manifest.json";
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::kConfiguration, "no bundle manifest at " + manifest.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, "malformed bundle manifest: " + std::string(e.what()));
  }
  if (j.value("format", "") != kBundleFormat) {
    throw Error(ErrorCode::kConfiguration, manifest.string() + " is not a bundle manifest");
  }
  if (j.value("version", 0) != kBundleVersion) {
    throw Error(ErrorCode::kConfiguration,
                "bundle version " + std::to_string(j.value("version", 0)) + " is not supported (expected " +
                    std::to_string(kBundleVersion) + ")");
  }
  TrainedBundle b;
  try {
    b.styles = j.at("styles").get<std::vector<std::string>>();
    b.emotions = j.at("emotions").get<std::vector<std::string>>();
    b.style_classifier = TextClassifier::from_json(j.at("style_classifier"));
    b.emotion_classifier = TextClassifier::from_json(j.at("emotion_classifier"));
    b.pmi = PmiTable::from_json(j.at("pmi"));
    b.themes = j.at("themes").get<ThemeConfig>();
    b.theme_keyword_lists = j.at("theme_keywords").get<std::map<std::string, std::vector<std::string>>>();
    b.rhyme = RhymeTable::parse(j.at("rhyme_table").get<std::string>());
    const auto lines = j.at("corpus_lines").get<std::vector<std::string>>();
    b.line_index = LineIndex(std::unordered_set<std::string>(lines.begin(), lines.end()));
    b.lexicon = j.at("lexicon").get<std::vector<std::string>>();
    const auto& t = j.at("train");
    b.config.order = t.at("order").get<int>();
    b.config.samples_per_song = t.at("samples_per_song").get<std::size_t>();
    b.config.keyword_counts.min = t.at("keyword_min").get<std::size_t>();
    b.config.keyword_counts.max = t.at("keyword_max").get<std::size_t>();
    b.config.seed = t.at("seed").get<std::uint64_t>();
    b.config.pmi_min_count = t.at("pmi_min_count").get<std::size_t>();
    b.config.pmi_threshold = t.at("pmi_threshold").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfiguration, "malformed bundle manifest: " + std::string(e.what()));
  }
  b.ngram = std::make_shared<const NgramModel>(NgramModel::load((fs::path(dir) / "model.ngram").string()));
  b.lm = b.ngram;
  return b;
}

}  // namespace lyrica
