// lyrica: command-line front end for ingest, training, generation and serving.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "lyrica/api.h"
#include "lyrica/bundle.h"
#include "lyrica/corpus.h"
#include "lyrica/error.h"
#include "lyrica/oracle.h"
#include "lyrica/remote_lm.h"
#include "lyrica/rng.h"

using namespace lyrica;
using nlohmann::json;

namespace {

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

json read_config_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfiguration, "cannot read config " + path);
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kConfiguration, "config " + path + " is not a JSON object");
  }
  return j;
}

std::unique_ptr<Segmenter> make_segmenter(const std::string& lexicon_path) {
  if (lexicon_path.empty()) return std::make_unique<WhitespaceSegmenter>();
  return std::make_unique<LexiconSegmenter>(read_word_list(lexicon_path));
}

std::vector<std::string> parse_styles(const std::string& csv) {
  if (csv.empty()) return kDefaultStyles;
  std::vector<std::string> out;
  std::size_t at = 0;
  while (at <= csv.size()) {
    const auto comma = csv.find(',', at);
    const auto piece = trim(csv.substr(at, comma == std::string::npos ? std::string::npos : comma - at));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string::npos) break;
    at = comma + 1;
  }
  return out;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInput, "cannot write " + path);
  for (const auto& l : lines) out << l << '\n';
}

std::shared_ptr<const TrainedBundle> open_bundle(const std::string& dir,
                                                 const std::optional<std::string>& remote) {
  auto bundle = std::make_shared<TrainedBundle>(load_bundle(dir));
  if (remote) {
    bundle->lm = std::make_shared<RemoteLm>(*remote, bundle->ngram->vocabulary());
  }
  return bundle;
}

ServiceConfig service_config(const Common& common) {
  auto j = read_config_json(common.config_path);
  auto config = parse_service_config(j);
  if (!common.config_path.empty()) {
    // Relative paths in the config resolve against the config file.
    const auto base = std::filesystem::path(common.config_path).parent_path();
    auto resolve = [&](std::string& p) {
      if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
    };
    resolve(config.bundle_path);
    resolve(config.data_dir);
  }
  return config;
}

void print_api_error(const ApiResponse& r) {
  std::cerr << "error " << r.status << ": " << r.body["error"].value("code", "") << ": "
            << r.body["error"].value("message", "");
  if (r.body["error"].contains("field")) std::cerr << " (field " << r.body["error"]["field"] << ")";
  std::cerr << '\n';
}

void print_candidates(const json& body) {
  std::cout << "seed " << body["seed"] << "  source: " << body["source"].get<std::string>() << '\n';
  int rank = 1;
  for (const auto& c : body["candidates"]) {
    const auto& s = c["scores"];
    std::printf("#%d  s_rank=%.4f  s_kh=%.4f  s_sr=%.4f  s_div=%.4f\n", rank++, s["s_rank"].get<double>(),
                s["s_kh"].get<double>(), s["s_sr"].get<double>(), s["s_div"].get<double>());
    for (const auto& l : c["lines"]) std::cout << "    " << l.get<std::string>() << '\n';
    for (const auto& v : c["violations"]) {
      std::cout << "    ! line " << v["line"] << ' ' << v["constraint"].get<std::string>() << ": "
                << v["detail"].get<std::string>() << '\n';
    }
  }
  if (!body["rejected"].empty()) {
    std::cout << body["rejected"].size() << " candidate(s) rejected as corpus duplicates\n";
  }
}

int run_api(const Common& common, const std::string& bundle_dir, const std::string& path,
            json body, bool as_json, const std::function<void(const json&)>& print) {
  auto config = service_config(common);
  const std::string dir = bundle_dir.empty() ? config.bundle_path : bundle_dir;
  if (dir.empty()) throw Error(ErrorCode::kConfiguration, "no bundle given (--bundle or config)");
  if (common.seed) body["seed"] = *common.seed;
  ApiService service(open_bundle(dir, config.remote_lm), nullptr, config);
  const auto r = service.handle("POST", path, body.dump());
  if (r.status >= 400) {
    if (as_json) std::cout << r.body.dump(2) << '\n';
    print_api_error(r);
    return 2;
  }
  if (as_json) {
    std::cout << r.body.dump(2) << '\n';
  } else {
    print(r.body);
  }
  return 0;
}

volatile std::sig_atomic_t g_stop = 0;
httplib::Server* g_server = nullptr;

void on_signal(int) {
  g_stop = 1;
  if (g_server) g_server->stop();
}

int serve_until_signal(httplib::Server& srv, const std::string& host, int port) {
  g_server = &srv;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  if (!srv.bind_to_port(host, port)) {
    throw Error(ErrorCode::kConfiguration, "cannot listen on " + host + ":" + std::to_string(port));
  }
  spdlog::info("listening on {}:{}", host, port);
  std::fflush(stdout);
  srv.listen_after_bind();
  g_server = nullptr;
  return 0;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lyrica: controllable lyrics generation engine"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON configuration file");
    sub->add_option("--seed", common.seed, "random seed");
  };

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate a corpus and annotate emotions and keywords");
  std::string corpus_path, seeds_path, stoplist_path, lexicon_path, styles_csv, out_path;
  ingest->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  ingest->add_option("--emotion-seeds", seeds_path, "emotion seed-label JSONL");
  ingest->add_option("--stoplist", stoplist_path, "one stop word per line");
  ingest->add_option("--lexicon", lexicon_path, "word lexicon for segmentation");
  ingest->add_option("--styles", styles_csv, "comma-separated style set");
  ingest->add_option("-o,--out", out_path, "annotated JSONL output")->required();
  add_common(ingest);

  // train
  auto* train = app.add_subcommand("train", "fit the n-gram model, classifiers and PMI table");
  std::string annotated_path, themes_path, rhyme_path, bundle_out;
  int order = 0;
  train->add_option("--annotated", annotated_path, "annotated JSONL from ingest")->required();
  train->add_option("--themes", themes_path, "theme seed-word file")->required();
  train->add_option("--rhyme", rhyme_path, "rhyme table TSV")->required();
  train->add_option("--lexicon", lexicon_path, "word lexicon for segmentation");
  train->add_option("--emotion-seeds", seeds_path, "train the emotion classifier on this file");
  train->add_option("--styles", styles_csv, "comma-separated style set");
  train->add_option("--order", order, "n-gram order");
  train->add_option("-o,--out", bundle_out, "bundle directory")->required();
  add_common(train);

  // generate / continue / revise share spec options
  std::string bundle_dir, style, emotion, theme, acrostic, rhyme_group;
  std::vector<std::string> keywords, lines;
  std::size_t num_lines = 4, n_candidates = 0, k_lines = 1, span_line = 0;
  std::vector<std::size_t> words_per_line{5};
  std::optional<std::size_t> span_start, span_end;
  bool as_json = false;
  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--bundle", bundle_dir, "bundle directory");
    sub->add_option("--style", style, "style tag")->required();
    sub->add_option("--emotion", emotion, "emotion tag")->required();
    sub->add_option("--theme", theme, "theme name");
    sub->add_option("--keyword", keywords, "keyword (repeatable)");
    sub->add_option("--acrostic", acrostic, "one initial grapheme per line");
    sub->add_option("--rhyme", rhyme_group, "rhyme group of line-final graphemes");
    sub->add_option("--lines", num_lines, "number of lines");
    sub->add_option("--words", words_per_line, "graphemes per line (one value or one per line)");
    sub->add_option("-n,--candidates", n_candidates, "number of candidates");
    sub->add_flag("--json", as_json, "print the API response as JSON");
    add_common(sub);
  };
  auto spec_json = [&]() {
    json s{{"style", style}, {"emotion", emotion}, {"num_lines", num_lines}, {"keywords", keywords}};
    s["words_per_line"] = words_per_line.size() == 1 ? json(words_per_line[0]) : json(words_per_line);
    if (!theme.empty()) s["theme"] = theme;
    if (!acrostic.empty()) s["acrostic"] = acrostic;
    if (!rhyme_group.empty()) s["rhyme_group"] = rhyme_group;
    return s;
  };

  auto* generate = app.add_subcommand("generate", "full-text generation");
  add_spec(generate);

  auto* cont = app.add_subcommand("continue", "generate the next lines after preceding ones");
  add_spec(cont);
  cont->add_option("--line", lines, "preceding line (repeatable, in order)")->required();
  cont->add_option("-k,--k-lines", k_lines, "number of new lines");

  auto* rev = app.add_subcommand("revise", "suggest replacements for a line or a span within it");
  rev->add_option("--bundle", bundle_dir, "bundle directory");
  rev->add_option("--style", style, "style tag")->required();
  rev->add_option("--line", lines, "lyric line (repeatable, in order)")->required();
  rev->add_option("--span-line", span_line, "0-based line to revise")->required();
  rev->add_option("--start", span_start, "first grapheme of a word-level span");
  rev->add_option("--end", span_end, "one past the last grapheme of the span");
  rev->add_option("-n,--candidates", n_candidates, "number of suggestions");
  rev->add_flag("--json", as_json, "print the API response as JSON");
  add_common(rev);

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP service");
  std::string listen, data_dir;
  serve->add_option("--bundle", bundle_dir, "bundle directory");
  serve->add_option("--data-dir", data_dir, "draft store directory");
  serve->add_option("--listen", listen, "host:port");
  add_common(serve);

  auto* serve_lm = app.add_subcommand("serve-lm", "expose a bundle's n-gram model over the remote LM protocol");
  serve_lm->add_option("--bundle", bundle_dir, "bundle directory")->required();
  serve_lm->add_option("--listen", listen, "host:port")->required();
  add_common(serve_lm);

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "cross-check a bundle against brute-force references");
  std::size_t n_contexts = 200;
  oracle_cmd->add_option("--bundle", bundle_dir, "bundle directory")->required();
  oracle_cmd->add_option("--annotated", annotated_path, "annotated JSONL the bundle was trained on")->required();
  oracle_cmd->add_option("--contexts", n_contexts, "number of random contexts");
  add_common(oracle_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      const auto styles = parse_styles(styles_csv);
      auto load = load_corpus(corpus_path, styles);
      for (const auto& d : load.diagnostics) std::cerr << "rejected: " << d << '\n';
      std::optional<TextClassifier> clf;
      const bool needs_clf = std::any_of(load.songs.begin(), load.songs.end(),
                                         [](const Song& s) { return !s.emotion; });
      if (needs_clf) {
        clf = seeds_path.empty() ? train_emotion_classifier(load.songs)
                                 : train_emotion_classifier(load_corpus(seeds_path, styles, true).songs);
      }
      std::unordered_set<std::string> stop;
      if (!stoplist_path.empty()) {
        for (auto& w : read_word_list(stoplist_path)) stop.insert(std::move(w));
      }
      const auto segmenter = make_segmenter(lexicon_path);
      const auto annotated = annotate(load.songs, clf ? &*clf : nullptr, *segmenter, stop);
      std::vector<std::string> out;
      for (const auto& a : annotated) out.push_back(annotated_to_json_line(a));
      write_lines(out_path, out);
      std::cerr << "ingested " << annotated.size() << " songs, rejected " << load.diagnostics.size()
                << '\n';
      return 0;
    }

    if (*train) {
      const auto cfg = read_config_json(common.config_path);
      TrainConfig tc;
      if (cfg.contains("train")) {
        const auto& t = cfg["train"];
        tc.order = t.value("order", tc.order);
        tc.samples_per_song = t.value("samples_per_song", tc.samples_per_song);
        tc.keyword_counts.min = t.value("keywords_min", tc.keyword_counts.min);
        tc.keyword_counts.max = t.value("keywords_max", tc.keyword_counts.max);
        tc.pmi_min_count = t.value("pmi_min_count", tc.pmi_min_count);
        tc.pmi_threshold = t.value("pmi_threshold", tc.pmi_threshold);
        tc.seed = t.value("seed", tc.seed);
      }
      if (order > 0) tc.order = order;
      if (common.seed) tc.seed = *common.seed;
      const auto styles = parse_styles(styles_csv);
      const auto songs = load_annotated(annotated_path);
      std::optional<TextClassifier> clf;
      if (!seeds_path.empty()) clf = train_emotion_classifier(load_corpus(seeds_path, styles, true).songs);
      const auto segmenter = make_segmenter(lexicon_path);
      const auto bundle = train_bundle(songs, *segmenter, load_themes(themes_path),
                                       RhymeTable::load(rhyme_path), tc, clf ? &*clf : nullptr, styles);
      save_bundle(bundle, bundle_out);
      std::cerr << "trained bundle: " << bundle.vocabulary().size() << " tokens, "
                << bundle.ngram->history_count() << " histories, " << bundle.pmi.pair_count()
                << " PMI pairs, " << bundle.usable_rhyme_groups().size() << " usable rhyme groups\n";
      return 0;
    }

    if (*generate || *cont) {
      json body{{"spec", spec_json()}};
      if (n_candidates > 0) body["n_candidates"] = n_candidates;
      if (*cont) {
        body["preceding"] = lines;
        body["k_lines"] = k_lines;
        return run_api(common, bundle_dir, "/api/continue", body, as_json, [&](const json& r) {
          for (const auto& l : r["preceding"]) std::cout << "  | " << l.get<std::string>() << '\n';
          print_candidates(r);
        });
      }
      return run_api(common, bundle_dir, "/api/generate", body, as_json, print_candidates);
    }

    if (*rev) {
      json span{{"line", span_line}};
      if (span_start) span["start"] = *span_start;
      if (span_end) span["end"] = *span_end;
      json body{{"style", style}, {"lyrics", lines}, {"span", span}};
      if (n_candidates > 0) body["n_candidates"] = n_candidates;
      return run_api(common, bundle_dir, "/api/revise", body, as_json, [](const json& r) {
        std::cout << "seed " << r["seed"] << '\n';
        if (r["suggestions"].empty()) std::cout << "no suggestions\n";
        for (const auto& s : r["suggestions"]) {
          std::printf("%10.4f  %s\n", s["score"].get<double>(), s["fill"].get<std::string>().c_str());
        }
      });
    }

    if (*serve) {
      auto config = service_config(common);
      apply_env_overrides(config);
      if (!bundle_dir.empty()) config.bundle_path = bundle_dir;
      if (!data_dir.empty()) config.data_dir = data_dir;
      if (!listen.empty()) {
        const auto parsed = parse_service_config({{"listen", listen}});
        config.host = parsed.host;
        config.port = parsed.port;
      }
      if (config.bundle_path.empty() || !std::filesystem::exists(config.bundle_path)) {
        throw Error(ErrorCode::kConfiguration, "bundle path '" + config.bundle_path + "' does not exist");
      }
      if (config.data_dir.empty()) throw Error(ErrorCode::kConfiguration, "no data directory configured");
      auto store = std::make_shared<Store>(config.data_dir);
      ApiService service(open_bundle(config.bundle_path, config.remote_lm), store, config);
      auto srv = make_http_server(service);
      return serve_until_signal(*srv, config.host, config.port);
    }

    if (*serve_lm) {
      const auto parsed = parse_service_config({{"listen", listen}});
      const auto bundle = load_bundle(bundle_dir);
      auto srv = make_lm_server(*bundle.ngram);
      return serve_until_signal(*srv, parsed.host, parsed.port);
    }

    if (*oracle_cmd) {
      const auto bundle = load_bundle(bundle_dir);
      const auto songs = load_annotated(annotated_path);
      const auto& tc = bundle.config;
      const auto examples = build_examples(songs, tc.samples_per_song, tc.keyword_counts, tc.seed);
      std::vector<std::vector<std::string>> sequences;
      for (const auto& ex : examples) sequences.push_back(prefix_lm_sequence(ex));
      const auto& model = *bundle.ngram;
      const auto& vocab = model.vocabulary();

      Rng rng(common.seed.value_or(1));
      double worst = 0.0, worst_sum = 0.0;
      for (std::size_t i = 0; i < n_contexts; ++i) {
        const auto& seq = sequences[rng.below(sequences.size())];
        const auto end = rng.below(seq.size() + 1);
        std::vector<std::string> ctx(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(end));
        if (i % 4 == 3 && !ctx.empty()) ctx.back() = vocab.tokens()[rng.below(vocab.size())];
        const auto got = model.next_distribution(vocab.encode(ctx));
        const auto want = oracle::ngram_distribution(sequences, vocab.tokens(), model.order(), ctx);
        worst = std::max(worst, max_abs_diff(got, want));
        double sum = 0.0;
        for (double p : got) sum += p;
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      }
      std::vector<std::vector<std::string>> docs;
      for (const auto& s : songs) docs.push_back(s.keywords);
      const auto pairs = oracle::pmi_all_pairs(docs, bundle.pmi.min_count());
      double pmi_worst = 0.0;
      std::size_t expected = 0;
      bool pmi_ok = true;
      for (const auto& [ab, v] : pairs) {
        const auto got = bundle.pmi.pmi(ab.first, ab.second);
        if (v >= bundle.pmi.threshold()) {
          ++expected;
          if (!got) {
            pmi_ok = false;
            continue;
          }
          pmi_worst = std::max(pmi_worst, std::abs(*got - v));
        } else if (got) {
          pmi_ok = false;
        }
      }
      pmi_ok = pmi_ok && expected == bundle.pmi.pair_count() && pmi_worst <= 1e-12;
      const bool ngram_ok = worst <= 1e-9 && worst_sum <= 1e-9;
      std::printf("ngram: %zu contexts, max |diff| %.3e, max |sum-1| %.3e  %s\n", n_contexts, worst,
                  worst_sum, ngram_ok ? "ok" : "MISMATCH");
      std::printf("pmi:   %zu pairs, max |diff| %.3e  %s\n", expected, pmi_worst,
                  pmi_ok ? "ok" : "MISMATCH");
      return ngram_ok && pmi_ok ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what();
    if (!e.field().empty()) std::cerr << " (field " << e.field() << ")";
    std::cerr << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
