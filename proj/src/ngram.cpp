#include "lyrica/ngram.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "lyrica/error.h"

namespace lyrica {

namespace {

constexpr const char* kMagic = "lyrica-ngram";
constexpr int kFormatVersion = 1;

}  // namespace

std::size_t NgramModel::KeyHash::operator()(const std::vector<TokenId>& k) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ k.size();
  for (auto id : k) {
    h ^= id;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

TokenSeq prefix_lm_sequence(const TrainingExample& example) {
  TokenSeq seq = example.source;
  seq.emplace_back(kBos);
  seq.insert(seq.end(), example.target.begin(), example.target.end());
  return seq;
}

NgramModel fit_ngram(const std::vector<TrainingExample>& examples, int order,
                     const std::vector<Token>& extra_tokens) {
  if (examples.empty()) throw Error(ErrorCode::kTraining, "no training examples");
  if (order < 1) throw Error(ErrorCode::kTraining, "n-gram order must be >= 1");

  std::vector<TokenSeq> sequences;
  sequences.reserve(examples.size());
  std::vector<Token> all = extra_tokens;
  for (const auto& ex : examples) {
    sequences.push_back(prefix_lm_sequence(ex));
    all.insert(all.end(), sequences.back().begin(), sequences.back().end());
  }

  NgramModel model;
  model.order_ = order;
  model.vocab_ = Vocabulary::from_tokens(all);

  std::unordered_map<std::vector<TokenId>, std::map<TokenId, std::uint32_t>, NgramModel::KeyHash>
      counts;
  for (const auto& seq : sequences) {
    const auto ids = model.vocab_.encode(seq);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t h = 0; h < static_cast<std::size_t>(order) && h <= i; ++h) {
        std::vector<TokenId> key(ids.begin() + static_cast<std::ptrdiff_t>(i - h),
                                 ids.begin() + static_cast<std::ptrdiff_t>(i));
        ++counts[std::move(key)][ids[i]];
      }
    }
  }
  for (auto& [key, followers] : counts) {
    NgramModel::History hist;
    for (const auto& [id, n] : followers) {
      hist.total += n;
      hist.followers.emplace_back(id, n);
    }
    model.table_.emplace(key, std::move(hist));
  }
  return model;
}

const NgramModel::History* NgramModel::history(std::span<const TokenId> h) const {
  const auto it = table_.find(std::vector<TokenId>(h.begin(), h.end()));
  return it == table_.end() ? nullptr : &it->second;
}

std::vector<double> NgramModel::next_distribution(std::span<const TokenId> context) const {
  check_ids(vocab_, context);
  const std::size_t v = vocab_.size();
  std::vector<double> p(v, 1.0 / static_cast<double>(v));
  const std::size_t max_h = std::min<std::size_t>(static_cast<std::size_t>(order_ - 1), context.size());
  for (std::size_t h = 0; h <= max_h; ++h) {
    const auto* hist = history(context.last(h));
    if (hist == nullptr) break;
    const double n1 = static_cast<double>(hist->followers.size());
    const double denom = static_cast<double>(hist->total) + n1;
    const double lambda = n1 / denom;
    for (auto& x : p) x *= lambda;
    for (const auto& [id, n] : hist->followers) p[id] += static_cast<double>(n) / denom;
  }
  return p;
}

double NgramModel::token_probability(std::span<const TokenId> context, TokenId token) const {
  check_ids(vocab_, context);
  if (token >= vocab_.size()) throw Error(ErrorCode::kInput, "token id out of range");
  double p = 1.0 / static_cast<double>(vocab_.size());
  const std::size_t max_h = std::min<std::size_t>(static_cast<std::size_t>(order_ - 1), context.size());
  for (std::size_t h = 0; h <= max_h; ++h) {
    const auto* hist = history(context.last(h));
    if (hist == nullptr) break;
    const double n1 = static_cast<double>(hist->followers.size());
    const double denom = static_cast<double>(hist->total) + n1;
    const auto it = std::lower_bound(
        hist->followers.begin(), hist->followers.end(), token,
        [](const std::pair<TokenId, std::uint32_t>& a, TokenId t) { return a.first < t; });
    const double c = (it != hist->followers.end() && it->first == token) ? it->second : 0.0;
    p = p * (n1 / denom) + c / denom;
  }
  return p;
}

void NgramModel::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInput, "cannot write model: " + path);
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "order " << order_ << '\n';
  out << "vocab " << vocab_.size() << '\n';
  for (const auto& t : vocab_.tokens()) out << nlohmann::json(t).dump() << '\n';

  // Sorted for byte-stable artifacts.
  std::vector<const std::pair<const std::vector<TokenId>, History>*> entries;
  for (const auto& e : table_) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });
  out << "histories " << entries.size() << '\n';
  for (const auto* e : entries) {
    out << e->first.size();
    for (auto id : e->first) out << ' ' << id;
    out << ' ' << e->second.followers.size();
    for (const auto& [id, n] : e->second.followers) out << ' ' << id << ' ' << n;
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::kInput, "failed writing model: " + path);
}

NgramModel NgramModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kInput, "cannot read model: " + path);
  auto fail = [&](const std::string& why) {
    return Error(ErrorCode::kConfiguration, "model " + path + ": " + why);
  };
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != kMagic) throw fail("not an n-gram model file");
  if (version != kFormatVersion) {
    throw fail("format version " + std::to_string(version) + " is not supported (expected " +
               std::to_string(kFormatVersion) + ")");
  }
  std::string word;
  NgramModel model;
  std::size_t vocab_size = 0;
  in >> word >> model.order_;
  if (word != "order" || model.order_ < 1) throw fail("bad order");
  in >> word >> vocab_size;
  if (word != "vocab") throw fail("bad vocabulary header");
  in.ignore(1, '\n');
  std::vector<Token> tokens;
  std::string line;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    if (!std::getline(in, line)) throw fail("truncated vocabulary");
    tokens.push_back(nlohmann::json::parse(line).get<std::string>());
  }
  model.vocab_ = Vocabulary::from_ordered(std::move(tokens));
  std::size_t n_hist = 0;
  in >> word >> n_hist;
  if (word != "histories") throw fail("bad history header");
  for (std::size_t i = 0; i < n_hist; ++i) {
    std::size_t klen = 0;
    in >> klen;
    std::vector<TokenId> key(klen);
    for (auto& id : key) in >> id;
    std::size_t nf = 0;
    in >> nf;
    History hist;
    for (std::size_t f = 0; f < nf; ++f) {
      TokenId id = 0;
      std::uint32_t n = 0;
      in >> id >> n;
      hist.followers.emplace_back(id, n);
      hist.total += n;
    }
    if (!in) throw fail("truncated history table");
    check_ids(model.vocab_, key);
    model.table_.emplace(std::move(key), std::move(hist));
  }
  return model;
}

}  // namespace lyrica
