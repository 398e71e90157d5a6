#include "lyrica/classifier.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lyrica/error.h"
#include "lyrica/text.h"

namespace lyrica {

TextClassifier train_classifier(const std::vector<LabeledDoc>& docs) {
  std::map<std::string, double> class_weight;
  std::map<std::string, std::map<Token, double>> counts;
  std::set<Token> vocab;
  for (const auto& d : docs) {
    if (d.weight <= 0.0) throw Error(ErrorCode::kTraining, "document weight must be positive");
    class_weight[d.label] += d.weight;
    auto& c = counts[d.label];
    for (const auto& t : d.tokens) {
      c[t] += d.weight;
      vocab.insert(t);
    }
  }
  if (class_weight.size() < 2) {
    throw Error(ErrorCode::kTraining, "classifier needs at least two classes");
  }

  TextClassifier clf;
  double total = 0.0;
  for (const auto& [label, w] : class_weight) total += w;
  const auto v = static_cast<double>(vocab.size());
  for (const auto& [label, w] : class_weight) {
    clf.classes_.push_back(label);
    clf.log_priors_.push_back(std::log(w / total));
    const auto& c = counts[label];
    double class_total = 0.0;
    for (const auto& [tok, n] : c) class_total += n;
    const double denom = std::log(class_total + v);
    std::map<Token, double> ll;
    for (const auto& [tok, n] : c) ll[tok] = std::log(n + 1.0) - denom;
    clf.log_likelihoods_.push_back(std::move(ll));
    clf.log_unseen_.push_back(-denom);
  }
  clf.vocab_ = std::move(vocab);
  clf.vocab_size_ = clf.vocab_.size();
  return clf;
}

bool TextClassifier::has_class(const std::string& label) const {
  return std::find(classes_.begin(), classes_.end(), label) != classes_.end();
}

std::size_t TextClassifier::index_of(const std::string& label) const {
  const auto it = std::find(classes_.begin(), classes_.end(), label);
  if (it == classes_.end()) throw Error(ErrorCode::kInput, "unknown class: " + label);
  return static_cast<std::size_t>(it - classes_.begin());
}

double TextClassifier::log_prior(const std::string& label) const {
  return log_priors_[index_of(label)];
}

double TextClassifier::log_likelihood(const std::string& label, const Token& token) const {
  const auto c = index_of(label);
  if (!vocab_.contains(token)) return 0.0;
  const auto& ll = log_likelihoods_[c];
  const auto it = ll.find(token);
  return it == ll.end() ? log_unseen_[c] : it->second;
}

std::vector<double> TextClassifier::posterior(const TokenSeq& doc) const {
  std::vector<double> scores = log_priors_;
  for (const auto& t : doc) {
    if (!vocab_.contains(t)) continue;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      const auto it = log_likelihoods_[c].find(t);
      scores[c] += it == log_likelihoods_[c].end() ? log_unseen_[c] : it->second;
    }
  }
  const double m = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (auto& s : scores) {
    s = std::exp(s - m);
    z += s;
  }
  for (auto& s : scores) s /= z;
  return scores;
}

double TextClassifier::probability(const TokenSeq& doc, const std::string& label) const {
  return posterior(doc)[index_of(label)];
}

std::string TextClassifier::predict(const TokenSeq& doc) const {
  const auto p = posterior(doc);
  return classes_[static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin())];
}

nlohmann::json TextClassifier::to_json() const {
  nlohmann::json j;
  j["classes"] = classes_;
  j["log_priors"] = log_priors_;
  j["log_unseen"] = log_unseen_;
  j["vocab"] = std::vector<Token>(vocab_.begin(), vocab_.end());
  j["log_likelihoods"] = log_likelihoods_;
  return j;
}

TextClassifier TextClassifier::from_json(const nlohmann::json& j) {
  TextClassifier clf;
  clf.classes_ = j.at("classes").get<std::vector<std::string>>();
  clf.log_priors_ = j.at("log_priors").get<std::vector<double>>();
  clf.log_unseen_ = j.at("log_unseen").get<std::vector<double>>();
  const auto vocab = j.at("vocab").get<std::vector<Token>>();
  clf.vocab_ = std::set<Token>(vocab.begin(), vocab.end());
  clf.vocab_size_ = clf.vocab_.size();
  clf.log_likelihoods_ = j.at("log_likelihoods").get<std::vector<std::map<Token, double>>>();
  if (clf.classes_.size() < 2 || clf.log_priors_.size() != clf.classes_.size() ||
      clf.log_likelihoods_.size() != clf.classes_.size() ||
      clf.log_unseen_.size() != clf.classes_.size()) {
    throw Error(ErrorCode::kConfiguration, "malformed classifier artifact");
  }
  return clf;
}

TokenSeq document_tokens(const std::vector<std::string>& lines) {
  TokenSeq out;
  for (const auto& line : lines) {
    for (auto& g : graphemes(line)) {
      if (is_whitespace(g) || is_punctuation(g)) continue;
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace lyrica
