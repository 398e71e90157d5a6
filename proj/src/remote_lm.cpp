#include "lyrica/remote_lm.h"

#include <spdlog/spdlog.h>

#include <cmath>

#include "httplib.h"
#include "json.hpp"
#include "lyrica/error.h"

namespace lyrica {

namespace {

httplib::Client make_client(const std::string& endpoint, std::chrono::milliseconds timeout) {
  httplib::Client cli(endpoint);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli;
}

Error unavailable(const std::string& endpoint, const std::string& why) {
  return Error(ErrorCode::kBackendUnavailable, "LM backend " + endpoint + ": " + why);
}

}  // namespace

RemoteLm::RemoteLm(std::string endpoint, Vocabulary vocab, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)), vocab_(std::move(vocab)), timeout_(timeout) {
  auto cli = make_client(endpoint_, timeout_);
  const auto res = cli.Get("/handshake");
  if (!res) throw unavailable(endpoint_, "unreachable (" + httplib::to_string(res.error()) + ")");
  if (res->status != 200) throw unavailable(endpoint_, "handshake status " + std::to_string(res->status));
  std::string remote_hash;
  try {
    remote_hash = nlohmann::json::parse(res->body).at("vocab_hash").get<std::string>();
  } catch (const std::exception& e) {
    throw unavailable(endpoint_, std::string("malformed handshake: ") + e.what());
  }
  if (remote_hash != vocab_.hash()) {
    throw Error(ErrorCode::kConfiguration, "LM backend " + endpoint_ + " vocabulary hash " +
                                               remote_hash + " does not match local " + vocab_.hash());
  }
}

std::vector<double> RemoteLm::next_distribution(std::span<const TokenId> context) const {
  check_ids(vocab_, context);
  nlohmann::json req;
  req["context"] = std::vector<TokenId>(context.begin(), context.end());
  auto cli = make_client(endpoint_, timeout_);
  const auto res = cli.Post("/next", req.dump(), "application/json");
  if (!res) throw unavailable(endpoint_, "request failed (" + httplib::to_string(res.error()) + ")");
  if (res->status != 200) throw unavailable(endpoint_, "status " + std::to_string(res->status));

  std::vector<double> probs;
  try {
    probs = nlohmann::json::parse(res->body).at("probs").get<std::vector<double>>();
  } catch (const std::exception& e) {
    throw unavailable(endpoint_, std::string("malformed response: ") + e.what());
  }
  if (probs.size() != vocab_.size()) {
    throw unavailable(endpoint_, "response has " + std::to_string(probs.size()) +
                                     " probabilities, expected " + std::to_string(vocab_.size()));
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw unavailable(endpoint_, "negative or non-finite probability");
    sum += p;
  }
  if (!(sum > 0.0)) throw unavailable(endpoint_, "all-zero distribution");
  if (std::abs(sum - 1.0) > 1e-6) {
    spdlog::warn("LM backend {} returned a distribution summing to {:.9f}; renormalizing", endpoint_, sum);
  }
  for (auto& p : probs) p /= sum;
  return probs;
}

std::unique_ptr<httplib::Server> make_lm_server(const LmBackend& model) {
  auto srv = std::make_unique<httplib::Server>();
  srv->Get("/handshake", [&model](const httplib::Request&, httplib::Response& res) {
    nlohmann::json j;
    j["vocab_hash"] = model.vocabulary().hash();
    j["vocab_size"] = model.vocabulary().size();
    res.set_content(j.dump(), "application/json");
  });
  srv->Post("/next", [&model](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto ctx = nlohmann::json::parse(req.body).at("context").get<std::vector<TokenId>>();
      nlohmann::json j;
      j["probs"] = model.next_distribution(ctx);
      res.set_content(j.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  return srv;
}

}  // namespace lyrica
