/**
 * @file api.h
 * @brief JSON request handling for the HTTP service.
 *
 * ApiService maps (method, path, body) to (status, JSON body) without any
 * networking, so the contract can be exercised in-process. make_http_server
 * wires it onto an httplib server. Request and response schemas are in
 * docs/api.md.
 */
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "httplib.h"
#include "json.hpp"
#include "lyrica/bundle.h"
#include "lyrica/pipeline.h"
#include "lyrica/store.h"

namespace lyrica {

struct ServiceLimits {
  std::size_t max_lines = 32;
  std::size_t max_words_per_line = 32;
  std::size_t max_candidates = 10;
  std::size_t max_keywords = 16;
  std::size_t max_body_bytes = 1 << 20;
};

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string bundle_path;
  std::string data_dir;
  std::size_t top_k = 16;
  double temperature = 1.0;
  std::size_t n_candidates = 3;
  RankWeights weights;
  std::size_t oversample = 3;
  std::size_t max_retries = 2;
  std::size_t theme_keyword_count = 4;
  std::size_t timeout_ms = 30000;
  ServiceLimits limits;
  std::optional<std::string> remote_lm;

  /// Throws kConfiguration for negative weights, k = 0 and similar.
  void validate() const;
};

/// Reads a JSON config file; missing keys keep their defaults.
ServiceConfig parse_service_config(const nlohmann::json& j);
ServiceConfig load_service_config(const std::string& path);
/// LYRICA_LISTEN ("host:port") and LYRICA_DATA_DIR.
void apply_env_overrides(ServiceConfig& config);

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

int http_status(ErrorCode code);
nlohmann::json error_body(const Error& e);

class ApiService {
 public:
  ApiService(std::shared_ptr<const TrainedBundle> bundle, std::shared_ptr<Store> store,
             ServiceConfig config);

  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body);

  nlohmann::json meta() const;
  const ServiceConfig& config() const { return config_; }

 private:
  ApiResponse generate(const nlohmann::json& req);
  ApiResponse continue_lines(const nlohmann::json& req);
  ApiResponse revise_span(const nlohmann::json& req);
  ApiResponse drafts(const std::string& method, const std::vector<std::string>& parts,
                     const nlohmann::json& req);

  std::uint64_t request_seed(const nlohmann::json& req);
  GenerationOptions generation_options(const nlohmann::json& req) const;
  std::size_t candidate_count(const nlohmann::json& req) const;
  ControlSpec checked_spec(const nlohmann::json& req) const;

  std::shared_ptr<const TrainedBundle> bundle_;
  std::shared_ptr<Store> store_;
  ServiceConfig config_;
};

std::unique_ptr<httplib::Server> make_http_server(ApiService& service);

}  // namespace lyrica
