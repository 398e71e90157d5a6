#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "lyrica/lm.h"

namespace httplib {
class Server;
}

namespace lyrica {

/// Client for an external next-token service.
///
/// Protocol (JSON over HTTP):
///   GET  /handshake -> {"vocab_hash": "<hex>", "vocab_size": N}
///   POST /next  {"context": [ids]} -> {"probs": [p_0 .. p_{N-1}]}
///
/// The constructor performs the handshake. Responses whose sum is more than
/// 1e-6 away from 1 are renormalized with a logged warning. Transport
/// failures surface as kBackendUnavailable; there is no local fallback.
class RemoteLm final : public LmBackend {
 public:
  RemoteLm(std::string endpoint, Vocabulary vocab,
           std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

  const Vocabulary& vocabulary() const override { return vocab_; }
  std::vector<double> next_distribution(std::span<const TokenId> context) const override;

  const std::string& endpoint() const { return endpoint_; }

 private:
  std::string endpoint_;
  Vocabulary vocab_;
  std::chrono::milliseconds timeout_;
};

/// Serves `model` over the RemoteLm protocol. Used for testing and to expose a
/// locally trained model to other processes.
std::unique_ptr<httplib::Server> make_lm_server(const LmBackend& model);

}  // namespace lyrica
