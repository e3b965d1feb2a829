#pragma once

#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace lmap {

/// "http://host:port/path" split into the pieces cpp-httplib wants.
struct Endpoint {
  std::string scheme_host_port;
  std::string path;

  static Endpoint parse(std::string_view url);
};

struct ServiceOptions {
  double timeout_s = 10.0;
};

/// Asks an external text-labeling service to pick one of `categories` for a
/// note. POST {"text", "categories"} -> {"label"}.
///
/// Throws TransportError when the service cannot be reached or answers with a
/// non-2xx status, and ProtocolError when the reply is malformed or names a
/// label outside `categories`.
std::string label_via_service(std::string_view note, const std::vector<std::string>& categories,
                              const Endpoint& endpoint, const ServiceOptions& options = {});

/// Client for an external text-embedding service. POST {"texts"} ->
/// {"vectors"}. Vectors are L2-normalized on receipt and cached per label, so
/// repeated labels always map to the same vector.
class EmbeddingClient {
 public:
  explicit EmbeddingClient(Endpoint endpoint, ServiceOptions options = {});

  /// Throws InputError for an empty batch, TransportError on network failure
  /// and ProtocolError on a malformed reply or mixed dimensions.
  std::vector<Eigen::VectorXd> embed(const std::vector<std::string>& labels);

  std::size_t requests_sent() const;

 private:
  Endpoint endpoint_;
  ServiceOptions options_;
  mutable std::mutex mutex_;
  std::map<std::string, Eigen::VectorXd> cache_;
  Eigen::Index dimension_ = 0;
  std::size_t requests_ = 0;
};

inline std::vector<Eigen::VectorXd> embed_via_service(const std::vector<std::string>& labels,
                                                      const Endpoint& endpoint,
                                                      const ServiceOptions& options = {}) {
  EmbeddingClient client(endpoint, options);
  return client.embed(labels);
}

}  // namespace lmap
