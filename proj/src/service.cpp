#include "lmap/service.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <httplib.h>
#include <json.hpp>

#include "lmap/core.hpp"

namespace lmap {
namespace {

using nlohmann::json;

httplib::Client make_client(const Endpoint& endpoint, const ServiceOptions& options) {
  httplib::Client client(endpoint.scheme_host_port);
  const auto seconds = static_cast<time_t>(options.timeout_s);
  const auto micros =
      static_cast<time_t>((options.timeout_s - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  return client;
}

json post_json(const Endpoint& endpoint, const ServiceOptions& options, const json& body) {
  auto client = make_client(endpoint, options);
  auto res = client.Post(endpoint.path, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + endpoint.scheme_host_port + endpoint.path +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("service at " + endpoint.scheme_host_port + endpoint.path +
                         " returned HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("service reply is not JSON: ") + e.what());
  }
}

}  // namespace

Endpoint Endpoint::parse(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw InputError("endpoint must look like http://host:port/path, got '" +
                     std::string(url) + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  if (path_start == std::string_view::npos) {
    ep.scheme_host_port = std::string(url);
    ep.path = "/";
  } else {
    ep.scheme_host_port = std::string(url.substr(0, path_start));
    ep.path = std::string(url.substr(path_start));
  }
  if (ep.scheme_host_port.size() <= scheme_end + 3) {
    throw InputError("endpoint has no host: '" + std::string(url) + "'");
  }
  return ep;
}

std::string label_via_service(std::string_view note, const std::vector<std::string>& categories,
                              const Endpoint& endpoint, const ServiceOptions& options) {
  if (categories.empty()) throw InputError("label_via_service: empty category list");
  const json reply = post_json(endpoint, options, {{"text", note}, {"categories", categories}});
  if (!reply.is_object() || !reply.contains("label") || !reply["label"].is_string()) {
    throw ProtocolError("labeling reply lacks a string 'label' field");
  }
  auto label = reply["label"].get<std::string>();
  if (std::find(categories.begin(), categories.end(), label) == categories.end()) {
    throw ProtocolError("labeling service returned '" + label + "', not one of the categories");
  }
  return label;
}

EmbeddingClient::EmbeddingClient(Endpoint endpoint, ServiceOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {}

std::size_t EmbeddingClient::requests_sent() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::vector<Eigen::VectorXd> EmbeddingClient::embed(const std::vector<std::string>& labels) {
  if (labels.empty()) throw InputError("embed_via_service: empty batch");

  std::vector<std::string> missing;
  {
    std::lock_guard lock(mutex_);
    std::set<std::string> queued;
    for (const auto& l : labels) {
      if (!cache_.count(l) && queued.insert(l).second) missing.push_back(l);
    }
  }

  if (!missing.empty()) {
    const json reply = post_json(endpoint_, options_, {{"texts", missing}});
    if (!reply.is_object() || !reply.contains("vectors") || !reply["vectors"].is_array()) {
      throw ProtocolError("embedding reply lacks a 'vectors' array");
    }
    const auto& vectors = reply["vectors"];
    if (vectors.size() != missing.size()) {
      throw ProtocolError("embedding reply has " + std::to_string(vectors.size()) +
                          " vectors for " + std::to_string(missing.size()) + " texts");
    }
    std::vector<Eigen::VectorXd> received;
    received.reserve(missing.size());
    for (const auto& v : vectors) {
      if (!v.is_array() || v.empty()) throw ProtocolError("embedding vector is not a list");
      Eigen::VectorXd vec(static_cast<Eigen::Index>(v.size()));
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!v[k].is_number()) throw ProtocolError("embedding vector has a non-number");
        vec[static_cast<Eigen::Index>(k)] = v[k].get<double>();
      }
      const double norm = vec.norm();
      if (!std::isfinite(norm) || norm == 0) {
        throw ProtocolError("embedding vector cannot be normalized");
      }
      received.push_back(vec / norm);
    }

    std::lock_guard lock(mutex_);
    ++requests_;
    for (std::size_t k = 0; k < received.size(); ++k) {
      const Eigen::Index dim = received[k].size();
      if (dimension_ == 0) dimension_ = dim;
      if (dim != dimension_) {
        throw ProtocolError("embedding dimension mismatch: " + std::to_string(dim) + " vs " +
                            std::to_string(dimension_));
      }
    }
    for (std::size_t k = 0; k < received.size(); ++k) {
      cache_.try_emplace(missing[k], std::move(received[k]));
    }
  }

  std::lock_guard lock(mutex_);
  std::vector<Eigen::VectorXd> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(cache_.at(l));
  return out;
}

}  // namespace lmap
