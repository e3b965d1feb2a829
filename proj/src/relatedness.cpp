#include "lmap/relatedness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include "lmap/identify.hpp"
#include "lmap/service.hpp"

namespace lmap {

RelatednessMatrix::RelatednessMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw InputError("relatedness matrix must be square");
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    if (values_(i, i) != 0) throw InputError("relatedness diagonal must be zero");
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
      const double v = values_(i, j);
      if (!(v >= 0 && v <= 1)) throw InputError("relatedness entries must lie in [0, 1]");
      if (v != values_(j, i)) throw InputError("relatedness matrix must be symmetric");
    }
  }
}

void RelatednessMatrix::set(std::size_t i, std::size_t j, double score) {
  if (i == j) throw InputError("relatedness diagonal is fixed at zero");
  if (!(score >= 0 && score <= 1)) throw InputError("relatedness score outside [0, 1]");
  const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
  values_(a, b) = score;
  values_(b, a) = score;
}

std::vector<RelatednessMatrix::Entry> RelatednessMatrix::nonzero_entries() const {
  std::vector<Entry> out;
  const auto n = values_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (values_(i, j) != 0) {
        out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), values_(i, j)});
      }
    }
  }
  return out;
}

ProviderKind parse_provider(std::string_view name) {
  if (name == "exact-id" || name == "exact") return ProviderKind::ExactId;
  if (name == "lexical") return ProviderKind::Lexical;
  if (name == "service") return ProviderKind::Service;
  throw InputError("unknown relatedness provider '" + std::string(name) +
                   "' (expected exact-id, lexical or service)");
}

double exact_id_score(std::string_view a, std::string_view b) { return a == b ? 1.0 : 0.0; }

Eigen::VectorXd lexical_embed(std::string_view label) {
  if (label.empty()) throw InputError("lexical_embed: empty label");
  const std::string padded = "\x02" + ascii_lower(label) + "\x03";
  Eigen::VectorXd v = Eigen::VectorXd::Zero(kLexicalDimension);
  for (std::size_t k = 0; k + 3 <= padded.size(); ++k) {
    std::uint32_t h = 2166136261u;
    for (std::size_t m = k; m < k + 3; ++m) {
      h ^= static_cast<unsigned char>(padded[m]);
      h *= 16777619u;
    }
    v[static_cast<Eigen::Index>(h % kLexicalDimension)] += 1.0;
  }
  return v / v.norm();
}

double score_from_vectors(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double tau) {
  if (u.size() != v.size()) throw InputError("score_from_vectors: dimension mismatch");
  if (!(tau > 0)) throw InputError("score_from_vectors: tau must be positive");
  const double d2 = (u - v).squaredNorm();
  return std::exp(-d2 / (2 * tau * tau));
}

namespace {

Eigen::MatrixXd kernel_matrix(const std::vector<Eigen::VectorXd>& vectors, double tau) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      out(a, b) = out(b, a) = score_from_vectors(vectors[a], vectors[b], tau);
    }
  }
  return out;
}

}  // namespace

LabelScorer exact_id_scorer() {
  return [](const std::vector<std::string>& labels) {
    const auto n = static_cast<Eigen::Index>(labels.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = 0; b < n; ++b) out(a, b) = exact_id_score(labels[a], labels[b]);
    }
    return out;
  };
}

LabelScorer lexical_scorer(double tau) {
  return [tau](const std::vector<std::string>& labels) {
    std::vector<Eigen::VectorXd> vectors;
    vectors.reserve(labels.size());
    for (const auto& l : labels) vectors.push_back(lexical_embed(l));
    return kernel_matrix(vectors, tau);
  };
}

LabelScorer service_scorer(std::shared_ptr<EmbeddingClient> client, double tau) {
  return [client = std::move(client), tau](const std::vector<std::string>& labels) {
    return kernel_matrix(client->embed(labels), tau);
  };
}

std::set<std::string> detect_duplicate_labels(const std::vector<Observation>& observations,
                                              double separation) {
  std::map<std::pair<std::string, std::string>, std::vector<Point2d>> seen;
  for (const auto& o : observations) seen[{o.recording_id, o.label}].push_back(o.position);
  std::set<std::string> out;
  for (const auto& [key, positions] : seen) {
    for (std::size_t a = 0; a < positions.size() && !out.count(key.second); ++a) {
      for (std::size_t b = a + 1; b < positions.size(); ++b) {
        if ((positions[a] - positions[b]).norm() > separation) {
          out.insert(key.second);
          break;
        }
      }
    }
  }
  return out;
}

std::vector<std::size_t> duplicate_label_indices(const std::vector<Observation>& observations,
                                                 const RelatednessOptions& options,
                                                 const std::set<std::string>& flagged) {
  std::vector<std::size_t> out;
  if (!options.drop_duplicate_labels) return out;
  auto dup = detect_duplicate_labels(observations, options.duplicate_separation);
  dup.insert(flagged.begin(), flagged.end());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    if (dup.count(observations[i].label)) out.push_back(i);
  }
  return out;
}

RelatednessMatrix build_matrix(const std::vector<Observation>& observations,
                               const LabelScorer& scorer, const RelatednessOptions& options,
                               const std::set<std::string>& flagged) {
  if (observations.empty()) throw InputError("build_matrix: no observations");
  if (!(options.sparsify_below >= 0 && options.sparsify_below < 1)) {
    throw InputError("build_matrix: sparsify_below must lie in [0, 1)");
  }
  if (!(options.tau > 0)) throw InputError("build_matrix: tau must be positive");

  std::vector<std::string> labels;
  std::map<std::string, Eigen::Index> label_index;
  std::vector<Eigen::Index> slot(observations.size());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    auto [it, inserted] = label_index.try_emplace(observations[i].label,
                                                  static_cast<Eigen::Index>(labels.size()));
    if (inserted) labels.push_back(observations[i].label);
    slot[i] = it->second;
  }
  const Eigen::MatrixXd scores = scorer(labels);
  if (scores.rows() != static_cast<Eigen::Index>(labels.size()) || scores.cols() != scores.rows()) {
    throw ProtocolError("label scorer returned a matrix of the wrong shape");
  }

  std::vector<char> dropped(observations.size(), 0);
  for (std::size_t i : duplicate_label_indices(observations, options, flagged)) dropped[i] = 1;

  const std::size_t n = observations.size();
  RelatednessMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dropped[j]) continue;
      if (options.exclude_same_recording &&
          observations[i].recording_id == observations[j].recording_id) {
        continue;
      }
      double s = scores(slot[i], slot[j]);
      if (!std::isfinite(s)) throw ProtocolError("label scorer produced a non-finite score");
      s = std::clamp(s, 0.0, 1.0);
      if (s < options.sparsify_below) continue;
      if (s != 0) out.set(i, j, s);
    }
  }
  return out;
}

}  // namespace lmap
