#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lmap/core.hpp"

namespace lmap {

class EmbeddingClient;

/// Symmetric observation-by-observation relatedness with zero diagonal and
/// entries in [0, 1].
class RelatednessMatrix {
 public:
  struct Entry {
    std::size_t i, j;  // i < j
    double score;
  };

  RelatednessMatrix() = default;
  explicit RelatednessMatrix(std::size_t n) : values_(Eigen::MatrixXd::Zero(n, n)) {}
  /// Throws InputError unless `values` satisfies the invariants.
  explicit RelatednessMatrix(Eigen::MatrixXd values);

  std::size_t size() const { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  /// Sets both (i, j) and (j, i). Diagonal writes are rejected.
  void set(std::size_t i, std::size_t j, double score);

  const Eigen::MatrixXd& values() const { return values_; }
  /// Nonzero upper-triangle entries, row-major.
  std::vector<Entry> nonzero_entries() const;

 private:
  Eigen::MatrixXd values_;
};

struct RelatednessOptions {
  bool exclude_same_recording = true;
  double sparsify_below = 0.1;
  bool drop_duplicate_labels = false;
  double tau = 0.5;
  /// Within-recording separation above which a repeated label counts as a
  /// duplicated landmark.
  double duplicate_separation = 3.0;
};

/// Maps a list of distinct labels to their pairwise score matrix (values in
/// [0, 1], ones on the diagonal).
using LabelScorer = std::function<Eigen::MatrixXd(const std::vector<std::string>& labels)>;

enum class ProviderKind { ExactId, Lexical, Service };

ProviderKind parse_provider(std::string_view name);

double exact_id_score(std::string_view a, std::string_view b);

inline constexpr Eigen::Index kLexicalDimension = 512;

/// L2-normalized count vector of boundary-padded character trigrams (ASCII
/// case-folded), hashed into kLexicalDimension buckets with FNV-1a.
Eigen::VectorXd lexical_embed(std::string_view label);

/// Gaussian kernel exp(-|u - v|^2 / (2 tau^2)).
double score_from_vectors(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double tau);

LabelScorer exact_id_scorer();
LabelScorer lexical_scorer(double tau);
LabelScorer service_scorer(std::shared_ptr<EmbeddingClient> client, double tau);

/// Labels that occur more than `separation` apart inside a single recording.
std::set<std::string> detect_duplicate_labels(const std::vector<Observation>& observations,
                                              double separation = 3.0);

/// Relatedness over all observations. With options.drop_duplicate_labels,
/// every row and column of an observation whose label is in `flagged` or is
/// detected by detect_duplicate_labels is zeroed.
RelatednessMatrix build_matrix(const std::vector<Observation>& observations,
                               const LabelScorer& scorer, const RelatednessOptions& options,
                               const std::set<std::string>& flagged = {});

/// Observation indices whose rows build_matrix zeroes for duplicate labels.
std::vector<std::size_t> duplicate_label_indices(const std::vector<Observation>& observations,
                                                 const RelatednessOptions& options,
                                                 const std::set<std::string>& flagged = {});

}  // namespace lmap
