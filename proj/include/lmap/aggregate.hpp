#pragma once

#include <span>
#include <string>
#include <vector>

#include "lmap/align.hpp"
#include "lmap/core.hpp"
#include "lmap/relatedness.hpp"

namespace lmap {

struct NoteEntry {
  std::string text;
  double timestamp = 0;

  bool operator==(const NoteEntry&) const = default;
};

/// Observation as it sits in the shared frame.
struct ClusterMember {
  std::size_t index = 0;
  std::string label;
  Point2d position{Point2d::Zero()};
  NoteEntry note;
};

struct LandmarkCluster {
  std::vector<ClusterMember> members;
  std::string label;
  Point2d position{Point2d::Zero()};
  std::vector<NoteEntry> notes;  // ascending by timestamp

  std::vector<std::size_t> member_indices() const;
};

struct SemanticLandmarkMap {
  std::vector<LandmarkCluster> clusters;
  std::string frame_note;
};

/// Minimal disjoint-set forest with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);
  std::size_t find(std::size_t x);
  bool unite(std::size_t a, std::size_t b);

 private:
  std::vector<std::size_t> parent_, size_;
};

/// Lower median: the element at index (n - 1) / 2 of the sorted values.
double lower_median(std::vector<double> values);

/// Most frequent label; ties go to the lexicographically smallest.
std::string majority_label(std::span<const ClusterMember> members);

/// Recomputes label, coordinatewise lower-median position and sorted notes.
void summarize(LandmarkCluster& cluster);

struct ClusterOptions {
  double link_threshold = 0.5;
  /// Observations left out of alignment join the nearest cluster with the
  /// same label inside this radius, otherwise they start their own.
  double reattach_radius = 3.0;
};

/// Connected components of the graph with an edge wherever S_ij >=
/// link_threshold. Members are placed in the shared frame through their
/// recording's transform. Indices in `excluded` take no part in the graph and
/// are reattached by label and proximity afterwards. Clusters come out ordered
/// by their smallest member index.
std::vector<LandmarkCluster> cluster(const std::vector<Observation>& observations,
                                     const TransformMap& transforms,
                                     const RelatednessMatrix& relatedness,
                                     const ClusterOptions& options = {},
                                     std::span<const std::size_t> excluded = {});

inline constexpr const char* kDefaultFrameNote =
    "shared frame = frame of the first recording (pinned to the identity transform); meters";

/// Final map: summaries refreshed, clusters sorted by label then position.
SemanticLandmarkMap assemble_map(std::vector<LandmarkCluster> clusters,
                                 std::string frame_note = kDefaultFrameNote);

}  // namespace lmap
