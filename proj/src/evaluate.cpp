#include "lmap/evaluate.hpp"

#include <limits>
#include <map>
#include <set>

namespace lmap {

Similarity2d umeyama_similarity(std::span<const Point2d> src, std::span<const Point2d> dst) {
  if (src.size() != dst.size()) throw InputError("umeyama_similarity: size mismatch");
  Eigen::Matrix2Xd a(2, static_cast<Eigen::Index>(src.size()));
  Eigen::Matrix2Xd b(2, static_cast<Eigen::Index>(dst.size()));
  for (std::size_t k = 0; k < src.size(); ++k) {
    a.col(static_cast<Eigen::Index>(k)) = src[k];
    b.col(static_cast<Eigen::Index>(k)) = dst[k];
  }
  return umeyama_similarity(a, b);
}

EvalReport positional_error(const SemanticLandmarkMap& map, const GroundTruth& truth) {
  std::map<std::string, std::vector<Point2d>> truth_by_id;
  for (const auto& l : truth.landmarks) truth_by_id[l.id].push_back(l.position);
  std::map<std::string, std::size_t> cluster_label_count;
  for (const auto& c : map.clusters) ++cluster_label_count[c.label];

  EvalReport report;
  report.cluster_count = map.clusters.size();
  for (const auto& [id, positions] : truth_by_id) {
    if (cluster_label_count.count(id)) ++report.coverage;
  }

  std::vector<Point2d> src, dst;
  std::vector<const LandmarkCluster*> extra;
  for (const auto& c : map.clusters) {
    auto it = truth_by_id.find(c.label);
    if (it == truth_by_id.end()) continue;
    if (it->second.size() == 1 && cluster_label_count[c.label] == 1) {
      src.push_back(c.position);
      dst.push_back(it->second.front());
    } else {
      extra.push_back(&c);
    }
  }
  if (src.size() < 2) {
    throw DegenerateError("evaluation: " + std::to_string(src.size()) +
                          " uniquely matched landmark(s); at least 2 are needed");
  }

  Similarity2d sim;
  try {
    sim = umeyama_similarity(std::span<const Point2d>(src), std::span<const Point2d>(dst));
  } catch (const InputError& e) {
    throw DegenerateError(std::string("evaluation: ") + e.what());
  }

  double total = 0;
  for (std::size_t k = 0; k < src.size(); ++k) total += (sim(src[k]) - dst[k]).norm();
  for (const LandmarkCluster* c : extra) {
    const Point2d aligned = sim(c->position);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : truth_by_id.at(c->label)) best = std::min(best, (aligned - p).norm());
    total += best;
  }

  report.anchor_pairs = src.size();
  report.matched_pairs = src.size() + extra.size();
  report.positional_error = total / static_cast<double>(report.matched_pairs);
  report.scale = sim.scale;
  report.applied_transform = sim.transform;
  return report;
}

}  // namespace lmap
