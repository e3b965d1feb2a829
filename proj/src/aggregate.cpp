#include "lmap/aggregate.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace lmap {

std::vector<std::size_t> LandmarkCluster::member_indices() const {
  std::vector<std::size_t> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back(m.index);
  return out;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  return true;
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

std::string majority_label(std::span<const ClusterMember> members) {
  std::map<std::string, std::size_t> counts;
  for (const auto& m : members) ++counts[m.label];
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {  // ascending, so '>' keeps the smallest on ties
    if (count > best_count) {
      best = &label;
      best_count = count;
    }
  }
  return best ? *best : std::string{};
}

void summarize(LandmarkCluster& cluster) {
  if (cluster.members.empty()) throw InputError("cluster without members");
  std::vector<double> xs, ys;
  xs.reserve(cluster.members.size());
  ys.reserve(cluster.members.size());
  cluster.notes.clear();
  for (const auto& m : cluster.members) {
    xs.push_back(m.position.x());
    ys.push_back(m.position.y());
    cluster.notes.push_back(m.note);
  }
  cluster.position = Point2d(lower_median(std::move(xs)), lower_median(std::move(ys)));
  cluster.label = majority_label(cluster.members);
  std::stable_sort(cluster.notes.begin(), cluster.notes.end(),
                   [](const NoteEntry& a, const NoteEntry& b) { return a.timestamp < b.timestamp; });
}

std::vector<LandmarkCluster> cluster(const std::vector<Observation>& observations,
                                     const TransformMap& transforms,
                                     const RelatednessMatrix& relatedness,
                                     const ClusterOptions& options,
                                     std::span<const std::size_t> excluded) {
  if (!(options.link_threshold > 0 && options.link_threshold <= 1)) {
    throw InputError("cluster: link_threshold must lie in (0, 1]");
  }
  const std::size_t n = observations.size();
  if (relatedness.size() != n) throw InputError("cluster: relatedness size mismatch");

  std::vector<char> is_excluded(n, 0);
  for (std::size_t i : excluded) {
    if (i >= n) throw InputError("cluster: excluded index out of range");
    is_excluded[i] = 1;
  }

  std::vector<ClusterMember> members(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = observations[i];
    auto it = transforms.find(o.recording_id);
    if (it == transforms.end()) {
      throw InputError("cluster: missing transform for recording '" + o.recording_id + "'");
    }
    members[i] = {i, o.label, apply(it->second, o.position), {o.note, o.timestamp}};
  }

  DisjointSets sets(n);
  for (const auto& e : relatedness.nonzero_entries()) {
    if (e.score >= options.link_threshold && !is_excluded[e.i] && !is_excluded[e.j]) {
      sets.unite(e.i, e.j);
    }
  }

  std::vector<LandmarkCluster> clusters;
  std::map<std::size_t, std::size_t> slot_of_root;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_excluded[i]) continue;
    auto [it, inserted] = slot_of_root.try_emplace(sets.find(i), clusters.size());
    if (inserted) clusters.emplace_back();
    clusters[it->second].members.push_back(members[i]);
  }
  for (auto& c : clusters) summarize(c);

  for (std::size_t i = 0; i < n; ++i) {
    if (!is_excluded[i]) continue;
    const auto& m = members[i];
    LandmarkCluster* nearest = nullptr;
    double best = 0;
    for (auto& c : clusters) {
      if (c.label != m.label) continue;
      const double d = (c.position - m.position).norm();
      if (d <= options.reattach_radius && (!nearest || d < best)) {
        best = d;
        nearest = &c;
      }
    }
    if (nearest) {
      nearest->members.push_back(m);
      summarize(*nearest);
    } else {
      LandmarkCluster fresh;
      fresh.members.push_back(m);
      summarize(fresh);
      clusters.push_back(std::move(fresh));
    }
  }

  for (auto& c : clusters) {
    std::sort(c.members.begin(), c.members.end(),
              [](const ClusterMember& a, const ClusterMember& b) { return a.index < b.index; });
  }
  std::sort(clusters.begin(), clusters.end(), [](const LandmarkCluster& a, const LandmarkCluster& b) {
    return a.members.front().index < b.members.front().index;
  });
  return clusters;
}

SemanticLandmarkMap assemble_map(std::vector<LandmarkCluster> clusters, std::string frame_note) {
  for (auto& c : clusters) summarize(c);
  std::stable_sort(clusters.begin(), clusters.end(),
                   [](const LandmarkCluster& a, const LandmarkCluster& b) {
                     if (a.label != b.label) return a.label < b.label;
                     if (a.position.x() != b.position.x()) return a.position.x() < b.position.x();
                     return a.position.y() < b.position.y();
                   });
  return {std::move(clusters), std::move(frame_note)};
}

}  // namespace lmap
