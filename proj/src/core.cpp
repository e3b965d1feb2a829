#include "lmap/core.hpp"

#include <algorithm>

namespace lmap {

std::vector<std::string> recording_ids_of(const std::vector<Observation>& observations) {
  std::vector<std::string> ids;
  for (const auto& obs : observations) {
    if (std::find(ids.begin(), ids.end(), obs.recording_id) == ids.end()) {
      ids.push_back(obs.recording_id);
    }
  }
  return ids;
}

}  // namespace lmap
