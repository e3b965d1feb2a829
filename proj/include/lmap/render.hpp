#pragma once

#include <string>

#include "lmap/aggregate.hpp"
#include "lmap/evaluate.hpp"

namespace lmap {

struct RenderOptions {
  double pixels_per_meter = 50.0;
  double margin_m = 1.0;
};

/// SVG scatter of the map on a 1 m grid. With ground truth, map positions are
/// first carried onto the truth frame by the evaluation similarity, and truth
/// landmarks are drawn as small black markers. Output is a pure function of
/// the inputs.
std::string render_svg(const SemanticLandmarkMap& map, const GroundTruth* truth = nullptr,
                       const RenderOptions& options = {});

}  // namespace lmap
